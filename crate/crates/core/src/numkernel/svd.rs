use num_complex::Complex64;

use super::vector::euclid_norm;
use super::{DenseMatrix, Lu, Vector, EPS};
use crate::error::{check_dim, Result};

/// Default relative threshold for numerical rank decisions.
pub const DEFAULT_RANK_TAU: f64 = 1e-10;

const MAX_SWEEPS: usize = 80;

/// Singular values of the matrix whose columns are `cols`, in decreasing
/// order, computed by one-sided (Hestenes) Jacobi rotations.
pub fn singular_values(cols: &[Vec<Complex64>]) -> Vec<f64> {
    let mut a: Vec<Vec<Complex64>> = cols.to_vec();
    let k = a.len();
    for _ in 0..MAX_SWEEPS {
        let mut rotated = false;
        for p in 0..k {
            for q in p + 1..k {
                let (lo, hi) = a.split_at_mut(q);
                let (ap, aq) = (&mut lo[p], &mut hi[0]);
                let alpha: f64 = ap.iter().map(|x| x.norm_sqr()).sum();
                let beta: f64 = aq.iter().map(|x| x.norm_sqr()).sum();
                let gamma: Complex64 = ap.iter().zip(aq.iter()).map(|(x, y)| x.conj() * y).sum();
                let g = gamma.norm();
                if g == 0.0 || g <= EPS * (alpha * beta).sqrt() {
                    continue;
                }
                rotated = true;
                let phase = gamma / g;
                let zeta = (beta - alpha) / (2.0 * g);
                let t = zeta.signum() / (zeta.abs() + (1.0 + zeta * zeta).sqrt());
                let c = 1.0 / (1.0 + t * t).sqrt();
                let s = c * t;
                for (x, y) in ap.iter_mut().zip(aq.iter_mut()) {
                    // Rotate against the phase-aligned partner column.
                    let yt = *y * phase.conj();
                    let nx = *x * c - yt * s;
                    let ny = *x * s + yt * c;
                    *x = nx;
                    *y = ny * phase;
                }
            }
        }
        if !rotated {
            break;
        }
    }
    let mut sv: Vec<f64> = a.iter().map(|c| euclid_norm(c)).collect();
    sv.sort_by(|x, y| y.total_cmp(x));
    sv
}

fn columns_of(a: &DenseMatrix) -> Vec<Vec<Complex64>> {
    (0..a.dim()).map(|j| a.column(j).into_coords()).collect()
}

/// Exact spectral norm (largest singular value) via Jacobi.
pub fn spectral_norm(a: &DenseMatrix) -> f64 {
    singular_values(&columns_of(a)).first().copied().unwrap_or(0.0)
}

/// Spectral norm of the `m × k` matrix with the given columns.
pub fn spectral_norm_of_columns(cols: &[Vec<Complex64>]) -> f64 {
    singular_values(cols).first().copied().unwrap_or(0.0)
}

/// Spectral norm estimated by power iteration on `A^H A` (relative accuracy ~1e-6).
pub fn spectral_norm_estimate(a: &DenseMatrix) -> f64 {
    let n = a.dim();
    let mut x = Vector::from_raw((0..n).map(|i| Complex64::from_polar(1.0, 0.37 * i as f64)).collect());
    let mut est = 0.0;
    for _ in 0..500 {
        let Some(u) = x.normalized() else { return 0.0 };
        let y = a.mul_vec(&u).expect("square");
        let z = a.mul_adjoint_vec(&y).expect("square");
        let next = z.norm().sqrt();
        if next == 0.0 {
            return 0.0;
        }
        let done = (next - est).abs() <= 1e-9 * next;
        est = next;
        x = z;
        if done {
            break;
        }
    }
    est
}

/// Smallest singular value of a square matrix, by inverse iteration on
/// `(A^H A)⁻¹` through an LU factorization. Returns 0 for exactly singular input.
pub fn smallest_singular_value(a: &DenseMatrix) -> f64 {
    let lu = Lu::factor(a);
    if lu.is_exactly_singular() {
        return 0.0;
    }
    let n = a.dim();
    let mut x = Vector::from_raw(
        (0..n)
            .map(|i| Complex64::from_polar(1.0, 0.61 * i as f64 + 0.2))
            .collect(),
    );
    let mut est = f64::INFINITY;
    for _ in 0..60 {
        let Some(u) = x.normalized() else { return 0.0 };
        let y = lu.solve(&u).expect("square");
        let z = lu.solve_adjoint(&y).expect("square");
        let growth = z.norm();
        if !growth.is_finite() {
            return 0.0;
        }
        let next = 1.0 / growth.sqrt();
        let done = (next - est).abs() <= 1e-8 * next;
        est = next;
        x = z;
        if done {
            break;
        }
    }
    est
}

/// Number of singular values above `tau · max(1, ‖A‖)`.
pub fn numerical_rank(a: &DenseMatrix, tau: f64) -> usize {
    rank_from_columns(&columns_of(a), tau)
}

/// Numerical rank of the matrix whose columns are `vs`.
pub fn independence_rank(vs: &[Vector], tau: f64) -> Result<usize> {
    let Some(first) = vs.first() else { return Ok(0) };
    for v in vs {
        check_dim(first.dim(), v.dim())?;
    }
    let cols: Vec<Vec<Complex64>> = vs.iter().map(|v| v.coords().to_vec()).collect();
    Ok(rank_from_columns(&cols, tau))
}

fn rank_from_columns(cols: &[Vec<Complex64>], tau: f64) -> usize {
    let sv = singular_values(cols);
    let norm = sv.first().copied().unwrap_or(0.0);
    let cut = tau * norm.max(1.0);
    sv.iter().filter(|&&s| s > cut).count()
}
