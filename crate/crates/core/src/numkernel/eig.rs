use num_complex::Complex64;

use super::{DenseMatrix, EPS};
use crate::error::{Error, Result};

const MAX_DIM: usize = 1024;
const ZERO: Complex64 = Complex64::new(0.0, 0.0);

#[inline]
fn cabs1(z: Complex64) -> f64 {
    z.re.abs() + z.im.abs()
}

/// All eigenvalues of `a`, with algebraic multiplicity.
///
/// Exactly triangular input returns its diagonal. Otherwise the matrix is
/// reduced to Hessenberg form by Householder reflections and the eigenvalues
/// are extracted with a Wilkinson-shifted complex QR iteration. The result is
/// sorted by decreasing modulus, then by argument.
pub fn dense_eigenvalues(a: &DenseMatrix) -> Result<Vec<Complex64>> {
    let n = a.dim();
    if n > MAX_DIM {
        return Err(Error::TooLarge(n));
    }
    let mut eigs = if a.is_lower_triangular() || a.is_upper_triangular() {
        a.diagonal()
    } else {
        let mut h = a.as_slice().to_vec();
        hessenberg_reduce(&mut h, n);
        hessenberg_qr(&mut h, n)?
    };
    eigs.sort_by(|x, y| y.norm().total_cmp(&x.norm()).then(x.arg().total_cmp(&y.arg())));
    Ok(eigs)
}

/// In-place reduction to upper Hessenberg form, `H = Q^H A Q`.
fn hessenberg_reduce(h: &mut [Complex64], n: usize) {
    if n < 3 {
        return;
    }
    let mut v = vec![ZERO; n];
    for k in 0..n - 2 {
        let m = n - k - 1;
        let col: Vec<Complex64> = (k + 1..n).map(|i| h[i * n + k]).collect();
        let xnorm = super::vector::euclid_norm(&col);
        if xnorm == 0.0 {
            continue;
        }
        let x0 = col[0];
        let phase = if x0 == ZERO {
            Complex64::new(1.0, 0.0)
        } else {
            x0 / x0.norm()
        };
        let alpha = -phase * xnorm;
        // v = x − αe₁, then normalise.
        v[..m].copy_from_slice(&col);
        v[0] -= alpha;
        let vnorm = super::vector::euclid_norm(&v[..m]);
        if vnorm == 0.0 {
            continue;
        }
        v[..m].iter_mut().for_each(|x| *x /= vnorm);
        // Left: rows k+1.., H ← (I − 2vv^H) H, columns k..n.
        for j in k..n {
            let mut s = ZERO;
            for i in 0..m {
                s += v[i].conj() * h[(k + 1 + i) * n + j];
            }
            let s2 = s * 2.0;
            for i in 0..m {
                h[(k + 1 + i) * n + j] -= v[i] * s2;
            }
        }
        // Right: columns k+1.., H ← H (I − 2vv^H), all rows.
        for r in 0..n {
            let row = &mut h[r * n + k + 1..r * n + n];
            let s: Complex64 = row.iter().zip(&v[..m]).map(|(a, b)| a * b).sum();
            let s2 = s * 2.0;
            for (a, b) in row.iter_mut().zip(&v[..m]) {
                *a -= s2 * b.conj();
            }
        }
        h[(k + 1) * n + k] = alpha;
        for i in k + 2..n {
            h[i * n + k] = ZERO;
        }
    }
}

/// True when the subdiagonal entry `h[k][k-1]` can be set to zero
/// (the Ahues–Tisseur test used by LAPACK's `zlahqr`, with moduli in place of
/// real parts since subdiagonals here are not made real).
fn negligible_subdiag(h: &[Complex64], n: usize, lo: usize, k: usize, smlnum: f64) -> bool {
    let sub = cabs1(h[k * n + k - 1]);
    if sub <= smlnum {
        return true;
    }
    let mut tst = cabs1(h[(k - 1) * n + k - 1]) + cabs1(h[k * n + k]);
    if tst == 0.0 {
        if k >= lo + 2 {
            tst += cabs1(h[(k - 1) * n + k - 2]);
        }
        if k + 1 < n {
            tst += cabs1(h[(k + 1) * n + k]);
        }
    }
    if sub > EPS * tst {
        return false;
    }
    let sup = cabs1(h[(k - 1) * n + k]);
    let ab = sub.max(sup);
    let ba = sub.min(sup);
    let hkk = h[k * n + k];
    let d = cabs1(h[(k - 1) * n + k - 1] - hkk);
    let aa = cabs1(hkk).max(d);
    let bb = cabs1(hkk).min(d);
    let s = aa + ab;
    ba * (ab / s) <= smlnum.max(EPS * (bb * (aa / s)))
}

fn hessenberg_qr(h: &mut [Complex64], n: usize) -> Result<Vec<Complex64>> {
    let mut eigs = vec![ZERO; n];
    if n == 0 {
        return Ok(eigs);
    }
    let smlnum = f64::MIN_POSITIVE * (n as f64 / EPS);
    let itmax = 30 * n.max(10);
    let mut total = 0usize;
    let mut hi = n - 1;
    let mut its = 0usize;
    let mut rot: Vec<(f64, Complex64)> = Vec::with_capacity(n);
    loop {
        // Locate the start of the active unreduced block.
        let mut lo = hi;
        while lo > 0 {
            if negligible_subdiag(h, n, 0, lo, smlnum) {
                h[lo * n + lo - 1] = ZERO;
                break;
            }
            lo -= 1;
        }
        if lo == hi {
            eigs[hi] = h[hi * n + hi];
            its = 0;
            if hi == 0 {
                break;
            }
            hi -= 1;
            continue;
        }
        total += 1;
        its += 1;
        if total > itmax {
            return Err(Error::NoConvergence { iterations: total });
        }

        let shift = if its % 20 == 10 {
            Complex64::new(0.75 * cabs1(h[(lo + 1) * n + lo]), 0.0) + h[lo * n + lo]
        } else if its.is_multiple_of(20) {
            Complex64::new(0.75 * cabs1(h[hi * n + hi - 1]), 0.0) + h[hi * n + hi]
        } else {
            wilkinson_shift(h, n, hi)
        };

        // Explicit shifted QR step on the active block lo..=hi.
        for k in lo..=hi {
            h[k * n + k] -= shift;
        }
        rot.clear();
        for k in lo..hi {
            let a = h[k * n + k];
            let b = h[(k + 1) * n + k];
            let (c, s) = givens(a, b);
            rot.push((c, s));
            for j in k..=hi {
                let x = h[k * n + j];
                let y = h[(k + 1) * n + j];
                h[k * n + j] = x * c + s * y;
                h[(k + 1) * n + j] = -s.conj() * x + y * c;
            }
        }
        for (idx, &(c, s)) in rot.iter().enumerate() {
            let k = lo + idx;
            for r in lo..=(k + 1).min(hi) {
                let x = h[r * n + k];
                let y = h[r * n + k + 1];
                h[r * n + k] = x * c + y * s.conj();
                h[r * n + k + 1] = -x * s + y * c;
            }
        }
        for k in lo..=hi {
            h[k * n + k] += shift;
        }
    }
    Ok(eigs)
}

fn wilkinson_shift(h: &[Complex64], n: usize, i: usize) -> Complex64 {
    let mut t = h[i * n + i];
    let u = h[(i - 1) * n + i].sqrt() * h[i * n + i - 1].sqrt();
    let s = cabs1(u);
    if s != 0.0 {
        let x = (h[(i - 1) * n + i - 1] - t) * 0.5;
        let sx = cabs1(x);
        let s = s.max(sx);
        let mut y = ((x / s) * (x / s) + (u / s) * (u / s)).sqrt() * s;
        if sx > 0.0 {
            let xs = x / sx;
            if xs.re * y.re + xs.im * y.im < 0.0 {
                y = -y;
            }
        }
        let denom = x + y;
        if denom != ZERO {
            t -= u * (u / denom);
        }
    }
    t
}

/// Rotation `[[c, s], [−s̄, c]]` with real `c` mapping `(a, b)` to `(r, 0)`.
fn givens(a: Complex64, b: Complex64) -> (f64, Complex64) {
    if b == ZERO {
        return (1.0, ZERO);
    }
    if a == ZERO {
        return (0.0, Complex64::new(1.0, 0.0));
    }
    let an = a.norm();
    let r = an.hypot(b.norm());
    let c = an / r;
    let s = (a / an) * b.conj() / r;
    (c, s)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numkernel::{smallest_singular_value, spectral_norm_estimate, Lu};
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    /// Max distance of a greedy nearest matching between two multisets.
    fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
        let mut used = vec![false; b.len()];
        let mut worst = 0.0f64;
        for x in a {
            let (j, d) = b
                .iter()
                .enumerate()
                .filter(|(j, _)| !used[*j])
                .map(|(j, y)| (j, (x - y).norm()))
                .min_by(|p, q| p.1.total_cmp(&q.1))
                .unwrap();
            used[j] = true;
            worst = worst.max(d);
        }
        worst
    }

    fn random_matrix(n: usize, seed: u64) -> DenseMatrix {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        DenseMatrix::from_fn(n, |_, _| c(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)))
    }

    #[test]
    fn diagonal_matrix() {
        let d = [c(1.0, 0.0), c(0.0, 2.0), c(-3.0, 0.0)];
        let e = dense_eigenvalues(&DenseMatrix::diagonal_matrix(&d)).unwrap();
        assert_eq!(multiset_distance(&d, &e), 0.0);
    }

    #[test]
    fn nilpotent_jordan_block() {
        let j = DenseMatrix::from_fn(4, |i, k| if k == i + 1 { c(1.0, 0.0) } else { ZERO });
        assert_eq!(dense_eigenvalues(&j).unwrap(), vec![ZERO; 4]);
    }

    #[test]
    fn companion_of_z_cubed_minus_one() {
        // Companion matrix of z³ − 1: ones on the subdiagonal, 1 in the top-right corner.
        let m = DenseMatrix::from_fn(3, |i, j| {
            if i == j + 1 || (i == 0 && j == 2) {
                c(1.0, 0.0)
            } else {
                ZERO
            }
        });
        let e = dense_eigenvalues(&m).unwrap();
        let expected: Vec<_> = (0..3)
            .map(|k| Complex64::from_polar(1.0, 2.0 * PI * k as f64 / 3.0))
            .collect();
        assert!(multiset_distance(&expected, &e) < 1e-10);
    }

    #[test]
    fn too_large_rejected() {
        assert_eq!(dense_eigenvalues(&DenseMatrix::zeros(1025)), Err(Error::TooLarge(1025)));
    }

    #[test]
    fn oracle_soundness_on_random_matrices() {
        for (n, seed) in [(1, 1), (2, 2), (7, 3), (40, 4), (120, 5)] {
            let a = random_matrix(n, seed);
            let eigs = dense_eigenvalues(&a).unwrap();
            assert_eq!(eigs.len(), n);
            let scale = spectral_norm_estimate(&a).max(1.0);
            for l in eigs {
                assert!(smallest_singular_value(&a.shifted(l)) <= 1e-8 * scale);
            }
            // Trace is the sum of eigenvalues.
            let tr: Complex64 = a.diagonal().iter().sum();
            let se: Complex64 = dense_eigenvalues(&a).unwrap().iter().sum();
            assert!((tr - se).norm() < 1e-9 * n as f64);
        }
    }

    #[test]
    fn similarity_invariance() {
        let n = 30;
        let a = random_matrix(n, 21);
        // Well-conditioned M: identity plus a small perturbation.
        let m = DenseMatrix::identity(n)
            .add(&random_matrix(n, 22).scaled(c(0.02, 0.0)))
            .unwrap();
        let minv = Lu::factor(&m).inverse().unwrap();
        let b = minv.matmul(&a).unwrap().matmul(&m).unwrap();
        let ea = dense_eigenvalues(&a).unwrap();
        let eb = dense_eigenvalues(&b).unwrap();
        assert!(multiset_distance(&ea, &eb) < 1e-6);
    }
}
