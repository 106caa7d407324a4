use num_complex::Complex64;

use super::{DenseMatrix, Vector};
use crate::error::{check_dim, check_finite, Error, Result};

/// Solves `(zI − T)x = rhs` where `T` has `subdiag` on its first subdiagonal
/// and zeros elsewhere, i.e. the system with diagonal `z` and subdiagonal
/// `−subdiag`. Forward substitution, exact up to rounding.
pub fn solve_lower_bidiagonal(z: Complex64, subdiag: &[Complex64], rhs: &Vector) -> Result<Vector> {
    check_finite(z, "shift")?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroShift);
    }
    check_dim(rhs.dim() - 1, subdiag.len())?;
    let b = rhs.coords();
    let inv_z = z.inv();
    let mut x = Vec::with_capacity(b.len());
    let mut prev = b[0] * inv_z;
    x.push(prev);
    for (bj, wj) in b[1..].iter().zip(subdiag) {
        prev = (bj + wj * prev) * inv_z;
        x.push(prev);
    }
    let x = Vector::from_raw(x);
    if !x.is_finite() {
        return Err(Error::NonFinite("bidiagonal solve"));
    }
    Ok(x)
}

/// Solves `(zI − T)x = rhs` for strictly lower triangular `T` by forward
/// substitution. Entries of `T` on or above the diagonal are ignored.
pub fn solve_lower_triangular(z: Complex64, t: &DenseMatrix, rhs: &Vector) -> Result<Vector> {
    check_finite(z, "shift")?;
    if z == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroShift);
    }
    check_dim(t.dim(), rhs.dim())?;
    let inv_z = z.inv();
    let mut x: Vec<Complex64> = Vec::with_capacity(t.dim());
    for (i, bi) in rhs.coords().iter().enumerate() {
        let acc: Complex64 = t.row(i)[..i].iter().zip(&x).map(|(a, xj)| a * xj).sum();
        x.push((bi + acc) * inv_z);
    }
    let x = Vector::from_raw(x);
    if !x.is_finite() {
        return Err(Error::NonFinite("triangular solve"));
    }
    Ok(x)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn residual(z: Complex64, w: &[Complex64], x: &Vector, rhs: &Vector) -> f64 {
        // (zI − T)x computed by explicit multiplication.
        let xs = x.coords();
        let mut r = Vec::new();
        for j in 0..xs.len() {
            let tx = if j == 0 { c(0.0) } else { w[j - 1] * xs[j - 1] };
            r.push(z * xs[j] - tx - rhs.coords()[j]);
        }
        Vector::new(r).unwrap().norm()
    }

    #[test]
    fn zero_subdiag_unit_shift_is_identity() {
        let v = Vector::new(vec![c(1.0), Complex64::new(2.0, -1.0), c(3.0)]).unwrap();
        let x = solve_lower_bidiagonal(c(1.0), &[c(0.0), c(0.0)], &v).unwrap();
        assert_eq!(x, v);
    }

    #[test]
    fn two_by_two_hand_substitution() {
        // [[2,0],[-1,2]] x = e_1  =>  x = (1/2, 1/4)
        let x = solve_lower_bidiagonal(c(2.0), &[c(1.0)], &Vector::basis(2, 0)).unwrap();
        assert_eq!(x.coords(), &[c(0.5), c(0.25)]);
    }

    #[test]
    fn random_instance_residual_is_tiny() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let mut cr = || Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0));
        let z = cr();
        let w: Vec<_> = (0..4).map(|_| cr()).collect();
        let rhs = Vector::new((0..5).map(|_| cr()).collect()).unwrap();
        let x = solve_lower_bidiagonal(z, &w, &rhs).unwrap();
        let scale = rhs.norm() + z.norm() * x.norm();
        assert!(residual(z, &w, &x, &rhs) <= 1e-14 * scale);
        assert!(residual(z, &w, &x, &rhs) <= 10.0 * f64::EPSILON * scale);
    }

    #[test]
    fn errors() {
        let v = Vector::basis(3, 0);
        assert_eq!(
            solve_lower_bidiagonal(c(0.0), &[c(1.0), c(1.0)], &v),
            Err(Error::ZeroShift)
        );
        assert!(matches!(
            solve_lower_bidiagonal(c(1.0), &[c(1.0)], &v),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn triangular_solve_multiplies_back() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let n = 30;
        let t = DenseMatrix::from_fn(n, |i, j| {
            if i > j {
                Complex64::new(rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)) / n as f64
            } else {
                c(0.0)
            }
        });
        let rhs = Vector::basis(n, 0);
        let z = Complex64::new(0.7, 0.4);
        let x = solve_lower_triangular(z, &t, &rhs).unwrap();
        let back = x.scaled(z).sub(&t.mul_vec(&x).unwrap()).unwrap();
        let scale = rhs.norm() + z.norm() * x.norm();
        assert!(back.sub(&rhs).unwrap().norm() <= 1e-12 * scale);
    }
}
