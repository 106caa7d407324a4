use num_complex::Complex64;

use super::{DenseMatrix, Vector};
use crate::error::{check_dim, Result};

/// LU factorization with partial pivoting, `P A = L U`.
#[derive(Clone, Debug)]
pub struct Lu {
    n: usize,
    // L (unit lower, below diagonal) and U packed together, row-major.
    lu: Vec<Complex64>,
    perm: Vec<usize>,
}

impl Lu {
    pub fn factor(a: &DenseMatrix) -> Self {
        let n = a.dim();
        let mut lu = a.as_slice().to_vec();
        let mut perm: Vec<usize> = (0..n).collect();
        for k in 0..n {
            let p = (k..n)
                .max_by(|&i, &j| lu[i * n + k].norm().total_cmp(&lu[j * n + k].norm()))
                .unwrap_or(k);
            if p != k {
                for j in 0..n {
                    lu.swap(k * n + j, p * n + j);
                }
                perm.swap(k, p);
            }
            let pivot = lu[k * n + k];
            if pivot == Complex64::new(0.0, 0.0) {
                continue;
            }
            for i in k + 1..n {
                let m = lu[i * n + k] / pivot;
                lu[i * n + k] = m;
                if m == Complex64::new(0.0, 0.0) {
                    continue;
                }
                for j in k + 1..n {
                    let ukj = lu[k * n + j];
                    lu[i * n + j] -= m * ukj;
                }
            }
        }
        Self { n, lu, perm }
    }

    pub fn dim(&self) -> usize {
        self.n
    }

    /// True when some pivot is exactly zero.
    pub fn is_exactly_singular(&self) -> bool {
        (0..self.n).any(|k| self.lu[k * self.n + k] == Complex64::new(0.0, 0.0))
    }

    pub fn pivots(&self) -> Vec<Complex64> {
        (0..self.n).map(|k| self.lu[k * self.n + k]).collect()
    }

    /// Solves `A x = b`. The result contains non-finite entries if `A` is singular.
    pub fn solve(&self, b: &Vector) -> Result<Vector> {
        check_dim(self.n, b.dim())?;
        let n = self.n;
        let mut x: Vec<Complex64> = self.perm.iter().map(|&p| b.coords()[p]).collect();
        for i in 0..n {
            let acc: Complex64 = (0..i).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] -= acc;
        }
        for i in (0..n).rev() {
            let acc: Complex64 = (i + 1..n).map(|j| self.lu[i * n + j] * x[j]).sum();
            x[i] = (x[i] - acc) / self.lu[i * n + i];
        }
        Ok(Vector::from_raw(x))
    }

    /// Solves `A^H x = b`.
    pub fn solve_adjoint(&self, b: &Vector) -> Result<Vector> {
        check_dim(self.n, b.dim())?;
        let n = self.n;
        // A^H = U^H L^H P, so solve U^H y = b, L^H w = y, x = P^T w.
        let mut y = b.coords().to_vec();
        for i in 0..n {
            let acc: Complex64 = (0..i).map(|j| self.lu[j * n + i].conj() * y[j]).sum();
            y[i] = (y[i] - acc) / self.lu[i * n + i].conj();
        }
        for i in (0..n).rev() {
            let acc: Complex64 = (i + 1..n).map(|j| self.lu[j * n + i].conj() * y[j]).sum();
            y[i] -= acc;
        }
        let mut x = vec![Complex64::new(0.0, 0.0); n];
        for (k, &p) in self.perm.iter().enumerate() {
            x[p] = y[k];
        }
        Ok(Vector::from_raw(x))
    }

    pub fn inverse(&self) -> Result<DenseMatrix> {
        let cols = (0..self.n)
            .map(|j| self.solve(&Vector::basis(self.n, j)))
            .collect::<Result<Vec<_>>>()?;
        DenseMatrix::from_columns(&cols)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn solves_and_adjoint_solves() {
        let a = DenseMatrix::from_fn(4, |i, j| {
            Complex64::new(((i * 7 + j * 3) % 5) as f64 - 2.0, (i as f64 - j as f64) * 0.5)
        })
        .add(&DenseMatrix::identity(4).scaled(Complex64::new(3.0, 0.0)))
        .unwrap();
        let b = Vector::new(vec![
            Complex64::new(1.0, 2.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(2.0, -3.0),
        ])
        .unwrap();
        let lu = Lu::factor(&a);
        let x = lu.solve(&b).unwrap();
        assert!(a.mul_vec(&x).unwrap().sub(&b).unwrap().norm() < 1e-13);
        let y = lu.solve_adjoint(&b).unwrap();
        assert!(a.mul_adjoint_vec(&y).unwrap().sub(&b).unwrap().norm() < 1e-13);
    }
}
