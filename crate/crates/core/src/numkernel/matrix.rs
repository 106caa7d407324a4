use num_complex::Complex64;

use super::vector::{euclid_norm, Vector};
use crate::error::{check_dim, Error, Result};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Square complex matrix stored row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DenseMatrix {
    dim: usize,
    data: Vec<Complex64>,
}

impl DenseMatrix {
    pub fn new(dim: usize, data: Vec<Complex64>) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("matrix dimension must be positive".into()));
        }
        check_dim(dim * dim, data.len())?;
        if data.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("matrix entries"));
        }
        Ok(Self { dim, data })
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "matrix dimension must be positive");
        Self {
            dim,
            data: vec![ZERO; dim * dim],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = Complex64::new(1.0, 0.0);
        }
        m
    }

    pub fn from_fn(dim: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in 0..dim {
                m.data[i * dim + j] = f(i, j);
            }
        }
        m
    }

    pub fn diagonal_matrix(diag: &[Complex64]) -> Self {
        let mut m = Self::zeros(diag.len());
        for (i, d) in diag.iter().enumerate() {
            m.data[i * diag.len() + i] = *d;
        }
        m
    }

    /// Matrix whose columns are the given vectors (must be `dim` of them).
    pub fn from_columns(cols: &[Vector]) -> Result<Self> {
        let dim = cols.first().map(Vector::dim).unwrap_or(0);
        check_dim(dim, cols.len())?;
        let mut m = Self::zeros(dim);
        for (j, c) in cols.iter().enumerate() {
            check_dim(dim, c.dim())?;
            for i in 0..dim {
                m.data[i * dim + j] = c.coords()[i];
            }
        }
        Ok(m)
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> Complex64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, v: Complex64) {
        self.data[i * self.dim + j] = v;
    }

    pub fn row(&self, i: usize) -> &[Complex64] {
        &self.data[i * self.dim..(i + 1) * self.dim]
    }

    pub fn as_slice(&self) -> &[Complex64] {
        &self.data
    }

    pub fn column(&self, j: usize) -> Vector {
        Vector::from_raw((0..self.dim).map(|i| self.get(i, j)).collect())
    }

    pub fn diagonal(&self) -> Vec<Complex64> {
        (0..self.dim).map(|i| self.get(i, i)).collect()
    }

    pub fn mul_vec(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim, x.dim())?;
        let xs = x.coords();
        Ok(Vector::from_raw(
            (0..self.dim)
                .map(|i| self.row(i).iter().zip(xs).map(|(a, b)| a * b).sum())
                .collect(),
        ))
    }

    /// `A^H x`.
    pub fn mul_adjoint_vec(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim, x.dim())?;
        let mut out = vec![ZERO; self.dim];
        for (i, xi) in x.coords().iter().enumerate() {
            for (o, a) in out.iter_mut().zip(self.row(i)) {
                *o += a.conj() * xi;
            }
        }
        Ok(Vector::from_raw(out))
    }

    pub fn matmul(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim(self.dim, other.dim)?;
        let n = self.dim;
        let mut out = Self::zeros(n);
        for i in 0..n {
            for k in 0..n {
                let a = self.data[i * n + k];
                if a == ZERO {
                    continue;
                }
                let orow = &other.data[k * n..(k + 1) * n];
                let dst = &mut out.data[i * n..(i + 1) * n];
                for (d, b) in dst.iter_mut().zip(orow) {
                    *d += a * b;
                }
            }
        }
        Ok(out)
    }

    pub fn adjoint(&self) -> DenseMatrix {
        Self::from_fn(self.dim, |i, j| self.get(j, i).conj())
    }

    pub fn add(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect(),
        })
    }

    pub fn sub(&self, other: &DenseMatrix) -> Result<DenseMatrix> {
        check_dim(self.dim, other.dim)?;
        Ok(Self {
            dim: self.dim,
            data: self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect(),
        })
    }

    pub fn scaled(&self, c: Complex64) -> DenseMatrix {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|a| a * c).collect(),
        }
    }

    /// `A - λI`.
    pub fn shifted(&self, lambda: Complex64) -> DenseMatrix {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.data[i * self.dim + i] -= lambda;
        }
        m
    }

    /// In-place `A += c · u vᵀ` (bilinear outer product, no conjugation).
    pub fn add_outer(&mut self, c: Complex64, u: &[Complex64], v: &[Complex64]) -> Result<()> {
        check_dim(self.dim, u.len())?;
        check_dim(self.dim, v.len())?;
        for (i, ui) in u.iter().enumerate() {
            let cu = c * ui;
            if cu == ZERO {
                continue;
            }
            for (a, vj) in self.data[i * self.dim..(i + 1) * self.dim].iter_mut().zip(v) {
                *a += cu * vj;
            }
        }
        Ok(())
    }

    pub fn frobenius_norm(&self) -> f64 {
        euclid_norm(&self.data)
    }

    pub fn max_abs(&self) -> f64 {
        self.data.iter().fold(0.0, |m, c| m.max(c.norm()))
    }

    pub fn is_lower_triangular(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| self.data[i * n + i + 1..(i + 1) * n].iter().all(|c| *c == ZERO))
    }

    pub fn is_upper_triangular(&self) -> bool {
        let n = self.dim;
        (0..n).all(|i| self.data[i * n..i * n + i].iter().all(|c| *c == ZERO))
    }

    pub fn is_strictly_lower_triangular(&self) -> bool {
        self.is_lower_triangular() && self.diagonal().iter().all(|c| *c == ZERO)
    }
}
