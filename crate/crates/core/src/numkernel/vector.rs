use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};

/// A finite complex vector of positive dimension.
#[derive(Clone, Debug, PartialEq)]
pub struct Vector {
    coords: Vec<Complex64>,
}

impl Vector {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidArgument("vector dimension must be positive".into()));
        }
        if coords.iter().any(|c| !(c.re.is_finite() && c.im.is_finite())) {
            return Err(Error::NonFinite("vector coordinates"));
        }
        Ok(Self { coords })
    }

    /// Wraps coordinates the caller already knows to be finite and non-empty.
    pub(crate) fn from_raw(coords: Vec<Complex64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self { coords }
    }

    pub fn from_real(values: &[f64]) -> Result<Self> {
        Self::new(values.iter().map(|&v| Complex64::new(v, 0.0)).collect())
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim > 0, "vector dimension must be positive");
        Self {
            coords: vec![Complex64::new(0.0, 0.0); dim],
        }
    }

    /// The standard basis vector with a one at 0-based `index`.
    pub fn basis(dim: usize, index: usize) -> Self {
        assert!(index < dim, "basis index {index} out of range for dimension {dim}");
        let mut v = Self::zeros(dim);
        v.coords[index] = Complex64::new(1.0, 0.0);
        v
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn coords_mut(&mut self) -> &mut [Complex64] {
        &mut self.coords
    }

    pub fn into_coords(self) -> Vec<Complex64> {
        self.coords
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.re.is_finite() && c.im.is_finite())
    }

    pub fn is_zero(&self) -> bool {
        self.coords.iter().all(|c| c.re == 0.0 && c.im == 0.0)
    }

    /// Euclidean norm, scaled so that neither huge nor tiny entries over/underflow.
    pub fn norm(&self) -> f64 {
        euclid_norm(&self.coords)
    }

    /// Hermitian inner product `⟨self, other⟩ = Σ conj(selfᵢ)·otherᵢ`.
    pub fn inner(&self, other: &Vector) -> Result<Complex64> {
        check_dim(self.dim(), other.dim())?;
        Ok(self.coords.iter().zip(&other.coords).map(|(a, b)| a.conj() * b).sum())
    }

    pub fn scaled(&self, c: Complex64) -> Vector {
        Vector {
            coords: self.coords.iter().map(|x| x * c).collect(),
        }
    }

    pub fn scale_in_place(&mut self, c: Complex64) {
        self.coords.iter_mut().for_each(|x| *x *= c);
    }

    /// `self + c·other`.
    pub fn add_scaled(&self, c: Complex64, other: &Vector) -> Result<Vector> {
        check_dim(self.dim(), other.dim())?;
        Ok(Vector {
            coords: self.coords.iter().zip(&other.coords).map(|(a, b)| a + c * b).collect(),
        })
    }

    pub fn sub(&self, other: &Vector) -> Result<Vector> {
        self.add_scaled(Complex64::new(-1.0, 0.0), other)
    }

    /// Unit vector in the same direction; `None` for the zero vector.
    pub fn normalized(&self) -> Option<Vector> {
        let n = self.norm();
        (n > 0.0).then(|| self.scaled(Complex64::new(1.0 / n, 0.0)))
    }
}

pub(crate) fn euclid_norm(xs: &[Complex64]) -> f64 {
    let big = xs.iter().fold(0.0f64, |m, c| m.max(c.re.abs()).max(c.im.abs()));
    if big == 0.0 || !big.is_finite() {
        return big;
    }
    let s: f64 = xs
        .iter()
        .map(|c| {
            let (a, b) = (c.re / big, c.im / big);
            a * a + b * b
        })
        .sum();
    big * s.sqrt()
}
