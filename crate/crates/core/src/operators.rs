//! Truncated quasinilpotent operator models and rank-one perturbation data.
//!
//! Every model is strictly lower triangular at truncation, so its dense
//! matrix is nilpotent and `(zI − T)x = v` is solved by forward substitution.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{check_dim, check_finite, Error, Result};
use crate::numkernel::{solve_lower_bidiagonal, solve_lower_triangular, DdComplex, DenseMatrix, DoubleDouble, Vector};

const ZERO: Complex64 = Complex64::new(0.0, 0.0);

/// Running orbit vectors are renormalised once their norm leaves
/// `[RESCALE_LOW, 1/RESCALE_LOW]`.
const RESCALE_LOW: f64 = 1e-300;

/// Shift weights `wₙ` in `T eₙ = wₙ eₙ₊₁`.
#[derive(Clone, Debug, PartialEq)]
pub enum Weights {
    /// `wₙ = 1/n`.
    OneOverN,
    Explicit(Vec<Complex64>),
}

#[derive(Clone, Debug, PartialEq)]
pub enum DenseSource {
    /// Entries `(u + iv)/N` with `u, v` uniform on `[−1, 1]`, drawn row by row.
    Seeded(u64),
    Explicit(DenseMatrix),
}

#[derive(Clone, Debug, PartialEq)]
pub enum ModelKind {
    WeightedShift(Weights),
    DenseStrictlyLowerTriangular(DenseSource),
    /// Left-rectangle discretisation of `(Vu)(x) = ∫₀ˣ u`: entries `1/N` below the diagonal.
    VolterraQuadrature,
}

#[derive(Clone, Debug, PartialEq)]
enum Repr {
    /// Weights in f64 and, for the double-double route, at full precision.
    Shift(Vec<Complex64>, Vec<DdComplex>),
    Dense(DenseMatrix),
    Volterra,
}

/// A quasinilpotent operator truncated to its leading `dim × dim` corner.
#[derive(Clone, Debug, PartialEq)]
pub struct OperatorModel {
    kind: ModelKind,
    dim: usize,
    repr: Repr,
}

/// One orbit element `Tⁱf`, stored as `exp(log_scale) · vector` so that
/// factorially decaying orbits never underflow.
#[derive(Clone, Debug, PartialEq)]
pub struct OrbitTerm {
    pub vector: Vector,
    pub log_scale: f64,
}

impl OrbitTerm {
    /// The plain vector; may underflow to zero for long orbits.
    pub fn value(&self) -> Vector {
        self.vector.scaled(Complex64::new(self.log_scale.exp(), 0.0))
    }

    /// `ln ‖Tⁱf‖`, `−∞` for the zero vector.
    pub fn ln_norm(&self) -> f64 {
        let n = self.vector.norm();
        if n == 0.0 {
            f64::NEG_INFINITY
        } else {
            n.ln() + self.log_scale
        }
    }
}

impl OperatorModel {
    pub fn new(kind: ModelKind, dim: usize) -> Result<Self> {
        if dim == 0 {
            return Err(Error::InvalidArgument("truncation dimension must be positive".into()));
        }
        let repr = match &kind {
            ModelKind::WeightedShift(Weights::OneOverN) => {
                let exact: Vec<DdComplex> = (1..dim).map(reciprocal).collect();
                Repr::Shift(exact.iter().map(|w| w.to_complex()).collect(), exact)
            }
            ModelKind::WeightedShift(Weights::Explicit(w)) => {
                if w.len() < dim - 1 {
                    return Err(Error::DimensionMismatch {
                        expected: dim - 1,
                        got: w.len(),
                    });
                }
                for c in w {
                    check_finite(*c, "shift weights")?;
                }
                let w = w[..dim - 1].to_vec();
                let w_dd = w.iter().map(|&c| c.into()).collect();
                Repr::Shift(w, w_dd)
            }
            ModelKind::DenseStrictlyLowerTriangular(DenseSource::Seeded(seed)) => Repr::Dense(seeded_lower(dim, *seed)),
            ModelKind::DenseStrictlyLowerTriangular(DenseSource::Explicit(m)) => {
                if m.dim() < dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        got: m.dim(),
                    });
                }
                let corner = DenseMatrix::from_fn(dim, |i, j| m.get(i, j));
                if !corner.is_strictly_lower_triangular() {
                    return Err(Error::InvalidArgument(
                        "dense model must be strictly lower triangular".into(),
                    ));
                }
                Repr::Dense(corner)
            }
            ModelKind::VolterraQuadrature => Repr::Volterra,
        };
        Ok(Self { kind, dim, repr })
    }

    /// The weighted shift `T eₙ = (1/n) eₙ₊₁`.
    pub fn one_over_n_shift(dim: usize) -> Result<Self> {
        Self::new(ModelKind::WeightedShift(Weights::OneOverN), dim)
    }

    pub fn weighted_shift(weights: Vec<Complex64>, dim: usize) -> Result<Self> {
        Self::new(ModelKind::WeightedShift(Weights::Explicit(weights)), dim)
    }

    pub fn seeded_dense(dim: usize, seed: u64) -> Result<Self> {
        Self::new(ModelKind::DenseStrictlyLowerTriangular(DenseSource::Seeded(seed)), dim)
    }

    pub fn dense_strictly_lower(m: DenseMatrix) -> Result<Self> {
        let dim = m.dim();
        Self::new(ModelKind::DenseStrictlyLowerTriangular(DenseSource::Explicit(m)), dim)
    }

    pub fn volterra(dim: usize) -> Result<Self> {
        Self::new(ModelKind::VolterraQuadrature, dim)
    }

    /// The same model truncated at a different dimension.
    pub fn at_dim(&self, dim: usize) -> Result<Self> {
        Self::new(self.kind.clone(), dim)
    }

    pub fn kind(&self) -> &ModelKind {
        &self.kind
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Shift weights, when the model is a weighted shift.
    pub fn shift_weights(&self) -> Option<&[Complex64]> {
        match &self.repr {
            Repr::Shift(w, _) => Some(w),
            _ => None,
        }
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        check_dim(self.dim, x.dim())?;
        let xs = x.coords();
        let out = match &self.repr {
            Repr::Shift(w, _) => {
                let mut out = vec![ZERO; self.dim];
                for (n, wn) in w.iter().enumerate() {
                    out[n + 1] = wn * xs[n];
                }
                out
            }
            Repr::Dense(m) => (0..self.dim)
                .map(|i| m.row(i)[..i].iter().zip(xs).map(|(a, b)| a * b).sum())
                .collect(),
            Repr::Volterra => {
                let h = 1.0 / self.dim as f64;
                let mut acc = ZERO;
                let mut out = Vec::with_capacity(self.dim);
                for xi in xs {
                    out.push(acc * h);
                    acc += xi;
                }
                out
            }
        };
        Ok(Vector::from_raw(out))
    }

    /// `(f, Tf, …, Tᴹf)` by iterated application.
    pub fn orbit(&self, f: &Vector, m: usize) -> Result<Vec<Vector>> {
        check_dim(self.dim, f.dim())?;
        let mut out = Vec::with_capacity(m + 1);
        out.push(f.clone());
        for i in 0..m {
            let next = self.apply(&out[i])?;
            out.push(next);
        }
        Ok(out)
    }

    /// The orbit in log-magnitude form; exact up to rounding where the plain
    /// orbit would underflow.
    pub fn scaled_orbit(&self, f: &Vector, m: usize) -> Result<Vec<OrbitTerm>> {
        check_dim(self.dim, f.dim())?;
        let mut out = Vec::with_capacity(m + 1);
        let mut cur = OrbitTerm {
            vector: f.clone(),
            log_scale: 0.0,
        };
        rescale(&mut cur);
        out.push(cur.clone());
        for _ in 0..m {
            let mut next = OrbitTerm {
                vector: self.apply(&cur.vector)?,
                log_scale: cur.log_scale,
            };
            rescale(&mut next);
            out.push(next.clone());
            cur = next;
        }
        Ok(out)
    }

    /// `x = (zI − T)⁻¹ v` by structured forward substitution.
    pub fn resolvent_apply(&self, z: Complex64, v: &Vector) -> Result<Vector> {
        check_dim(self.dim, v.dim())?;
        check_finite(z, "shift")?;
        if z == ZERO {
            return Err(Error::ZeroShift);
        }
        match &self.repr {
            Repr::Shift(w, _) => solve_lower_bidiagonal(z, w, v),
            Repr::Dense(m) => solve_lower_triangular(z, m, v),
            Repr::Volterra => {
                let h = 1.0 / self.dim as f64;
                let inv_z = z.inv();
                let mut acc = ZERO;
                let mut out = Vec::with_capacity(self.dim);
                for vi in v.coords() {
                    let xi = (vi + acc * h) * inv_z;
                    acc += xi;
                    out.push(xi);
                }
                let x = Vector::from_raw(out);
                if !x.is_finite() {
                    return Err(Error::NonFinite("Volterra solve"));
                }
                Ok(x)
            }
        }
    }

    /// Same solve carried out in double-double arithmetic.
    pub fn resolvent_apply_dd(&self, z: Complex64, v: &Vector) -> Result<Vec<DdComplex>> {
        check_dim(self.dim, v.dim())?;
        check_finite(z, "shift")?;
        if z == ZERO {
            return Err(Error::ZeroShift);
        }
        let inv_z = DdComplex::from(z).inv();
        let vs: Vec<DdComplex> = v.coords().iter().map(|&c| c.into()).collect();
        let out = match &self.repr {
            Repr::Shift(_, w) => {
                let mut out = Vec::with_capacity(self.dim);
                let mut prev = vs[0] * inv_z;
                out.push(prev);
                for (vj, wj) in vs[1..].iter().zip(w) {
                    prev = (*vj + *wj * prev) * inv_z;
                    out.push(prev);
                }
                out
            }
            Repr::Dense(m) => {
                let mut out: Vec<DdComplex> = Vec::with_capacity(self.dim);
                for (i, vi) in vs.iter().enumerate() {
                    let mut acc = *vi;
                    for (a, xj) in m.row(i)[..i].iter().zip(&out) {
                        if *a != ZERO {
                            acc = acc + DdComplex::from(*a) * *xj;
                        }
                    }
                    out.push(acc * inv_z);
                }
                out
            }
            Repr::Volterra => {
                let h = DdComplex {
                    re: DoubleDouble::from_f64(1.0) / DoubleDouble::from_f64(self.dim as f64),
                    im: DoubleDouble::ZERO,
                };
                let mut acc = DdComplex::ZERO;
                let mut out = Vec::with_capacity(self.dim);
                for vi in &vs {
                    let xi = (*vi + acc * h) * inv_z;
                    acc = acc + xi;
                    out.push(xi);
                }
                out
            }
        };
        if out
            .iter()
            .any(|c| !c.to_complex().re.is_finite() || !c.to_complex().im.is_finite())
        {
            return Err(Error::NonFinite("double-double solve"));
        }
        Ok(out)
    }

    /// Dense matrix of the truncation.
    pub fn matrix(&self) -> DenseMatrix {
        match &self.repr {
            Repr::Shift(w, _) => {
                let mut m = DenseMatrix::zeros(self.dim);
                for (n, wn) in w.iter().enumerate() {
                    m.set(n + 1, n, *wn);
                }
                m
            }
            Repr::Dense(m) => m.clone(),
            Repr::Volterra => {
                let h = Complex64::new(1.0 / self.dim as f64, 0.0);
                DenseMatrix::from_fn(self.dim, |i, j| if i > j { h } else { ZERO })
            }
        }
    }

    /// Dense matrix of `T + αF`.
    pub fn materialize(&self, pert: &RankOnePerturbation, alpha: Complex64) -> Result<DenseMatrix> {
        check_dim(self.dim, pert.dim())?;
        check_finite(alpha, "alpha")?;
        let mut m = self.matrix();
        m.add_outer(alpha, pert.f.coords(), pert.e_star.coords())?;
        Ok(m)
    }
}

fn rescale(term: &mut OrbitTerm) {
    let n = term.vector.norm();
    if n > 0.0 && !(RESCALE_LOW..=1.0 / RESCALE_LOW).contains(&n) {
        term.vector.scale_in_place(Complex64::new(1.0 / n, 0.0));
        term.log_scale += n.ln();
    }
}

fn seeded_lower(dim: usize, seed: u64) -> DenseMatrix {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let scale = 1.0 / dim as f64;
    let mut m = DenseMatrix::zeros(dim);
    for i in 1..dim {
        for j in 0..i {
            let re: f64 = rng.gen_range(-1.0..1.0);
            let im: f64 = rng.gen_range(-1.0..1.0);
            m.set(i, j, Complex64::new(re, im) * scale);
        }
    }
    m
}

/// `1/n` to double-double precision.
fn reciprocal(n: usize) -> DdComplex {
    DdComplex {
        re: DoubleDouble::from_f64(1.0) / DoubleDouble::from_f64(n as f64),
        im: DoubleDouble::ZERO,
    }
}

/// A bounded functional `e*`, applied bilinearly: `e*(x) = Σ cⱼ xⱼ`.
#[derive(Clone, Debug, PartialEq)]
pub struct Functional {
    coords: Vec<Complex64>,
    /// The same coordinates at double-double precision.
    coords_dd: Vec<DdComplex>,
}

impl Functional {
    pub fn new(coords: Vec<Complex64>) -> Result<Self> {
        Vector::new(coords.clone())?;
        Ok(Self::from_dd(coords.iter().map(|&c| c.into()).collect()))
    }

    fn from_dd(coords_dd: Vec<DdComplex>) -> Self {
        Self {
            coords: coords_dd.iter().map(|c| c.to_complex()).collect(),
            coords_dd,
        }
    }

    /// The coordinate functional `eₖ*` for 0-based `index`.
    pub fn coordinate(dim: usize, index: usize) -> Self {
        Self::from_dd(Vector::basis(dim, index).coords().iter().map(|&c| c.into()).collect())
    }

    /// `x ↦ Σ xₙ/n` (1-based `n`).
    pub fn one_over_n(dim: usize) -> Self {
        Self::from_dd((1..=dim).map(reciprocal).collect())
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    pub fn coords(&self) -> &[Complex64] {
        &self.coords
    }

    pub fn norm(&self) -> f64 {
        Vector::from_raw(self.coords.clone()).norm()
    }

    pub fn scaled(&self, c: Complex64) -> Self {
        let c = DdComplex::from(c);
        Self::from_dd(self.coords_dd.iter().map(|&x| x * c).collect())
    }

    pub fn apply(&self, x: &Vector) -> Result<Complex64> {
        check_dim(self.dim(), x.dim())?;
        Ok(self.coords.iter().zip(x.coords()).map(|(a, b)| a * b).sum())
    }

    pub fn apply_dd(&self, x: &[DdComplex]) -> Result<DdComplex> {
        check_dim(self.dim(), x.len())?;
        let mut acc = DdComplex::ZERO;
        for (a, b) in self.coords_dd.iter().zip(x) {
            if *a != DdComplex::ZERO {
                acc = acc + *a * *b;
            }
        }
        Ok(acc)
    }

    /// Index of the last non-zero coordinate.
    pub fn last_support(&self) -> Option<usize> {
        self.coords.iter().rposition(|c| *c != ZERO)
    }
}

/// The rank-one operator `F = e* ⊗ f`, `F x = e*(x) f`.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOnePerturbation {
    pub e_star: Functional,
    pub f: Vector,
}

impl RankOnePerturbation {
    pub fn new(e_star: Functional, f: Vector) -> Result<Self> {
        check_dim(e_star.dim(), f.dim())?;
        Ok(Self { e_star, f })
    }

    pub fn dim(&self) -> usize {
        self.f.dim()
    }

    pub fn apply(&self, x: &Vector) -> Result<Vector> {
        Ok(self.f.scaled(self.e_star.apply(x)?))
    }

    pub fn matrix(&self) -> DenseMatrix {
        let mut m = DenseMatrix::zeros(self.dim());
        m.add_outer(Complex64::new(1.0, 0.0), self.f.coords(), self.e_star.coords())
            .expect("dimensions checked at construction");
        m
    }
}

/// A model together with its rank-one perturbation data.
#[derive(Clone, Debug, PartialEq)]
pub struct RankOneProblem {
    pub op: OperatorModel,
    pub pert: RankOnePerturbation,
}

impl RankOneProblem {
    pub fn new(op: OperatorModel, pert: RankOnePerturbation) -> Result<Self> {
        check_dim(op.dim(), pert.dim())?;
        Ok(Self { op, pert })
    }

    pub fn dim(&self) -> usize {
        self.op.dim()
    }

    pub fn e_star(&self) -> &Functional {
        &self.pert.e_star
    }

    pub fn f(&self) -> &Vector {
        &self.pert.f
    }

    /// `max(1, ‖f‖‖e*‖)`, the natural radius scale of `g`.
    pub fn radius_scale(&self) -> f64 {
        (self.pert.f.norm() * self.pert.e_star.norm()).max(1.0)
    }

    pub fn materialize(&self, alpha: Complex64) -> Result<DenseMatrix> {
        self.op.materialize(&self.pert, alpha)
    }

    /// `(T + αF) x`.
    pub fn apply_perturbed(&self, alpha: Complex64, x: &Vector) -> Result<Vector> {
        let tx = self.op.apply(x)?;
        tx.add_scaled(alpha * self.pert.e_star.apply(x)?, &self.pert.f)
    }
}
