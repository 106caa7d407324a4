//! Moments `mᵢ = e*(Tⁱf)`, the Laurent coefficients of `g` at the origin,
//! and the classification of that singularity.

use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::numkernel::Vector;
use crate::operators::{Functional, OperatorModel};

/// Relative zero threshold for moments.
pub const DEFAULT_MOMENT_TAU: f64 = 1e-12;
/// Absolute fallback used when a raw sequence has no non-zero reference scale.
pub const ABSOLUTE_ZERO_FLOOR: f64 = 1e-300;

/// `min(2·dim, 200)`.
pub fn default_horizon(dim: usize) -> usize {
    (2 * dim).min(200)
}

#[derive(Clone, Copy, Debug, PartialEq)]
struct MomentTerm {
    /// `mᵢ = mantissa · exp(log_scale)`.
    mantissa: Complex64,
    log_scale: f64,
    /// Log of the magnitude `mᵢ` is compared against when deciding whether it
    /// is a rounding-level zero. For orbit-derived moments this is
    /// `ln(‖e*‖‖Tⁱf‖)`.
    reference_ln: f64,
    /// Log of an upper bound on `|mᵢ|`, used to fit tail envelopes.
    envelope_ln: f64,
}

/// The sequence `m₀, …, m_M` together with its zero threshold.
#[derive(Clone, Debug, PartialEq)]
pub struct MomentSequence {
    terms: Vec<MomentTerm>,
    tau: f64,
}

impl MomentSequence {
    /// Wraps raw coefficients. Zero decisions use `max |mᵢ|` as the scale.
    pub fn from_values(values: Vec<Complex64>, tau: f64) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidArgument("moment sequence must be non-empty".into()));
        }
        check_tau(tau)?;
        let scale = values.iter().fold(0.0f64, |m, v| m.max(v.norm()));
        let reference_ln = if scale > 0.0 { scale.ln() } else { f64::NEG_INFINITY };
        let terms = values
            .into_iter()
            .map(|m| {
                let envelope_ln = if m.norm() > 0.0 {
                    m.norm().ln()
                } else {
                    f64::NEG_INFINITY
                };
                MomentTerm {
                    mantissa: m,
                    log_scale: 0.0,
                    reference_ln,
                    envelope_ln,
                }
            })
            .collect();
        Ok(Self { terms, tau })
    }

    /// `M`, the largest moment index held.
    pub fn horizon(&self) -> usize {
        self.terms.len() - 1
    }

    pub fn tau(&self) -> f64 {
        self.tau
    }

    /// `mᵢ` as a plain number (underflows to zero past the `f64` range).
    pub fn value(&self, i: usize) -> Complex64 {
        let t = &self.terms[i];
        if t.mantissa == Complex64::new(0.0, 0.0) {
            return t.mantissa;
        }
        t.mantissa * t.log_scale.exp()
    }

    pub fn values(&self) -> Vec<Complex64> {
        (0..self.terms.len()).map(|i| self.value(i)).collect()
    }

    /// `(mantissa, log_scale)` with `mᵢ = mantissa · exp(log_scale)`.
    pub fn scaled_term(&self, i: usize) -> (Complex64, f64) {
        (self.terms[i].mantissa, self.terms[i].log_scale)
    }

    /// `ln |mᵢ|`, `−∞` for an exact zero.
    pub fn ln_abs(&self, i: usize) -> f64 {
        let t = &self.terms[i];
        let a = t.mantissa.norm();
        if a == 0.0 {
            f64::NEG_INFINITY
        } else {
            a.ln() + t.log_scale
        }
    }

    /// Log of an upper bound on `|mᵢ|` (the geometric-envelope input for tail bounds).
    pub fn envelope_ln(&self, i: usize) -> f64 {
        self.terms[i].envelope_ln.max(self.ln_abs(i))
    }

    /// Whether `mᵢ` is zero up to rounding.
    pub fn is_negligible(&self, i: usize) -> bool {
        let t = &self.terms[i];
        let ln_abs = self.ln_abs(i);
        if ln_abs == f64::NEG_INFINITY {
            return true;
        }
        if t.reference_ln == f64::NEG_INFINITY {
            return ln_abs <= ABSOLUTE_ZERO_FLOOR.ln();
        }
        ln_abs <= self.tau.ln() + t.reference_ln
    }

    /// Largest index holding a non-negligible moment.
    pub fn last_nonzero(&self) -> Option<usize> {
        (0..self.terms.len()).rev().find(|&i| !self.is_negligible(i))
    }
}

fn check_tau(tau: f64) -> Result<()> {
    if tau > 0.0 && tau.is_finite() {
        Ok(())
    } else {
        Err(Error::InvalidArgument(format!(
            "zero threshold must be positive, got {tau}"
        )))
    }
}

/// `mᵢ = e*(Tⁱf)` for `i = 0..=M`, computed from the log-scaled orbit.
pub fn compute_moments(t: &OperatorModel, e_star: &Functional, f: &Vector, m: usize) -> Result<MomentSequence> {
    compute_moments_with_tau(t, e_star, f, m, DEFAULT_MOMENT_TAU)
}

pub fn compute_moments_with_tau(
    t: &OperatorModel,
    e_star: &Functional,
    f: &Vector,
    m: usize,
    tau: f64,
) -> Result<MomentSequence> {
    check_dim(t.dim(), e_star.dim())?;
    check_dim(t.dim(), f.dim())?;
    if m == 0 {
        return Err(Error::InvalidArgument("moment horizon must be at least 1".into()));
    }
    check_tau(tau)?;
    let e_norm = e_star.norm();
    let e_ln = if e_norm > 0.0 { e_norm.ln() } else { f64::NEG_INFINITY };
    let terms = t
        .scaled_orbit(f, m)?
        .into_iter()
        .map(|term| {
            let mantissa = e_star.apply(&term.vector)?;
            let reference_ln = e_ln + term.ln_norm();
            Ok(MomentTerm {
                mantissa,
                log_scale: term.log_scale,
                reference_ln,
                envelope_ln: reference_ln,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(MomentSequence { terms, tau })
}

/// Which of the three singularity types `g` exhibits at 0.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SingularityClass {
    /// Every moment vanishes: `g ≡ 0`.
    AllZero,
    /// `m_k ≠ 0` and `mⱼ = 0` for `j > k`: a pole of order `k + 1`.
    EventuallyZero { last_nonzero: usize },
    /// Non-zero moments persist into the top quarter of the horizon window.
    PersistentUpToHorizon,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Classification {
    pub class: SingularityClass,
    pub horizon: usize,
    /// Set when a support argument shows the trailing zeros continue past the horizon.
    pub exact: bool,
}

impl Classification {
    pub fn tag(&self) -> &'static str {
        match self.class {
            SingularityClass::AllZero => "AllZero",
            SingularityClass::EventuallyZero { .. } => "EventuallyZero",
            SingularityClass::PersistentUpToHorizon => "PersistentUpToHorizon",
        }
    }

    pub fn last_nonzero(&self) -> Option<usize> {
        match self.class {
            SingularityClass::EventuallyZero { last_nonzero } => Some(last_nonzero),
            _ => None,
        }
    }

    pub fn pole_order(&self) -> Option<usize> {
        self.last_nonzero().map(|k| k + 1)
    }

    pub fn eig_count_bound(&self) -> Option<usize> {
        eig_count_bound(self)
    }

    pub fn is_persistent(&self) -> bool {
        self.class == SingularityClass::PersistentUpToHorizon
    }
}

/// Trichotomy of the moment sequence, up to its horizon.
pub fn classify(ms: &MomentSequence) -> Classification {
    let horizon = ms.horizon();
    let class = match ms.last_nonzero() {
        None => SingularityClass::AllZero,
        Some(k) if k >= horizon - horizon / 4 && k > 0 => SingularityClass::PersistentUpToHorizon,
        Some(k) => SingularityClass::EventuallyZero { last_nonzero: k },
    };
    Classification {
        class,
        horizon,
        exact: false,
    }
}

/// Upper bound on the number of solutions of `g(z) = 1/α`: 0, `k + 1`, or none.
pub fn eig_count_bound(c: &Classification) -> Option<usize> {
    match c.class {
        SingularityClass::AllZero => Some(0),
        SingularityClass::EventuallyZero { last_nonzero } => Some(last_nonzero + 1),
        SingularityClass::PersistentUpToHorizon => None,
    }
}

/// Classifies and, where possible, certifies trailing zeros structurally.
///
/// All models are strictly lower triangular, so `Tⁱf` is supported on indices
/// `≥ q + i` when `f` starts at index `q`. If `e*` ends at index `p`, then
/// `mᵢ = 0` exactly for every `i > p − q`.
pub fn classify_structural(e_star: &Functional, f: &Vector, ms: &MomentSequence) -> Classification {
    let mut c = classify(ms);
    let first_f = f.coords().iter().position(|x| *x != Complex64::new(0.0, 0.0));
    let bound = match (e_star.last_support(), first_f) {
        (Some(p), Some(q)) if p >= q => Some(p - q),
        _ => None,
    };
    let exact_zero = |i: usize| ms.ln_abs(i) == f64::NEG_INFINITY;
    c.exact = match (c.class, bound) {
        (SingularityClass::AllZero, None) => true,
        (SingularityClass::AllZero, Some(b)) => b < ms.horizon() && (0..=b).all(exact_zero),
        (SingularityClass::EventuallyZero { last_nonzero }, Some(b)) => {
            b >= last_nonzero && b <= ms.horizon() && (last_nonzero + 1..=b).all(exact_zero)
        }
        _ => false,
    };
    c
}
