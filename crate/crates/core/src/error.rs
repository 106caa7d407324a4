use num_complex::Complex64;
use thiserror::Error;

/// Errors raised by the spectral laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero shift: z = 0 lies in the spectrum of every quasinilpotent model")]
    ZeroShift,
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("non-finite value produced or supplied in {0}")]
    NonFinite(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("dimension {0} exceeds the dense oracle limit of 1024")]
    TooLarge(usize),
    #[error("eigenvalue iteration did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("Laurent tail does not converge at |z| = {modulus:e} for horizon {horizon}")]
    TailNotConvergent { modulus: f64, horizon: usize },
    #[error("contour passes through a root (min |h| = {min_abs:e} on the contour)")]
    ContourThroughRoot { min_abs: f64 },
    #[error("phase step still too large after {samples} contour samples")]
    PhaseStepTooLarge { samples: usize },
    #[error("winding of subcells ({children}) disagrees with their parent cell ({parent})")]
    InconsistentWinding { parent: i64, children: i64 },
    #[error("Newton stalled after {iterations} iterations (|h| = {residual:e})")]
    NewtonStall { iterations: usize, residual: f64 },
    #[error("Newton iterate left the search domain at |z| = {modulus:e}")]
    LeftDomain { modulus: f64 },
    #[error("{lambda} is not an eigenvalue (relative residual {residual:e})")]
    NotAnEigenvalue { lambda: Complex64, residual: f64 },
    #[error("selected vectors are linearly dependent: rank {rank} < {size}")]
    DependentBasis { rank: usize, size: usize },
    #[error("N = e*⊗u is not nilpotent: |e*(u)| = {0:e}")]
    NotNilpotent(f64),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}

pub(crate) fn check_finite(z: Complex64, what: &'static str) -> Result<()> {
    if z.re.is_finite() && z.im.is_finite() {
        Ok(())
    } else {
        Err(Error::NonFinite(what))
    }
}
