//! Numerical laboratory for rank-one perturbations `T + αF` of quasinilpotent
//! operators, driven by the scalar resolvent function `g(z) = e*((zI - T)⁻¹ f)`.
//!
//! The layers, bottom-up:
//!
//! * [`numkernel`]: complex vectors and dense matrices, structured shifted
//!   solves, a dense eigenvalue oracle, singular values and numerical rank.
//! * [`operators`]: truncated quasinilpotent models (weighted shifts, dense
//!   strictly lower triangular, Volterra quadrature) and rank-one data.
//! * [`moments`]: the Laurent coefficients `mᵢ = e*(Tⁱf)` of `g` and the
//!   classification of its singularity at the origin.
//! * [`resolvent`]: evaluation of `g` and `g'` by the Laurent series and by
//!   direct shifted solves.
//! * [`rootfinder`]: every solution of `g(z) = 1/α` in an annulus, via
//!   winding numbers, sector subdivision and Newton polishing.
//! * [`lab`]: eigenpair certificates, dense-oracle cross-validation, α scans,
//!   invariant-subspace certificates, the rank-two similarity and truncation
//!   trends.
//!
//! Functionals act bilinearly: `e*(x) = Σ cⱼ xⱼ` with no complex conjugation,
//! so the Laurent coefficients of `g` are exactly the moments.

pub mod error;
pub mod lab;
pub mod moments;
pub mod numkernel;
pub mod operators;
pub mod resolvent;
pub mod rootfinder;

pub use error::{Error, Result};
pub use num_complex::Complex64;

pub use lab::{
    alpha_scan, certify_eigenpair, halfspace_certificate, halfspace_certificate_for_basis, quasinilpotency_trend,
    rank_two_similarity, spectral_report, AlphaScan, EigenPair, HalfspaceCertificate, ReportOptions,
    SimilarityPerturbation, SpectralReport, TrendPoint,
};
pub use moments::{classify, compute_moments, eig_count_bound, Classification, MomentSequence, SingularityClass};
pub use numkernel::{DenseMatrix, Vector};
pub use operators::{Functional, ModelKind, OperatorModel, RankOnePerturbation, RankOneProblem};
pub use resolvent::{g_prime, g_series, g_solve, g_solve_accurate, EvalMethod, GEval};
pub use rootfinder::{find_roots, newton_polish, winding_count, Annulus, Contour, Root, RootFinderOptions, RootSet};
