//! Spectral reports for `T + αF`: eigenpair certificates, cross-validation
//! against the dense oracle, α scans, invariant-subspace certificates, the
//! rank-two similarity and truncation trends.

mod eigenpair;
mod halfspace;
mod report;
mod scan;
mod similarity;
mod trend;

pub use eigenpair::{certify_eigenpair, EigenPair, ACCEPT_RESIDUAL, REJECT_RESIDUAL};
pub use halfspace::{halfspace_certificate, halfspace_certificate_for_basis, HalfspaceCertificate};
pub use report::{spectral_report, Match, OracleCheck, ReportOptions, SpectralReport};
pub use scan::{alpha_scan, AlphaScan};
pub use similarity::{rank_two_similarity, SimilarityPerturbation};
pub use trend::{quasinilpotency_trend, TrendPoint};
