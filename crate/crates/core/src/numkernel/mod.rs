//! Complex linear-algebra substrate.
//!
//! Everything here is pure and deterministic. The eigenvalue oracle and the
//! singular-value routines are independent of the structured solvers used by
//! the resolvent layer, so they can serve as cross-checks.

mod dd;
mod eig;
mod lu;
mod matrix;
mod solve;
mod svd;
mod vector;

pub use dd::{DdComplex, DoubleDouble};
pub use eig::dense_eigenvalues;
pub use lu::Lu;
pub use matrix::DenseMatrix;
pub use solve::{solve_lower_bidiagonal, solve_lower_triangular};
pub use svd::{
    independence_rank, numerical_rank, singular_values, smallest_singular_value, spectral_norm, spectral_norm_estimate,
    spectral_norm_of_columns, DEFAULT_RANK_TAU,
};
pub use vector::Vector;

/// Machine epsilon for `f64`.
pub const EPS: f64 = f64::EPSILON;
