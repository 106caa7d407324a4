use num_complex::Complex64;

use crate::error::{check_finite, Error, Result};
use crate::numkernel::Vector;
use crate::operators::RankOneProblem;

/// Eigenpairs with a smaller relative residual are accepted.
pub const ACCEPT_RESIDUAL: f64 = 1e-8;
/// At or above this relative residual `λ` is not an eigenvalue at all.
pub const REJECT_RESIDUAL: f64 = 1e-4;

const NORM_BOUND_SLACK: f64 = 1e-10;

/// A candidate eigenpair `(λ, y)` of `T + αF` with `y = R(λ)f`.
#[derive(Clone, Debug, PartialEq)]
pub struct EigenPair {
    pub lambda: Complex64,
    pub y: Vector,
    /// `‖(T + αF)y − λy‖ / ‖y‖`.
    pub relative_residual: f64,
    /// `‖y‖·|α|·‖e*‖ ≥ 1 − 1e-10`.
    pub norm_bound_ok: bool,
    /// `‖Ty − (λy − f)‖ / ‖y‖`.
    pub resolvent_residual: f64,
}

impl EigenPair {
    pub fn accepted(&self) -> bool {
        self.relative_residual < ACCEPT_RESIDUAL
    }
}

/// Builds `y = R(λ)f` and measures how well it is an eigenvector of `T + αF`.
pub fn certify_eigenpair(problem: &RankOneProblem, alpha: Complex64, lambda: Complex64) -> Result<EigenPair> {
    check_finite(alpha, "alpha")?;
    check_finite(lambda, "lambda")?;
    if lambda == Complex64::new(0.0, 0.0) {
        return Err(Error::ZeroShift);
    }
    let y = problem.op.resolvent_apply(lambda, problem.f())?;
    let y_norm = y.norm();
    let ty = problem.op.apply(&y)?;
    let ly = y.scaled(lambda);
    let perturbed = ty.add_scaled(alpha * problem.e_star().apply(&y)?, problem.f())?;
    let relative_residual = perturbed.sub(&ly)?.norm() / y_norm;
    let resolvent_residual = ty.sub(&ly.sub(problem.f())?)?.norm() / y_norm;
    if !relative_residual.is_finite() || relative_residual >= REJECT_RESIDUAL {
        return Err(Error::NotAnEigenvalue {
            lambda,
            residual: relative_residual,
        });
    }
    let norm_bound_ok = y_norm * alpha.norm() * problem.e_star().norm() >= 1.0 - NORM_BOUND_SLACK;
    Ok(EigenPair {
        lambda,
        y,
        relative_residual,
        norm_bound_ok,
        resolvent_residual,
    })
}
