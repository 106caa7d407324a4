use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::numkernel::{independence_rank, spectral_norm_of_columns, Vector, DEFAULT_RANK_TAU};
use crate::operators::RankOneProblem;

use super::eigenpair::EigenPair;

/// Projection residuals for a candidate invariant subspace `Y` of `T + αF`,
/// with `P` the orthogonal projector onto `Y`.
#[derive(Clone, Debug, PartialEq)]
pub struct HalfspaceCertificate {
    pub alpha: Complex64,
    /// The constant in `P⊥TP = c·P⊥FP`; `c = −α` for `T + αF`.
    pub c: Complex64,
    pub basis_size: usize,
    pub independence_rank: usize,
    /// `‖P⊥(T + αF)P‖`.
    pub invariance_residual: f64,
    /// `‖P⊥TP − c·P⊥FP‖`.
    pub corollary_residual: f64,
}

/// Certificate for the span of the given eigenvectors.
pub fn halfspace_certificate(
    problem: &RankOneProblem,
    alpha: Complex64,
    pairs: &[EigenPair],
) -> Result<HalfspaceCertificate> {
    if pairs.is_empty() {
        return Err(Error::InvalidArgument("eigenpair subset is empty".into()));
    }
    if let Some(p) = pairs.iter().find(|p| !p.accepted()) {
        return Err(Error::NotAnEigenvalue {
            lambda: p.lambda,
            residual: p.relative_residual,
        });
    }
    let basis: Vec<Vector> = pairs.iter().map(|p| p.y.clone()).collect();
    halfspace_certificate_for_basis(problem, alpha, &basis)
}

/// Certificate for the span of an explicit basis.
pub fn halfspace_certificate_for_basis(
    problem: &RankOneProblem,
    alpha: Complex64,
    basis: &[Vector],
) -> Result<HalfspaceCertificate> {
    if basis.is_empty() {
        return Err(Error::InvalidArgument("basis is empty".into()));
    }
    let normalized: Vec<Vector> = basis
        .iter()
        .map(|v| {
            v.normalized().ok_or(Error::DependentBasis {
                rank: 0,
                size: basis.len(),
            })
        })
        .collect::<Result<_>>()?;
    let rank = independence_rank(&normalized, DEFAULT_RANK_TAU)?;
    if rank < basis.len() {
        return Err(Error::DependentBasis {
            rank,
            size: basis.len(),
        });
    }
    let q = orthonormalize(&normalized)?;
    let project_out = |v: Vector| -> Result<Vec<Complex64>> {
        let mut r = v;
        // Two passes keep the projection accurate for ill-conditioned bases.
        for _ in 0..2 {
            for qj in &q {
                let c = qj.inner(&r)?;
                r = r.add_scaled(-c, qj)?;
            }
        }
        Ok(r.into_coords())
    };
    let c = -alpha;
    let mut invariance = Vec::with_capacity(q.len());
    let mut corollary = Vec::with_capacity(q.len());
    for qj in &q {
        invariance.push(project_out(problem.apply_perturbed(alpha, qj)?)?);
        let tq = project_out(problem.op.apply(qj)?)?;
        let fq = project_out(problem.pert.apply(qj)?)?;
        corollary.push(tq.iter().zip(&fq).map(|(t, f)| t - c * f).collect());
    }
    Ok(HalfspaceCertificate {
        alpha,
        c,
        basis_size: basis.len(),
        independence_rank: rank,
        invariance_residual: spectral_norm_of_columns(&invariance),
        corollary_residual: spectral_norm_of_columns(&corollary),
    })
}

/// Modified Gram–Schmidt with one reorthogonalisation pass.
fn orthonormalize(vs: &[Vector]) -> Result<Vec<Vector>> {
    let mut q: Vec<Vector> = Vec::with_capacity(vs.len());
    for v in vs {
        let mut w = v.clone();
        for _ in 0..2 {
            for qj in &q {
                let c = qj.inner(&w)?;
                w = w.add_scaled(-c, qj)?;
            }
        }
        let n = w.normalized().ok_or(Error::DependentBasis {
            rank: q.len(),
            size: vs.len(),
        })?;
        q.push(n);
    }
    Ok(q)
}
