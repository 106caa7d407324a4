use num_complex::Complex64;

use crate::error::{check_dim, Error, Result};
use crate::numkernel::{dense_eigenvalues, numerical_rank, DenseMatrix, Vector, DEFAULT_RANK_TAU};
use crate::operators::{Functional, OperatorModel, RankOnePerturbation};

const NILPOTENCY_TOL: f64 = 1e-14;

/// `S = (I − N)T(I + N)` for a square-zero rank-one `N = e* ⊗ u`.
#[derive(Clone, Debug, PartialEq)]
pub struct SimilarityPerturbation {
    pub n_op: RankOnePerturbation,
    pub s: DenseMatrix,
    /// Numerical rank of `mat(T) − S`.
    pub rank_of_difference: usize,
    pub eigs_t: Vec<Complex64>,
    pub eigs_s: Vec<Complex64>,
    /// Greedy multiset distance between the two spectra.
    pub eig_distance: f64,
}

pub fn rank_two_similarity(t: &OperatorModel, e_star: &Functional, u: &Vector) -> Result<SimilarityPerturbation> {
    check_dim(t.dim(), e_star.dim())?;
    check_dim(t.dim(), u.dim())?;
    let pairing = e_star.apply(u)?.norm();
    if pairing > NILPOTENCY_TOL * e_star.norm() * u.norm() {
        return Err(Error::NotNilpotent(pairing));
    }
    let n_op = RankOnePerturbation::new(e_star.clone(), u.clone())?;
    let dim = t.dim();
    let m = t.matrix();
    let mut left = DenseMatrix::identity(dim);
    left.add_outer(Complex64::new(-1.0, 0.0), u.coords(), e_star.coords())?;
    let mut right = DenseMatrix::identity(dim);
    right.add_outer(Complex64::new(1.0, 0.0), u.coords(), e_star.coords())?;
    let s = left.matmul(&m)?.matmul(&right)?;
    let rank_of_difference = numerical_rank(&m.sub(&s)?, DEFAULT_RANK_TAU);
    let eigs_t = dense_eigenvalues(&m)?;
    let eigs_s = dense_eigenvalues(&s)?;
    let eig_distance = multiset_distance(&eigs_t, &eigs_s);
    Ok(SimilarityPerturbation {
        n_op,
        s,
        rank_of_difference,
        eigs_t,
        eigs_s,
        eig_distance,
    })
}

/// Largest distance in a greedy nearest-neighbour pairing of two multisets
/// of equal size.
pub(crate) fn multiset_distance(a: &[Complex64], b: &[Complex64]) -> f64 {
    let mut used = vec![false; b.len()];
    let mut worst: f64 = 0.0;
    for x in a {
        let (j, d) = b
            .iter()
            .enumerate()
            .filter(|(j, _)| !used[*j])
            .map(|(j, y)| (j, (x - y).norm()))
            .min_by(|p, q| p.1.total_cmp(&q.1))
            .unwrap_or((usize::MAX, f64::INFINITY));
        if j != usize::MAX {
            used[j] = true;
        }
        worst = worst.max(d);
    }
    worst
}
