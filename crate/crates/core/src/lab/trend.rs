use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::numkernel::dense_eigenvalues;
use crate::operators::RankOneProblem;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TrendPoint {
    pub dim: usize,
    pub spectral_radius: f64,
}

/// Spectral radius of the dense `T + αF` at each truncation in `dims`.
///
/// `build` produces the problem at a given dimension.
pub fn quasinilpotency_trend<B>(build: B, alpha: Complex64, dims: &[usize]) -> Result<Vec<TrendPoint>>
where
    B: Fn(usize) -> Result<RankOneProblem> + Sync,
{
    if dims.is_empty() || dims.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::InvalidArgument(
            "trend dimensions must be non-empty and increasing".into(),
        ));
    }
    dims.par_iter()
        .map(|&dim| {
            let eigs = dense_eigenvalues(&build(dim)?.materialize(alpha)?)?;
            let spectral_radius = eigs.iter().map(|z| z.norm()).fold(0.0, f64::max);
            Ok(TrendPoint { dim, spectral_radius })
        })
        .collect()
}
