use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::Result;
use crate::moments::Classification;
use crate::operators::RankOneProblem;
use crate::rootfinder::{find_roots, Annulus, RootFinderOptions, RootSet};

/// Root counts over a grid of α values.
#[derive(Clone, Debug, PartialEq)]
pub struct AlphaScan {
    pub grid: Vec<Complex64>,
    pub classification: Classification,
    /// One root set per grid entry, in grid order.
    pub root_sets: Vec<RootSet>,
    /// α values with no root in the annulus while the moments persist.
    pub exceptional_candidates: Vec<Complex64>,
    /// Set when there are more than two candidates: at most two α can lack
    /// an invariant half-space, so the extra ones are artefacts of the
    /// search region or truncation.
    pub note: Option<String>,
    /// α values whose count exceeds the pole-order bound `k + 1`.
    pub bound_violations: Vec<Complex64>,
}

impl AlphaScan {
    pub fn counts(&self) -> Vec<usize> {
        self.root_sets.iter().map(RootSet::count).collect()
    }
}

pub fn alpha_scan(
    problem: &RankOneProblem,
    classification: &Classification,
    grid: &[Complex64],
    annulus: &Annulus,
    opts: &RootFinderOptions,
) -> Result<AlphaScan> {
    let root_sets = grid
        .par_iter()
        .map(|&a| find_roots(problem, a, annulus, opts))
        .collect::<Result<Vec<_>>>()?;
    let exceptional_candidates: Vec<Complex64> = if classification.is_persistent() {
        grid.iter()
            .zip(&root_sets)
            .filter(|(_, s)| s.count() == 0)
            .map(|(a, _)| *a)
            .collect()
    } else {
        Vec::new()
    };
    let note = (exceptional_candidates.len() > 2).then(|| {
        format!(
            "{} zero-count values; at most two exceptions are possible, so some are outside-the-annulus or truncation effects",
            exceptional_candidates.len()
        )
    });
    let bound_violations = match classification.eig_count_bound() {
        Some(bound) => grid
            .iter()
            .zip(&root_sets)
            .filter(|(_, s)| s.count() > bound)
            .map(|(a, _)| *a)
            .collect(),
        None => Vec::new(),
    };
    Ok(AlphaScan {
        grid: grid.to_vec(),
        classification: *classification,
        root_sets,
        exceptional_candidates,
        note,
        bound_violations,
    })
}
