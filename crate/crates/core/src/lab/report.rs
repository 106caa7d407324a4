use num_complex::Complex64;

use crate::error::Result;
use crate::numkernel::dense_eigenvalues;
use crate::operators::RankOneProblem;
use crate::resolvent::g_solve_accurate;
use crate::rootfinder::{compare_points, find_roots, Annulus, RootFinderOptions, RootSet};

use super::eigenpair::{certify_eigenpair, EigenPair};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ReportOptions {
    pub roots: RootFinderOptions,
    /// A root and an oracle eigenvalue match within `match_rel · max(1, |λ|)`.
    pub match_rel: f64,
    /// Oracle eigenvalues must satisfy `|g(λ) − 1/α| < converse_rel · max(1, |1/α|)`.
    pub converse_rel: f64,
    /// Only roots and eigenvalues with modulus above this radius are
    /// cross-checked; `None` means the inner annulus radius.
    pub check_radius: Option<f64>,
}

impl Default for ReportOptions {
    fn default() -> Self {
        Self {
            roots: RootFinderOptions::default(),
            match_rel: 1e-6,
            converse_rel: 1e-6,
            check_radius: None,
        }
    }
}

/// One root ↔ oracle eigenvalue pairing.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Match {
    pub root: Complex64,
    pub eigenvalue: Complex64,
    pub distance: f64,
}

/// `|g(λ) − 1/α|` at an oracle eigenvalue.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OracleCheck {
    pub eigenvalue: Complex64,
    pub g_residual: f64,
    pub ok: bool,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SpectralReport {
    pub alpha: Complex64,
    pub check_radius: f64,
    pub root_set: RootSet,
    pub eigenpairs: Vec<EigenPair>,
    /// All oracle eigenvalues, sorted by modulus (descending) then argument.
    pub oracle_eigs: Vec<Complex64>,
    pub matching: Vec<Match>,
    /// Oracle eigenvalues inside the annulus and above the check radius with no root.
    pub unmatched_oracle_eigs: Vec<Complex64>,
    /// Roots above the check radius with no oracle eigenvalue.
    pub unmatched_roots: Vec<Complex64>,
    /// Oracle eigenvalues at or beyond the outer radius; no roots were sought there.
    pub beyond_annulus: Vec<Complex64>,
    pub oracle_checks: Vec<OracleCheck>,
}

impl SpectralReport {
    /// Human-readable list of everything that breaks the eigenvalue ↔ root
    /// correspondence.
    pub fn violations(&self) -> Vec<String> {
        let mut v = Vec::new();
        for p in &self.eigenpairs {
            if !p.accepted() {
                v.push(format!(
                    "eigenpair at {} not accepted (residual {:.3e})",
                    p.lambda, p.relative_residual
                ));
            }
            if !p.norm_bound_ok {
                v.push(format!("norm bound fails at {}", p.lambda));
            }
        }
        for z in &self.unmatched_oracle_eigs {
            v.push(format!("oracle eigenvalue {z} has no matching root"));
        }
        for z in &self.unmatched_roots {
            v.push(format!("root {z} has no matching oracle eigenvalue"));
        }
        for c in self.oracle_checks.iter().filter(|c| !c.ok) {
            v.push(format!(
                "oracle eigenvalue {} has |g - 1/alpha| = {:.3e}",
                c.eigenvalue, c.g_residual
            ));
        }
        v
    }
}

/// Roots of `g = 1/α` in the annulus, their eigenpairs, and a two-way
/// comparison with the dense eigenvalues of `oracle` (the same data at the
/// oracle truncation).
pub fn spectral_report(
    problem: &RankOneProblem,
    alpha: Complex64,
    annulus: &Annulus,
    oracle: &RankOneProblem,
    opts: &ReportOptions,
) -> Result<SpectralReport> {
    let root_set = find_roots(problem, alpha, annulus, &opts.roots)?;
    let eigenpairs = root_set
        .roots
        .iter()
        .map(|r| certify_eigenpair(problem, alpha, r.z))
        .collect::<Result<Vec<_>>>()?;
    let mut oracle_eigs = dense_eigenvalues(&oracle.materialize(alpha)?)?;
    oracle_eigs.sort_by(|a, b| compare_points(*a, *b));

    let check_radius = opts.check_radius.unwrap_or(root_set.annulus.r_min);
    let r_max = root_set.annulus.r_max;
    let checked: Vec<Complex64> = oracle_eigs
        .iter()
        .copied()
        .filter(|z| z.norm() > check_radius && z.norm() < r_max)
        .collect();
    let beyond_annulus: Vec<Complex64> = oracle_eigs.iter().copied().filter(|z| z.norm() >= r_max).collect();
    let roots: Vec<Complex64> = root_set
        .roots
        .iter()
        .filter(|r| r.z.norm() > check_radius)
        .flat_map(|r| std::iter::repeat_n(r.z, r.multiplicity))
        .collect();

    let tol = |z: Complex64| opts.match_rel * z.norm().max(1.0);
    let mut candidates: Vec<(f64, usize, usize)> = Vec::new();
    for (i, r) in roots.iter().enumerate() {
        for (j, e) in checked.iter().enumerate() {
            let d = (r - e).norm();
            if d <= tol(*e) {
                candidates.push((d, i, j));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
    let mut root_used = vec![false; roots.len()];
    let mut eig_used = vec![false; checked.len()];
    let mut matching = Vec::new();
    for (d, i, j) in candidates {
        if !root_used[i] && !eig_used[j] {
            root_used[i] = true;
            eig_used[j] = true;
            matching.push(Match {
                root: roots[i],
                eigenvalue: checked[j],
                distance: d,
            });
        }
    }
    matching.sort_by(|a, b| compare_points(a.root, b.root));
    let unmatched_oracle_eigs = checked
        .iter()
        .zip(&eig_used)
        .filter(|(_, u)| !**u)
        .map(|(z, _)| *z)
        .collect();
    let unmatched_roots = roots
        .iter()
        .zip(&root_used)
        .filter(|(_, u)| !**u)
        .map(|(z, _)| *z)
        .collect();

    let target = alpha.inv();
    let scale = target.norm().max(1.0);
    let oracle_checks = checked
        .iter()
        .map(|&z| {
            let g_residual = (g_solve_accurate(z, oracle)? - target).norm();
            Ok(OracleCheck {
                eigenvalue: z,
                g_residual,
                ok: g_residual < opts.converse_rel * scale,
            })
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(SpectralReport {
        alpha,
        check_radius,
        root_set,
        eigenpairs,
        oracle_eigs,
        matching,
        unmatched_oracle_eigs,
        unmatched_roots,
        beyond_annulus,
        oracle_checks,
    })
}
