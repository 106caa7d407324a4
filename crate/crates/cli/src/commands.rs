//! Command dispatch: each command maps onto one family of library operations
//! and produces a [`Report`].

use num_complex::Complex64;
use serde_json::{json, Value};

use quasispec_core::lab::{EigenPair, ReportOptions, TrendPoint};
use quasispec_core::moments::{
    classify_structural, compute_moments_with_tau, Classification, MomentSequence, SingularityClass,
};
use quasispec_core::rootfinder::{find_roots, Annulus, Root, RootFinderOptions, RootSet};
use quasispec_core::{
    alpha_scan, certify_eigenpair, halfspace_certificate, halfspace_certificate_for_basis, quasinilpotency_trend,
    spectral_report, Error, HalfspaceCertificate, RankOneProblem, SpectralReport, Vector,
};

use crate::emit::{complex_json, format_float, to_canonical_json, to_csv};
use crate::error::CliError;
use crate::scenario::{check_alpha, check_annulus, AnnulusSpec, ComplexSpec, Scenario};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq, clap::ValueEnum)]
pub enum Command {
    /// Moments and singularity classification.
    Classify,
    /// Roots of g(z) = 1/alpha in the annulus, for each alpha.
    Roots,
    /// Root counts over the alpha grid, with exceptional-value candidates.
    Sweep,
    /// Roots, eigenpairs and cross-validation against the dense oracle.
    Validate,
    /// Invariant-subspace certificates for eigenvector spans.
    Certify,
    /// Spectral radius of the dense truncations.
    Trend,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Roots => "roots",
            Command::Sweep => "sweep",
            Command::Validate => "validate",
            Command::Certify => "certify",
            Command::Trend => "trend",
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    #[default]
    Json,
    Csv,
}

/// Command-line overrides applied to the scenario before running.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct RunOptions {
    pub alpha: Option<Complex64>,
    pub annulus: Option<(f64, f64)>,
    /// Root indices (0-based, in root-set order) for `certify`.
    pub subset: Option<Vec<usize>>,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub command: Command,
    /// The scenario as run, overrides included.
    pub scenario: Scenario,
    pub classification: Classification,
    pub results: Value,
    pub violations: Vec<String>,
    /// `(α, root)` in root-set order, for CSV output.
    pub root_rows: Vec<(Complex64, Root)>,
    pub trend: Vec<(Complex64, Vec<TrendPoint>)>,
}

impl Report {
    /// 0 on success, 2 when any invariant is violated.
    pub fn exit_code(&self) -> i32 {
        if self.violations.is_empty() {
            0
        } else {
            2
        }
    }

    pub fn to_json(&self) -> Value {
        json!({
            "schema_version": SCHEMA_VERSION,
            "command": self.command.name(),
            "scenario": serde_json::to_value(&self.scenario).expect("scenario serialises"),
            "classification": classification_json(&self.classification),
            "results": self.results,
            "violations": self.violations,
        })
    }
}

/// Applies overrides and runs `command`.
pub fn run(command: Command, scenario: &Scenario, opts: &RunOptions) -> Result<Report, CliError> {
    let mut scenario = scenario.clone();
    if let Some(a) = opts.alpha {
        check_alpha(a, "--alpha")?;
        scenario.alphas = vec![ComplexSpec::from(a)];
    }
    if let Some((r_min, r_max)) = opts.annulus {
        let a = AnnulusSpec { r_min, r_max };
        check_annulus(a, "--annulus")?;
        scenario.annulus = Some(a);
    }
    scenario.validate()?;

    let problem = scenario.problem()?;
    let (moments, classification) = classify_problem(&scenario, &problem)?;
    let mut ctx = Context {
        scenario: &scenario,
        problem: &problem,
        classification,
        violations: Vec::new(),
    };
    let mut root_rows = Vec::new();
    let mut trend = Vec::new();
    let results = match command {
        Command::Classify => json!({
            "horizon": moments.horizon(),
            "moment_tau": moments.tau(),
            "moments": moments.values().into_iter().map(complex_json).collect::<Vec<_>>(),
        }),
        Command::Roots => ctx.roots(&mut root_rows)?,
        Command::Sweep => ctx.sweep(&mut root_rows)?,
        Command::Validate => ctx.validate(&mut root_rows)?,
        Command::Certify => ctx.certify(opts.subset.as_deref(), &mut root_rows)?,
        Command::Trend => ctx.trend(&mut trend)?,
    };
    let violations = ctx.violations;
    Ok(Report {
        command,
        scenario,
        classification,
        results,
        violations,
        root_rows,
        trend,
    })
}

fn classify_problem(scenario: &Scenario, p: &RankOneProblem) -> Result<(MomentSequence, Classification), CliError> {
    let ms = compute_moments_with_tau(&p.op, p.e_star(), p.f(), scenario.horizon(), scenario.moment_tau())
        .map_err(|e| CliError::module("moments", e))?;
    let c = classify_structural(p.e_star(), p.f(), &ms);
    Ok((ms, c))
}

struct Context<'a> {
    scenario: &'a Scenario,
    problem: &'a RankOneProblem,
    classification: Classification,
    violations: Vec<String>,
}

impl Context<'_> {
    fn annulus(&self) -> Result<Annulus, CliError> {
        self.scenario.annulus_for(self.problem)
    }

    fn find(&self, alpha: Complex64, annulus: &Annulus) -> Result<RootSet, CliError> {
        find_roots(self.problem, alpha, annulus, &RootFinderOptions::default())
            .map_err(|e| CliError::module("rootfinder", e))
    }

    fn check_bound(&mut self, set: &RootSet) {
        if let Some(bound) = self.classification.eig_count_bound() {
            if set.count() > bound {
                self.violations.push(format!(
                    "alpha {}: {} roots exceed the bound {bound} for a pole of order {}",
                    fmt_complex(set.alpha),
                    set.count(),
                    bound
                ));
            }
        }
    }

    fn roots(&mut self, rows: &mut Vec<(Complex64, Root)>) -> Result<Value, CliError> {
        let annulus = self.annulus()?;
        let sets = self
            .scenario
            .alpha_values()
            .into_iter()
            .map(|a| self.find(a, &annulus))
            .collect::<Result<Vec<_>, _>>()?;
        let mut out = Vec::new();
        for set in &sets {
            self.check_bound(set);
            rows.extend(set.roots.iter().map(|r| (set.alpha, *r)));
            out.push(root_set_json(set));
        }
        Ok(Value::Array(out))
    }

    fn sweep(&mut self, rows: &mut Vec<(Complex64, Root)>) -> Result<Value, CliError> {
        let annulus = self.annulus()?;
        let scan = alpha_scan(
            self.problem,
            &self.classification,
            &self.scenario.alpha_values(),
            &annulus,
            &RootFinderOptions::default(),
        )
        .map_err(|e| CliError::module("perturb_lab", e))?;
        for set in &scan.root_sets {
            rows.extend(set.roots.iter().map(|r| (set.alpha, *r)));
        }
        for a in &scan.bound_violations {
            self.violations.push(format!(
                "alpha {}: root count exceeds the pole-order bound",
                fmt_complex(*a)
            ));
        }
        Ok(json!({
            "grid": scan.grid.iter().copied().map(complex_json).collect::<Vec<_>>(),
            "counts": scan.counts(),
            "exceptional_candidates": scan.exceptional_candidates.iter().copied().map(complex_json).collect::<Vec<_>>(),
            "note": scan.note,
            "bound_violations": scan.bound_violations.iter().copied().map(complex_json).collect::<Vec<_>>(),
            "root_sets": scan.root_sets.iter().map(root_set_json).collect::<Vec<_>>(),
        }))
    }

    fn validate(&mut self, rows: &mut Vec<(Complex64, Root)>) -> Result<Value, CliError> {
        let annulus = self.annulus()?;
        let oracle_dim = self.scenario.oracle_dim();
        let oracle = if oracle_dim == self.problem.dim() {
            self.problem.clone()
        } else {
            self.scenario.problem_at(oracle_dim)?
        };
        let tol = self.scenario.tolerances();
        let defaults = ReportOptions::default();
        let opts = ReportOptions {
            match_rel: tol.match_rel.unwrap_or(defaults.match_rel),
            check_radius: tol.check_radius,
            ..defaults
        };
        let mut out = Vec::new();
        for alpha in self.scenario.alpha_values() {
            let report = spectral_report(self.problem, alpha, &annulus, &oracle, &opts)
                .map_err(|e| CliError::module("perturb_lab", e))?;
            self.check_bound(&report.root_set);
            for v in report.violations() {
                self.violations.push(format!("alpha {}: {v}", fmt_complex(alpha)));
            }
            rows.extend(report.root_set.roots.iter().map(|r| (alpha, *r)));
            out.push(spectral_report_json(&report, oracle_dim));
        }
        Ok(Value::Array(out))
    }

    fn certify(&mut self, subset: Option<&[usize]>, rows: &mut Vec<(Complex64, Root)>) -> Result<Value, CliError> {
        let annulus = self.annulus()?;
        let mut out = Vec::new();
        for alpha in self.scenario.alpha_values() {
            let set = self.find(alpha, &annulus)?;
            rows.extend(set.roots.iter().map(|r| (alpha, *r)));
            let pairs = set
                .roots
                .iter()
                .map(|r| certify_eigenpair(self.problem, alpha, r.z))
                .collect::<Result<Vec<_>, _>>()
                .map_err(|e| CliError::module("perturb_lab", e))?;
            let indices: Vec<usize> = match subset {
                Some(s) => {
                    if let Some(bad) = s.iter().find(|&&i| i >= pairs.len()) {
                        return Err(CliError::Usage(format!(
                            "--subset index {bad} out of range: alpha {} has {} roots",
                            fmt_complex(alpha),
                            pairs.len()
                        )));
                    }
                    s.to_vec()
                }
                None => (0..pairs.len()).collect(),
            };
            for p in indices.iter().map(|&i| &pairs[i]).filter(|p| !p.accepted()) {
                self.violations.push(format!(
                    "alpha {}: eigenpair at {} not accepted (residual {})",
                    fmt_complex(alpha),
                    fmt_complex(p.lambda),
                    format_float(p.relative_residual)
                ));
            }
            let selected: Vec<EigenPair> = indices.iter().map(|&i| pairs[i].clone()).collect();
            let certificate = if selected.is_empty() {
                Value::Null
            } else {
                self.certificate_json(alpha, halfspace_certificate(self.problem, alpha, &selected))?
            };
            let mut entry = json!({
                "alpha": complex_json(alpha),
                "roots": set.roots.iter().map(root_json).collect::<Vec<_>>(),
                "eigenpairs": pairs.iter().map(eigenpair_json).collect::<Vec<_>>(),
                "subset": indices,
                "certificate": certificate,
            });
            if self.classification.class == SingularityClass::AllZero {
                let orbit = self.orbit_certificate(alpha)?;
                entry["orbit_certificate"] = orbit;
            }
            out.push(entry);
        }
        Ok(Value::Array(out))
    }

    /// With every moment zero, the orbit span of `f` lies in `ker e*` and is
    /// invariant under `T + αF` for all α.
    fn orbit_certificate(&mut self, alpha: Complex64) -> Result<Value, CliError> {
        let orbit = self
            .problem
            .op
            .scaled_orbit(self.problem.f(), self.problem.dim())
            .map_err(|e| CliError::module("operators", e))?;
        let basis: Vec<Vector> = orbit
            .into_iter()
            .map(|t| t.vector)
            .take_while(|v| !v.is_zero())
            .take(self.problem.dim() - 1)
            .collect();
        if basis.is_empty() {
            return Ok(Value::Null);
        }
        self.certificate_json(alpha, halfspace_certificate_for_basis(self.problem, alpha, &basis))
    }

    fn certificate_json(
        &mut self,
        alpha: Complex64,
        cert: Result<HalfspaceCertificate, Error>,
    ) -> Result<Value, CliError> {
        match cert {
            Ok(c) => Ok(json!({
                "c": complex_json(c.c),
                "basis_size": c.basis_size,
                "independence_rank": c.independence_rank,
                "invariance_residual": c.invariance_residual,
                "corollary_residual": c.corollary_residual,
            })),
            Err(e @ (Error::DependentBasis { .. } | Error::NotAnEigenvalue { .. })) => {
                self.violations.push(format!("alpha {}: {e}", fmt_complex(alpha)));
                Ok(Value::Null)
            }
            Err(e) => Err(CliError::module("perturb_lab", e)),
        }
    }

    fn trend(&mut self, trend: &mut Vec<(Complex64, Vec<TrendPoint>)>) -> Result<Value, CliError> {
        let dims = self.scenario.trend_dims();
        let scenario = self.scenario;
        let mut out = Vec::new();
        for alpha in scenario.alpha_values() {
            let points = quasinilpotency_trend(
                |d| {
                    scenario
                        .problem_at(d)
                        .map_err(|e| Error::InvalidArgument(e.to_string()))
                },
                alpha,
                &dims,
            )
            .map_err(|e| CliError::module("perturb_lab", e))?;
            out.push(json!({
                "alpha": complex_json(alpha),
                "points": points.iter().map(|p| json!({ "dim": p.dim, "spectral_radius": p.spectral_radius })).collect::<Vec<_>>(),
            }));
            trend.push((alpha, points));
        }
        Ok(Value::Array(out))
    }
}

fn fmt_complex(z: Complex64) -> String {
    format!("{}{:+}i", z.re, z.im)
}

fn classification_json(c: &Classification) -> Value {
    json!({
        "tag": c.tag(),
        "horizon": c.horizon,
        "exact": c.exact,
        "last_nonzero": c.last_nonzero(),
        "pole_order": c.pole_order(),
        "eig_count_bound": c.eig_count_bound(),
    })
}

fn annulus_json(a: &Annulus) -> Value {
    json!({ "r_min": a.r_min, "r_max": a.r_max })
}

fn root_json(r: &Root) -> Value {
    json!({ "re": r.z.re, "im": r.z.im, "multiplicity": r.multiplicity, "residual": r.residual })
}

fn root_set_json(s: &RootSet) -> Value {
    json!({
        "alpha": complex_json(s.alpha),
        "annulus": annulus_json(&s.annulus),
        "total_winding": s.total_winding,
        "count": s.count(),
        "roots": s.roots.iter().map(root_json).collect::<Vec<_>>(),
    })
}

fn eigenpair_json(p: &EigenPair) -> Value {
    json!({
        "lambda": complex_json(p.lambda),
        "relative_residual": p.relative_residual,
        "resolvent_residual": p.resolvent_residual,
        "norm_bound_ok": p.norm_bound_ok,
        "accepted": p.accepted(),
    })
}

fn spectral_report_json(r: &SpectralReport, oracle_dim: usize) -> Value {
    let list = |v: &[Complex64]| v.iter().copied().map(complex_json).collect::<Vec<_>>();
    json!({
        "alpha": complex_json(r.alpha),
        "annulus": annulus_json(&r.root_set.annulus),
        "check_radius": r.check_radius,
        "oracle_dim": oracle_dim,
        "total_winding": r.root_set.total_winding,
        "roots": r.root_set.roots.iter().map(root_json).collect::<Vec<_>>(),
        "eigenpairs": r.eigenpairs.iter().map(eigenpair_json).collect::<Vec<_>>(),
        "oracle_eigs": list(&r.oracle_eigs),
        "matching": r.matching.iter().map(|m| json!({
            "root": complex_json(m.root),
            "eigenvalue": complex_json(m.eigenvalue),
            "distance": m.distance,
        })).collect::<Vec<_>>(),
        "unmatched_oracle_eigs": list(&r.unmatched_oracle_eigs),
        "unmatched_roots": list(&r.unmatched_roots),
        "beyond_annulus": list(&r.beyond_annulus),
        "oracle_checks": r.oracle_checks.iter().map(|c| json!({
            "eigenvalue": complex_json(c.eigenvalue),
            "g_residual": c.g_residual,
            "ok": c.ok,
        })).collect::<Vec<_>>(),
    })
}

pub const ROOTS_CSV_HEADER: [&str; 6] = ["alpha_re", "alpha_im", "root_re", "root_im", "multiplicity", "residual"];
pub const TREND_CSV_HEADER: [&str; 2] = ["dim", "spectral_radius"];

/// Serialises a report. CSV is available for commands that produce root
/// loci (one row per root) and for single-α trends.
pub fn emit(report: &Report, format: Format) -> Result<Vec<u8>, CliError> {
    match format {
        Format::Json => Ok(to_canonical_json(&report.to_json())),
        Format::Csv => match report.command {
            Command::Roots | Command::Sweep | Command::Validate | Command::Certify => {
                let rows: Vec<Vec<String>> = report
                    .root_rows
                    .iter()
                    .map(|(a, r)| {
                        vec![
                            format_float(a.re),
                            format_float(a.im),
                            format_float(r.z.re),
                            format_float(r.z.im),
                            r.multiplicity.to_string(),
                            format_float(r.residual),
                        ]
                    })
                    .collect();
                to_csv(&ROOTS_CSV_HEADER, &rows)
            }
            Command::Trend => {
                if report.trend.len() != 1 {
                    return Err(CliError::Usage(format!(
                        "trend CSV holds one alpha; the run has {} (select one with --alpha)",
                        report.trend.len()
                    )));
                }
                let rows: Vec<Vec<String>> = report.trend[0]
                    .1
                    .iter()
                    .map(|p| vec![p.dim.to_string(), format_float(p.spectral_radius)])
                    .collect();
                to_csv(&TREND_CSV_HEADER, &rows)
            }
            Command::Classify => Err(CliError::Usage("classify has no CSV form; use --format json".into())),
        },
    }
}
