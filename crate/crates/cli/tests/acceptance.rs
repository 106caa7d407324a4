//! Acceptance criteria, one PASS/FAIL line each. Runs the bundled scenarios
//! through the library and the command layer; exits nonzero on any failure.

use std::f64::consts::{LN_2, TAU};
use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use num_complex::Complex64;

use quasispec::{parse_scenario, run, Command, RunOptions, Scenario};
use quasispec_core::moments::{classify_structural, compute_moments, SingularityClass};
use quasispec_core::numkernel::{dense_eigenvalues, Vector};
use quasispec_core::resolvent::{g_prime, g_series, g_solve, g_solve_accurate, standard_grid};
use quasispec_core::rootfinder::{find_roots, winding_count, Annulus, Contour, RootFinderOptions, RootSet};
use quasispec_core::{
    certify_eigenpair, halfspace_certificate, halfspace_certificate_for_basis, quasinilpotency_trend,
    rank_two_similarity, spectral_report, Functional, OperatorModel, RankOnePerturbation, RankOneProblem,
    ReportOptions,
};

const CLOSED_FORM_TOL: f64 = 1e-10;
const SOLVE_TOL: f64 = 1e-10;
const MOMENT_REL_TOL: f64 = 1e-13;
const MOMENT_COUNT: usize = 20;
const TREND_SLACK: f64 = 1.10;
const TREND_DIMS: [usize; 4] = [25, 50, 100, 200];
const ROOT_TOL: f64 = 1e-9;
const EIGENPAIR_RESIDUAL: f64 = 1e-8;
const CUBE_ROOT_TOL: f64 = 1e-10;
const NILPOTENT_TOL: f64 = 1e-10;
const MATCH_REL: f64 = 1e-6;
const CHECK_RADIUS: f64 = 0.1;
const CERT_TOL: f64 = 1e-6;
const EXPLICIT_BASIS_TOL: f64 = 1e-14;
const SIMILARITY_DIM: usize = 50;
const FD_RATIO: (f64, f64) = (50.0, 200.0);
const FD_STEPS: (f64, f64) = (1e-4, 1e-5);
const COVARIANCE_TOL: f64 = 1e-10;

const BUNDLED: [&str; 5] = ["example_2_4", "pole_k2", "all_zero", "volterra_default", "dense_seeded"];

type Outcome = Result<String, String>;
type Criterion = (&'static str, &'static str, fn() -> Outcome);

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn scenario(name: &str) -> Scenario {
    let path = PathBuf::from(env!("CARGO_MANIFEST_DIR"))
        .join("scenarios")
        .join(format!("{name}.json"));
    parse_scenario(&std::fs::read(path).expect("bundled scenario")).expect("valid bundled scenario")
}

fn problem(name: &str) -> RankOneProblem {
    scenario(name).problem().expect("bundled problem")
}

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err(e: impl std::fmt::Display) -> String {
    e.to_string()
}

fn roots(p: &RankOneProblem, alpha: Complex64, r_min: f64, r_max: f64) -> Result<RootSet, String> {
    find_roots(
        p,
        alpha,
        &Annulus::new(r_min, r_max).map_err(err)?,
        &RootFinderOptions::default(),
    )
    .map_err(err)
}

fn example_root(k: i32) -> Complex64 {
    c(LN_2, TAU * f64::from(k)).inv()
}

fn ac1_closed_form() -> Outcome {
    let p = problem("example_2_4");
    let ms = compute_moments(&p.op, p.e_star(), p.f(), scenario("example_2_4").horizon()).map_err(err)?;
    let mut max_err = 0.0f64;
    let mut max_excess = f64::NEG_INFINITY;
    for z in standard_grid(0.2, 5.0) {
        let exact = z.inv().exp() - 1.0;
        let solve = g_solve(z, &p).map_err(err)?.value;
        max_err = max_err.max((solve - exact).norm());
        let series = g_series(z, &ms).map_err(err)?;
        let gap = (series.value - solve).norm();
        let allowed = series.tail_bound.unwrap_or(0.0) + SOLVE_TOL;
        max_excess = max_excess.max(gap - allowed);
    }
    ensure(max_err < CLOSED_FORM_TOL, || {
        format!("max |g_solve − (exp(1/z)−1)| = {max_err:e}")
    })?;
    ensure(max_excess <= 0.0, || {
        format!("series exceeds tail bound by {max_excess:e}")
    })?;
    Ok(format!(
        "max error {max_err:.2e} < {CLOSED_FORM_TOL:e} on 800 points; series within tail bound"
    ))
}

fn ac2_moments() -> Outcome {
    let p = problem("example_2_4");
    let ms = compute_moments(&p.op, p.e_star(), p.f(), MOMENT_COUNT).map_err(err)?;
    let mut factorial = 1.0f64;
    let mut worst = 0.0f64;
    for n in 0..=MOMENT_COUNT {
        factorial *= (n + 1) as f64;
        let expected = 1.0 / factorial;
        worst = worst.max((ms.value(n) - expected).norm() / expected);
    }
    ensure(worst < MOMENT_REL_TOL, || {
        format!("worst relative moment error {worst:e}")
    })?;
    Ok(format!(
        "m_n = 1/(n+1)! for n ≤ {MOMENT_COUNT}, worst relative error {worst:.2e}"
    ))
}

fn ac3_exceptional_value() -> Outcome {
    let p = problem("example_2_4");
    let alpha = c(-1.0, 0.0);
    let w = winding_count(
        &p,
        alpha,
        &Contour::annulus_boundary(0.05, 3.0),
        &RootFinderOptions::default(),
    )
    .map_err(err)?;
    ensure(w == 0, || format!("winding {w} over [0.05, 3]"))?;
    let s = scenario("example_2_4");
    let trend = quasinilpotency_trend(
        |d| {
            s.problem_at(d)
                .map_err(|e| quasispec_core::Error::InvalidArgument(e.to_string()))
        },
        alpha,
        &TREND_DIMS,
    )
    .map_err(err)?;
    let radii: Vec<f64> = trend.iter().map(|t| t.spectral_radius).collect();
    ensure(radii.windows(2).all(|w| w[1] <= TREND_SLACK * w[0]), || {
        format!("trend {radii:?} increases")
    })?;
    Ok(format!(
        "winding 0; spectral radii {}",
        radii.iter().map(|r| format!("{r:.4}")).collect::<Vec<_>>().join(", ")
    ))
}

fn ac4_root_enumeration() -> Outcome {
    let p = problem("example_2_4");
    let alpha = c(1.0, 0.0);
    let set = roots(&p, alpha, 0.05, 2.0)?;
    ensure(set.count() == 7, || format!("{} roots", set.count()))?;
    let z0 = set.roots[0].z;
    ensure((z0 - 1.0 / LN_2).norm() < ROOT_TOL, || format!("z_0 = {z0}"))?;
    let mut worst = 0.0f64;
    for r in &set.roots {
        let pair = certify_eigenpair(&p, alpha, r.z).map_err(err)?;
        ensure(pair.norm_bound_ok, || format!("norm bound fails at {}", r.z))?;
        worst = worst.max(pair.relative_residual);
    }
    ensure(worst < EIGENPAIR_RESIDUAL, || format!("eigenpair residual {worst:e}"))?;
    Ok(format!(
        "7 roots, z_0 = {:.10}, worst eigenpair residual {worst:.2e}, norm bounds hold",
        z0.re
    ))
}

fn ac5_pole() -> Outcome {
    let s = scenario("pole_k2");
    let p = s.problem().map_err(err)?;
    let ms = compute_moments(&p.op, p.e_star(), p.f(), s.horizon()).map_err(err)?;
    let cls = classify_structural(p.e_star(), p.f(), &ms);
    ensure(
        cls.class == SingularityClass::EventuallyZero { last_nonzero: 2 },
        || format!("classified {:?}", cls.class),
    )?;
    let bound = cls.eig_count_bound().unwrap_or(usize::MAX);
    for alpha in [c(1.0, 0.0), c(2.0, 0.0), c(0.0, 1.0)] {
        let set = roots(&p, alpha, 0.5, 1.5)?;
        ensure(set.count() == 3 && set.count() <= bound, || {
            format!("α = {alpha}: {} roots", set.count())
        })?;
        if alpha == c(2.0, 0.0) {
            for k in 0..3 {
                let w = Complex64::from_polar(1.0, TAU * k as f64 / 3.0);
                let d = set.roots.iter().map(|r| (r.z - w).norm()).fold(f64::INFINITY, f64::min);
                ensure(d < CUBE_ROOT_TOL, || format!("cube root {w} missed by {d:e}"))?;
            }
        }
    }
    Ok("EventuallyZero(k=2); 3 roots for α ∈ {1, 2, i}; α = 2 gives the cube roots of unity".into())
}

fn ac6_all_zero() -> Outcome {
    let s = scenario("all_zero");
    let p = s.problem().map_err(err)?;
    let ms = compute_moments(&p.op, p.e_star(), p.f(), s.horizon()).map_err(err)?;
    let cls = classify_structural(p.e_star(), p.f(), &ms);
    ensure(cls.class == SingularityClass::AllZero, || {
        format!("classified {:?}", cls.class)
    })?;
    let mut worst = 0.0f64;
    for alpha in [c(1.0, 0.0), c(-1.0, 0.0), c(2.0, 0.0), c(-2.0, 0.0), c(0.0, 1.0)] {
        let set = roots(&p, alpha, 0.05, 2.0)?;
        ensure(set.count() == 0 && set.total_winding == 0, || {
            format!("α = {alpha}: {} roots", set.count())
        })?;
        let eigs = dense_eigenvalues(&p.materialize(alpha).map_err(err)?).map_err(err)?;
        worst = worst.max(eigs.iter().map(|z| z.norm()).fold(0.0, f64::max));
    }
    ensure(worst < NILPOTENT_TOL, || {
        format!("oracle eigenvalue of modulus {worst:e}")
    })?;
    Ok(format!(
        "AllZero; no roots for α ∈ {{±1, ±2, i}}; max oracle |λ| = {worst:e}"
    ))
}

fn ac7_truncation_equivalence() -> Outcome {
    let p = problem("example_2_4");
    let opts = ReportOptions {
        match_rel: MATCH_REL,
        check_radius: Some(CHECK_RADIUS),
        ..ReportOptions::default()
    };
    let annulus = Annulus::new(0.05, 2.0).map_err(err)?;
    let report = spectral_report(&p, c(1.0, 0.0), &annulus, &p, &opts).map_err(err)?;
    let v = report.violations();
    ensure(v.is_empty(), || v.join("; "))?;
    let worst = report.matching.iter().map(|m| m.distance).fold(0.0, f64::max);
    // The command layer must turn unmatched eigenvalues into exit code 2.
    let alpha_one = RunOptions {
        alpha: Some(c(1.0, 0.0)),
        ..RunOptions::default()
    };
    let ok = run(Command::Validate, &scenario("example_2_4"), &alpha_one).map_err(err)?;
    let mut strict = scenario("example_2_4");
    strict.tolerances.get_or_insert_with(Default::default).match_rel = Some(1e-20);
    let failing = run(Command::Validate, &strict, &alpha_one).map_err(err)?;
    ensure(ok.exit_code() == 0 && failing.exit_code() == 2, || {
        format!("exit codes {} / {}", ok.exit_code(), failing.exit_code())
    })?;
    Ok(format!(
        "{} oracle eigenvalues above {CHECK_RADIUS} matched, worst distance {worst:.2e}; unmatched ⇒ exit 2",
        report.matching.len()
    ))
}

fn ac8_halfspace() -> Outcome {
    let p = problem("example_2_4");
    let alpha = c(1.0, 0.0);
    let set = roots(&p, alpha, 0.05, 2.0)?;
    let pairs = [0, 2, -2]
        .into_iter()
        .map(|k| {
            let target = example_root(k);
            let r = set
                .roots
                .iter()
                .min_by(|a, b| (a.z - target).norm().total_cmp(&(b.z - target).norm()))
                .unwrap();
            ensure((r.z - target).norm() < ROOT_TOL, || format!("z_{k} not found"))?;
            certify_eigenpair(&p, alpha, r.z).map_err(err)
        })
        .collect::<Result<Vec<_>, _>>()?;
    let cert = halfspace_certificate(&p, alpha, &pairs).map_err(err)?;
    ensure(
        cert.invariance_residual < CERT_TOL && cert.corollary_residual < CERT_TOL,
        || {
            format!(
                "residuals {:e} / {:e}",
                cert.invariance_residual, cert.corollary_residual
            )
        },
    )?;
    let z = problem("all_zero");
    let n = z.dim();
    let basis: Vec<Vector> = (1..n).map(|i| Vector::basis(n, i)).collect();
    let mut worst = 0.0f64;
    for alpha in [c(1.0, 0.0), c(2.0, 0.0)] {
        let cert = halfspace_certificate_for_basis(&z, alpha, &basis).map_err(err)?;
        worst = worst.max(cert.invariance_residual).max(cert.corollary_residual);
    }
    ensure(worst < EXPLICIT_BASIS_TOL, || {
        format!("explicit basis residual {worst:e}")
    })?;
    Ok(format!(
        "span{{z_0, z_±2}}: residuals {:.2e} / {:.2e}; explicit basis {worst:e}",
        cert.invariance_residual, cert.corollary_residual
    ))
}

fn ac9_rank_two() -> Outcome {
    let t = OperatorModel::one_over_n_shift(SIMILARITY_DIM).map_err(err)?;
    let s = rank_two_similarity(
        &t,
        &Functional::coordinate(SIMILARITY_DIM, 0),
        &Vector::basis(SIMILARITY_DIM, 1),
    )
    .map_err(err)?;
    ensure(s.rank_of_difference <= 2, || format!("rank {}", s.rank_of_difference))?;
    ensure(s.eigs_s.iter().chain(&s.eigs_t).all(|z| z.norm() == 0.0), || {
        "nonzero eigenvalue".into()
    })?;
    Ok(format!(
        "rank of S − T = {}; both spectra exactly {{0}}",
        s.rank_of_difference
    ))
}

fn two_route_agreement() -> Result<usize, String> {
    let mut checked = 0;
    for name in BUNDLED {
        let s = scenario(name);
        let p = s.problem().map_err(err)?;
        let ms = compute_moments(&p.op, p.e_star(), p.f(), s.horizon()).map_err(err)?;
        let r_max = s.annulus_for(&p).map_err(err)?.r_max;
        for z in standard_grid(r_max, 4.0 * r_max) {
            let series = g_series(z, &ms).map_err(|e| format!("{name} at {z}: {e}"))?;
            let solve = g_solve(z, &p).map_err(err)?.value;
            let allowed = series.tail_bound.unwrap_or(0.0) + SOLVE_TOL * solve.norm().max(1.0);
            ensure((series.value - solve).norm() <= allowed, || {
                format!("{name} at {z}: routes differ")
            })?;
            checked += 1;
        }
    }
    Ok(checked)
}

fn fd_ratio() -> Result<f64, String> {
    let p = problem("example_2_4");
    let z = c(0.7, 0.4);
    let exact = g_prime(z, &p).map_err(err)?;
    let fd_error = |h: f64| -> Result<f64, String> {
        let dz = c(h, 0.0);
        let fd = (g_solve_accurate(z + dz, &p).map_err(err)? - g_solve_accurate(z - dz, &p).map_err(err)?) / (2.0 * h);
        Ok((fd - exact).norm())
    };
    let ratio = fd_error(FD_STEPS.0)? / fd_error(FD_STEPS.1)?;
    ensure((FD_RATIO.0..=FD_RATIO.1).contains(&ratio), || format!("ratio {ratio}"))?;
    Ok(ratio)
}

fn winding_completeness() -> Result<usize, String> {
    let mut runs = 0;
    for name in BUNDLED {
        let s = scenario(name);
        let p = s.problem().map_err(err)?;
        let annulus = s.annulus_for(&p).map_err(err)?;
        for alpha in s.alpha_values() {
            let set = find_roots(&p, alpha, &annulus, &RootFinderOptions::default())
                .map_err(|e| format!("{name}, α = {alpha}: {e}"))?;
            let total: usize = set.roots.iter().map(|r| r.multiplicity).sum();
            let w = winding_count(&p, alpha, &set.annulus.boundary(), &RootFinderOptions::default()).map_err(err)?;
            ensure(total == set.total_winding && w == total as i64, || {
                format!("{name}, α = {alpha}: multiplicities {total}, winding {w}")
            })?;
            runs += 1;
        }
    }
    Ok(runs)
}

fn scaling_covariance() -> Result<f64, String> {
    let p = problem("example_2_4");
    let alpha = c(1.0, 0.0);
    let base = roots(&p, alpha, 0.05, 2.0)?;
    let mut worst = 0.0f64;
    for scale in [c(2.5, 0.0), c(0.0, 1.0), c(-0.3, 0.8)] {
        let pert = RankOnePerturbation::new(p.e_star().scaled(scale), p.f().clone()).map_err(err)?;
        let q = RankOneProblem::new(p.op.clone(), pert).map_err(err)?;
        let scaled = roots(&q, alpha / scale, 0.05, 2.0)?;
        ensure(scaled.count() == base.count(), || {
            format!("c = {scale}: {} roots", scaled.count())
        })?;
        for (a, b) in base.roots.iter().zip(&scaled.roots) {
            worst = worst.max((a.z - b.z).norm());
        }
    }
    ensure(worst < COVARIANCE_TOL, || format!("root sets differ by {worst:e}"))?;
    Ok(worst)
}

fn ac10_properties() -> Outcome {
    let points = two_route_agreement()?;
    let ratio = fd_ratio()?;
    let runs = winding_completeness()?;
    let worst = scaling_covariance()?;
    Ok(format!(
        "two routes agree on {points} points; FD ratio {ratio:.1}; winding complete on {runs} scenario×α runs; \
         scaling covariance {worst:.1e}"
    ))
}

fn main() -> ExitCode {
    let criteria: [Criterion; 10] = [
        ("AC1", "closed form of g", ac1_closed_form),
        ("AC2", "moments", ac2_moments),
        ("AC3", "exceptional value", ac3_exceptional_value),
        ("AC4", "root enumeration", ac4_root_enumeration),
        ("AC5", "pole trichotomy", ac5_pole),
        ("AC6", "invariant-subspace case", ac6_all_zero),
        ("AC7", "truncation equivalence", ac7_truncation_equivalence),
        ("AC8", "half-space certificate", ac8_halfspace),
        ("AC9", "rank-two similarity", ac9_rank_two),
        ("AC10", "property suites", ac10_properties),
    ];
    let mut failures = 0;
    for (id, title, check) in criteria {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("{id} PASS {title}: {detail} [{secs:.2}s]"),
            Err(why) => {
                failures += 1;
                println!("{id} FAIL {title}: {why} [{secs:.2}s]");
            }
        }
    }
    println!("acceptance: {} passed, {failures} failed", criteria.len() - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
