mod common;

use common::{c, cases, example};
use proptest::prelude::*;
use quasispec_core::moments::{compute_moments, default_horizon};
use quasispec_core::resolvent::{g_prime, g_series, g_solve, g_solve_accurate, standard_grid};

#[test]
fn closed_form_on_the_standard_grid() {
    let p = example(400);
    let ms = compute_moments(&p.op, p.e_star(), p.f(), 200).unwrap();
    let mut worst: f64 = 0.0;
    for z in standard_grid(0.2, 5.0) {
        let exact = z.inv().exp() - 1.0;
        let solved = g_solve(z, &p).unwrap().value;
        worst = worst.max((solved - exact).norm());
        let series = g_series(z, &ms).unwrap();
        let bound = series.tail_bound.unwrap() + 1e-12 * exact.norm().max(1.0);
        assert!((series.value - exact).norm() <= bound, "series at {z}");
    }
    assert!(worst < 1e-10, "worst {worst:e}");
}

#[test]
fn two_routes_agree_on_every_reference_problem() {
    for case in cases() {
        let p = &case.problem;
        let ms = compute_moments(&p.op, p.e_star(), p.f(), default_horizon(p.dim())).unwrap();
        for z in standard_grid(0.2, 5.0) {
            let Ok(series) = g_series(z, &ms) else { continue };
            let tail = series.tail_bound.unwrap();
            if tail >= 1e-6 {
                continue;
            }
            let solved = g_solve(z, p).unwrap().value;
            let scale = solved.norm().max(1.0);
            assert!(
                (series.value - solved).norm() <= tail + 1e-10 * scale,
                "{} at {z}",
                case.name
            );
        }
    }
}

/// Central-difference error of `g'` at step `h`, with `g` evaluated in
/// double-double so rounding does not mask the `h²` term.
fn fd_error(p: &quasispec_core::RankOneProblem, z: quasispec_core::Complex64, h: f64) -> f64 {
    let d = (g_solve_accurate(z + h, p).unwrap() - g_solve_accurate(z - h, p).unwrap()) / (2.0 * h);
    (g_prime(z, p).unwrap() - d).norm()
}

#[test]
fn derivative_matches_central_differences_to_second_order() {
    for case in cases() {
        if case.name == "all_zero" {
            continue;
        }
        for z in [c(0.8, 0.6), c(-1.1, 0.4), c(0.3, -1.4)] {
            let ratio = fd_error(&case.problem, z, 1e-4) / fd_error(&case.problem, z, 1e-5);
            assert!((50.0..=200.0).contains(&ratio), "{} at {z}: ratio {ratio}", case.name);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn accurate_and_plain_solves_agree(r in 0.2f64..5.0, t in 0.0f64..std::f64::consts::TAU) {
        let p = example(400);
        let z = quasispec_core::Complex64::from_polar(r, t);
        let plain = g_solve(z, &p).unwrap().value;
        let acc = g_solve_accurate(z, &p).unwrap();
        prop_assert!((plain - acc).norm() <= 1e-10 * acc.norm().max(1.0));
    }
}
