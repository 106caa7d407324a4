//! The scalar resolvent function `g(z) = e*((zI − T)⁻¹ f)` and its derivative.
//!
//! Two independent routes: the Laurent series built from the moments, with a
//! fitted tail bound, and a direct structured solve. The solve is the
//! authority; the series is the cross-check.

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_finite, Error, Result};
use crate::moments::MomentSequence;
use crate::operators::RankOneProblem;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EvalMethod {
    Series,
    Solve,
}

/// One evaluation of `g`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GEval {
    pub z: Complex64,
    pub value: Complex64,
    pub method: EvalMethod,
    /// Bound on the neglected Laurent tail (series route only).
    pub tail_bound: Option<f64>,
}

fn check_shift(z: Complex64) -> Result<()> {
    check_finite(z, "z")?;
    if z == Complex64::new(0.0, 0.0) {
        Err(Error::ZeroShift)
    } else {
        Ok(())
    }
}

/// Partial Laurent sum `Σ_{i≤M} mᵢ / z^{i+1}` with a geometric tail bound.
///
/// The envelope `aᵢ ≥ |mᵢ|/|z|^{i+1}` is fitted on the last quarter of the
/// window by `aᵢ ≤ B qⁱ`, with `q` the largest consecutive ratio there; the
/// tail is bounded by `B q^{M+1}/(1 − q)`. Super-geometric decay makes this
/// conservative.
pub fn g_series(z: Complex64, ms: &MomentSequence) -> Result<GEval> {
    check_shift(z)?;
    let ln_r = z.norm().ln();
    let theta = z.arg();
    let m = ms.horizon();
    let mut value = Complex64::new(0.0, 0.0);
    for i in 0..=m {
        let (mantissa, log_scale) = ms.scaled_term(i);
        if mantissa == Complex64::new(0.0, 0.0) {
            continue;
        }
        let k = (i + 1) as f64;
        let mag = (log_scale - k * ln_r).exp();
        value += mantissa * Complex64::from_polar(mag, -k * theta);
    }
    check_finite(value, "Laurent series")?;
    let tail = tail_bound(ms, ln_r).ok_or(Error::TailNotConvergent {
        modulus: z.norm(),
        horizon: m,
    })?;
    Ok(GEval {
        z,
        value,
        method: EvalMethod::Series,
        tail_bound: Some(tail),
    })
}

fn tail_bound(ms: &MomentSequence, ln_r: f64) -> Option<f64> {
    let m = ms.horizon();
    let a = |i: usize| ms.envelope_ln(i) - (i + 1) as f64 * ln_r;
    let lo = (m - m / 4).min(m.saturating_sub(1));
    // An exactly vanishing last term means the orbit (or the raw data) has
    // terminated: nothing is neglected.
    if ms.envelope_ln(m) == f64::NEG_INFINITY {
        return Some(0.0);
    }
    let window: Vec<(usize, f64)> = (lo..=m).map(|i| (i, a(i))).collect();
    let q_ln = window
        .windows(2)
        .filter(|p| p[0].1.is_finite() && p[1].1.is_finite())
        .map(|p| p[1].1 - p[0].1)
        .fold(f64::NEG_INFINITY, f64::max);
    if !q_ln.is_finite() || q_ln >= 0.0 {
        return None;
    }
    let b_ln = window
        .iter()
        .filter(|(_, v)| v.is_finite())
        .map(|(i, v)| v - *i as f64 * q_ln)
        .fold(f64::NEG_INFINITY, f64::max);
    let q = q_ln.exp();
    Some((b_ln + (m + 1) as f64 * q_ln).exp() / (1.0 - q))
}

/// `g(z)` through the structured solve `(zI − T)y = f`.
pub fn g_solve(z: Complex64, problem: &RankOneProblem) -> Result<GEval> {
    check_shift(z)?;
    let y = problem.op.resolvent_apply(z, problem.f())?;
    let value = problem.e_star().apply(&y)?;
    check_finite(value, "g")?;
    Ok(GEval {
        z,
        value,
        method: EvalMethod::Solve,
        tail_bound: None,
    })
}

/// `g(z)` through the same solve in double-double arithmetic, accurate well
/// below the cancellation floor of the plain solve.
pub fn g_solve_accurate(z: Complex64, problem: &RankOneProblem) -> Result<Complex64> {
    check_shift(z)?;
    let y = problem.op.resolvent_apply_dd(z, problem.f())?;
    let value = problem.e_star().apply_dd(&y)?.to_complex();
    check_finite(value, "g")?;
    Ok(value)
}

/// `g'(z) = −e*(R(z)² f)`, as two successive shifted solves.
pub fn g_prime(z: Complex64, problem: &RankOneProblem) -> Result<Complex64> {
    check_shift(z)?;
    let y = problem.op.resolvent_apply(z, problem.f())?;
    let y2 = problem.op.resolvent_apply(z, &y)?;
    let d = -problem.e_star().apply(&y2)?;
    check_finite(d, "g'")?;
    Ok(d)
}

/// Points `r·e^{iθ}` for `n_radii` log-spaced radii in `[r_lo, r_hi]` and
/// `n_angles` equispaced angles starting at 0, ordered by (radius, angle).
pub fn sample_grid(r_lo: f64, r_hi: f64, n_radii: usize, n_angles: usize) -> Vec<Complex64> {
    let mut pts = Vec::with_capacity(n_radii * n_angles);
    for i in 0..n_radii {
        let t = if n_radii == 1 {
            0.0
        } else {
            i as f64 / (n_radii - 1) as f64
        };
        let r = (r_lo.ln() + t * (r_hi.ln() - r_lo.ln())).exp();
        for j in 0..n_angles {
            let theta = std::f64::consts::TAU * j as f64 / n_angles as f64;
            pts.push(Complex64::from_polar(r, theta));
        }
    }
    pts
}

/// The standard property-test grid: 100 radii × 8 angles.
pub fn standard_grid(r_lo: f64, r_hi: f64) -> Vec<Complex64> {
    sample_grid(r_lo, r_hi, 100, 8)
}

/// `g_solve` over many points in parallel; output order follows `points`.
pub fn g_solve_many(points: &[Complex64], problem: &RankOneProblem) -> Result<Vec<GEval>> {
    points.par_iter().map(|&z| g_solve(z, problem)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moments::{compute_moments, DEFAULT_MOMENT_TAU};
    use crate::numkernel::Vector;
    use crate::operators::{Functional, OperatorModel, RankOnePerturbation};

    fn c(re: f64) -> Complex64 {
        Complex64::new(re, 0.0)
    }

    fn example(dim: usize) -> RankOneProblem {
        RankOneProblem::new(
            OperatorModel::one_over_n_shift(dim).unwrap(),
            RankOnePerturbation::new(Functional::one_over_n(dim), Vector::basis(dim, 0)).unwrap(),
        )
        .unwrap()
    }

    fn pole(dim: usize) -> RankOneProblem {
        RankOneProblem::new(
            OperatorModel::one_over_n_shift(dim).unwrap(),
            RankOnePerturbation::new(Functional::coordinate(dim, 2), Vector::basis(dim, 0)).unwrap(),
        )
        .unwrap()
    }

    fn zero_model(dim: usize) -> RankOneProblem {
        let e = Functional::new((0..dim).map(|i| Complex64::new(1.0, i as f64)).collect()).unwrap();
        let f = Vector::new((0..dim).map(|i| Complex64::new(0.5, -(i as f64))).collect()).unwrap();
        RankOneProblem::new(
            OperatorModel::weighted_shift(vec![c(0.0); dim - 1], dim).unwrap(),
            RankOnePerturbation::new(e, f).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn series_matches_closed_form_at_two() {
        let p = example(400);
        let ms = compute_moments(&p.op, p.e_star(), p.f(), 60).unwrap();
        let g = g_series(c(2.0), &ms).unwrap();
        assert!((g.value - c(0.5f64.exp() - 1.0)).norm() < 1e-13);
        assert!((g.value - c(0.6487212707)).norm() < 1e-10);
        assert!(g.tail_bound.unwrap() < 1e-12);
    }

    #[test]
    fn series_of_zero_and_pole_sequences() {
        let zero = MomentSequence::from_values(vec![c(0.0); 10], DEFAULT_MOMENT_TAU).unwrap();
        let g = g_series(Complex64::new(0.3, -2.0), &zero).unwrap();
        assert_eq!(g.value, c(0.0));
        assert_eq!(g.tail_bound, Some(0.0));
        let mut m = vec![c(0.0); 10];
        m[2] = c(0.5);
        let ms = MomentSequence::from_values(m, DEFAULT_MOMENT_TAU).unwrap();
        assert!((g_series(c(1.0), &ms).unwrap().value - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn series_tail_fails_inside_convergence_radius() {
        // Raw geometric coefficients mᵢ = 1 have envelope ratio 1/|z|.
        let ms = MomentSequence::from_values(vec![c(1.0); 40], DEFAULT_MOMENT_TAU).unwrap();
        assert!(matches!(g_series(c(0.5), &ms), Err(Error::TailNotConvergent { .. })));
        assert!(g_series(c(2.0), &ms).is_ok());
        assert_eq!(g_series(c(0.0), &ms), Err(Error::ZeroShift));
    }

    #[test]
    fn solve_closed_form_values() {
        let p = example(400);
        assert!((g_solve(c(2.0), &p).unwrap().value - c(0.6487212707)).norm() < 1e-10);
        assert!((g_solve(c(1.0), &p).unwrap().value - c(1f64.exp() - 1.0)).norm() < 1e-12);
        assert!((g_solve(c(1.0), &p).unwrap().value - c(1.7182818285)).norm() < 1e-10);
    }

    #[test]
    fn zero_operator_gives_simple_pole() {
        let p = zero_model(6);
        let ef = p.e_star().apply(p.f()).unwrap();
        let z = Complex64::new(0.7, 1.1);
        assert!((g_solve(z, &p).unwrap().value - ef / z).norm() < 1e-13);
        assert!((g_prime(z, &p).unwrap() + ef / (z * z)).norm() < 1e-13);
    }

    #[test]
    fn derivative_closed_forms() {
        let e = example(400);
        assert!((g_prime(c(1.0), &e).unwrap() - c(-std::f64::consts::E)).norm() < 1e-12);
        let p = pole(50);
        assert!((g_prime(c(1.0), &p).unwrap() - c(-1.5)).norm() < 1e-14);
        assert!((g_solve(c(1.0), &p).unwrap().value - c(0.5)).norm() < 1e-15);
    }

    #[test]
    fn accurate_route_agrees_and_resolves_cancellation() {
        let p = example(400);
        // Near |z| = 0.053 the plain sum cancels terms of size ~1e7.
        let z = Complex64::new(0.0019, -0.0530);
        let exact = (z.inv()).exp() - c(1.0);
        let acc = g_solve_accurate(z, &p).unwrap();
        assert!((acc - exact).norm() < 1e-12 * exact.norm().max(1.0));
        // The plain route also carries the f64 rounding of the weights 1/n.
        let plain = g_solve(z, &p).unwrap().value;
        assert!((plain - acc).norm() < 5e-9);
        // Tiny perturbations of z move the accurate value smoothly.
        let dz = Complex64::new(1e-13, 0.0);
        let step = g_solve_accurate(z + dz, &p).unwrap() - acc;
        let predicted = g_prime(z, &p).unwrap() * dz;
        assert!((step - predicted).norm() < 1e-3 * predicted.norm());
    }

    #[test]
    fn grid_is_ordered_by_radius_then_angle() {
        let g = sample_grid(0.2, 5.0, 3, 4);
        assert_eq!(g.len(), 12);
        assert!((g[0] - c(0.2)).norm() < 1e-15);
        assert!((g[11].norm() - 5.0).abs() < 1e-12);
        assert!(g[4].norm() > g[3].norm());
    }
}
