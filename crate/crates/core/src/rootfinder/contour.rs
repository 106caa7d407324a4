use std::f64::consts::TAU;

use num_complex::Complex64;

use crate::error::{Error, Result};

/// A piece of a contour, parametrised over `t ∈ [0, 1]`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Path {
    /// `r·e^{iθ}` for `θ` running from `from` to `to` (either direction).
    Arc {
        radius: f64,
        from: f64,
        to: f64,
    },
    Segment {
        from: Complex64,
        to: Complex64,
    },
}

impl Path {
    pub fn point(&self, t: f64) -> Complex64 {
        match *self {
            Path::Arc { radius, from, to } => Complex64::from_polar(radius, from + t * (to - from)),
            Path::Segment { from, to } => from + (to - from) * t,
        }
    }

    fn initial_samples(&self, per_circle: usize) -> usize {
        match *self {
            Path::Arc { from, to, .. } => ((per_circle as f64 * (to - from).abs() / TAU).ceil() as usize).max(8),
            Path::Segment { .. } => 16,
        }
    }
}

/// A closed, piecewise contour.
#[derive(Clone, Debug, PartialEq)]
pub struct Contour {
    pub paths: Vec<Path>,
}

impl Contour {
    pub fn circle(radius: f64) -> Self {
        Self {
            paths: vec![Path::Arc {
                radius,
                from: 0.0,
                to: TAU,
            }],
        }
    }

    /// Outer circle counter-clockwise, inner circle clockwise: winds once
    /// around every point of the open annulus and never around the origin.
    pub fn annulus_boundary(r_min: f64, r_max: f64) -> Self {
        Self {
            paths: vec![
                Path::Arc {
                    radius: r_max,
                    from: 0.0,
                    to: TAU,
                },
                Path::Arc {
                    radius: r_min,
                    from: TAU,
                    to: 0.0,
                },
            ],
        }
    }

    /// Positively oriented boundary of `{r0 ≤ |z| ≤ r1, t0 ≤ arg z ≤ t1}`.
    pub fn sector(r0: f64, r1: f64, t0: f64, t1: f64) -> Self {
        Self {
            paths: vec![
                Path::Arc {
                    radius: r1,
                    from: t0,
                    to: t1,
                },
                Path::Segment {
                    from: Complex64::from_polar(r1, t1),
                    to: Complex64::from_polar(r0, t1),
                },
                Path::Arc {
                    radius: r0,
                    from: t1,
                    to: t0,
                },
                Path::Segment {
                    from: Complex64::from_polar(r0, t0),
                    to: Complex64::from_polar(r1, t0),
                },
            ],
        }
    }
}

/// Sampling controls for phase tracking.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Sampling {
    pub per_circle: usize,
    pub max_samples: usize,
    pub max_phase_step: f64,
}

/// Accumulated phase of `h` along a path, plus the smallest `|h|` seen.
pub(crate) struct PhaseTrack {
    pub phase: f64,
    pub min_abs: f64,
    pub samples: usize,
}

/// `h` and `h'` at one contour point.
pub(crate) type Sample = (Complex64, Complex64);

/// Tracks `arg h` along `path`. A sample interval is bisected while its
/// phase increment, or the linear bound `|h'/h|·|Δz|` at either end, reaches
/// `max_phase_step`; the second test catches whole turns that a phase
/// difference alone cannot see.
pub(crate) fn track_phase<H>(path: &Path, h: &H, sampling: &Sampling) -> Result<PhaseTrack>
where
    H: Fn(Complex64) -> Result<Sample>,
{
    let n0 = path.initial_samples(sampling.per_circle);
    let mut ts: Vec<f64> = (0..=n0).map(|k| k as f64 / n0 as f64).collect();
    let mut vals: Vec<Sample> = ts.iter().map(|&t| h(path.point(t))).collect::<Result<_>>()?;
    loop {
        if vals.iter().any(|v| v.0.norm() == 0.0) {
            return Err(Error::ContourThroughRoot { min_abs: 0.0 });
        }
        let bad: Vec<usize> = (0..ts.len() - 1)
            .filter(|&k| {
                let dz = (path.point(ts[k + 1]) - path.point(ts[k])).norm();
                let rate = (vals[k].1 / vals[k].0)
                    .norm()
                    .max((vals[k + 1].1 / vals[k + 1].0).norm());
                step(vals[k].0, vals[k + 1].0).abs() >= sampling.max_phase_step || rate * dz >= sampling.max_phase_step
            })
            .collect();
        if bad.is_empty() {
            break;
        }
        if ts.len() + bad.len() > sampling.max_samples {
            return Err(Error::PhaseStepTooLarge { samples: ts.len() });
        }
        let mids: Vec<(usize, f64, Sample)> = bad
            .iter()
            .map(|&k| {
                let t = 0.5 * (ts[k] + ts[k + 1]);
                h(path.point(t)).map(|v| (k, t, v))
            })
            .collect::<Result<_>>()?;
        let mut nts = Vec::with_capacity(ts.len() + mids.len());
        let mut nvals = Vec::with_capacity(ts.len() + mids.len());
        let mut mi = mids.iter().peekable();
        for k in 0..ts.len() {
            nts.push(ts[k]);
            nvals.push(vals[k]);
            if let Some(&&(idx, t, v)) = mi.peek() {
                if idx == k {
                    nts.push(t);
                    nvals.push(v);
                    mi.next();
                }
            }
        }
        ts = nts;
        vals = nvals;
    }
    let phase = vals.windows(2).map(|w| step(w[0].0, w[1].0)).sum();
    let min_abs = vals.iter().map(|v| v.0.norm()).fold(f64::INFINITY, f64::min);
    Ok(PhaseTrack {
        phase,
        min_abs,
        samples: ts.len(),
    })
}

#[inline]
fn step(a: Complex64, b: Complex64) -> f64 {
    (b * a.conj()).arg()
}

/// Winding number of `h` around 0 along a closed contour.
///
/// Fails with `ContourThroughRoot` when `min |h|` on the contour drops below
/// `zero_tol`, and with `PhaseStepTooLarge` when sampling cannot resolve the
/// phase or the total is not within 0.25 of an integer.
pub(crate) fn contour_winding<H>(contour: &Contour, h: &H, sampling: &Sampling, zero_tol: f64) -> Result<i64>
where
    H: Fn(Complex64) -> Result<Sample>,
{
    let mut phase = 0.0;
    let mut min_abs = f64::INFINITY;
    let mut samples = 0;
    for p in &contour.paths {
        let tr = track_phase(p, h, sampling)?;
        phase += tr.phase;
        min_abs = min_abs.min(tr.min_abs);
        samples += tr.samples;
    }
    if min_abs < zero_tol {
        return Err(Error::ContourThroughRoot { min_abs });
    }
    let w = phase / TAU;
    let rounded = w.round();
    if (w - rounded).abs() >= 0.25 {
        return Err(Error::PhaseStepTooLarge { samples });
    }
    Ok(rounded as i64)
}
