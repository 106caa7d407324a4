//! Every solution of `g(z) = 1/α` inside an annulus `r_min < |z| < r_max`.
//!
//! The count comes from the argument principle applied to
//! `h(z) = g(z) − 1/α` on the annulus boundary. The annulus is then cut into
//! sectors that are subdivided until each cell holds one root (found by
//! Newton from the cell centre and checked to lie in the cell) or shrinks
//! below the clustering radius, in which case it is reported as a single
//! root of multiplicity equal to its winding number.

mod contour;

use std::cmp::Ordering;
use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;

use crate::error::{check_finite, Error, Result};
use crate::operators::RankOneProblem;
use crate::resolvent::{g_prime, g_solve_accurate};

pub use contour::{Contour, Path, Sampling};

/// The open annulus `r_min < |z| < r_max`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Annulus {
    pub r_min: f64,
    pub r_max: f64,
}

impl Annulus {
    pub fn new(r_min: f64, r_max: f64) -> Result<Self> {
        if !(r_min.is_finite() && r_max.is_finite() && r_min > 0.0 && r_max > r_min) {
            return Err(Error::InvalidArgument(format!(
                "annulus needs 0 < r_min < r_max, got [{r_min}, {r_max}]"
            )));
        }
        Ok(Self { r_min, r_max })
    }

    /// Strict containment.
    pub fn contains(&self, z: Complex64) -> bool {
        let r = z.norm();
        r > self.r_min && r < self.r_max
    }

    pub fn boundary(&self) -> Contour {
        Contour::annulus_boundary(self.r_min, self.r_max)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RootFinderOptions {
    /// Initial phase samples per full turn.
    pub samples_per_circle: usize,
    /// Cap on samples along a single contour piece.
    pub max_samples: usize,
    /// Sample intervals with a larger phase increment are bisected.
    pub max_phase_step: f64,
    /// A contour is rejected when `min |h| < zero_rel · max(1, |1/α|)`.
    pub zero_rel: f64,
    /// Roots closer than `cluster_rel · r_max` are merged.
    pub cluster_rel: f64,
    pub newton_max_iter: usize,
    /// Newton stops once `|h| < newton_residual_rel · max(1, |1/α|)` ...
    pub newton_residual_rel: f64,
    /// ... and `|Δz| < newton_step_rel · |z|`.
    pub newton_step_rel: f64,
    pub max_depth: usize,
}

impl Default for RootFinderOptions {
    fn default() -> Self {
        Self {
            samples_per_circle: 64,
            max_samples: 1 << 16,
            max_phase_step: std::f64::consts::FRAC_PI_4,
            zero_rel: 1e-12,
            cluster_rel: 1e-8,
            newton_max_iter: 50,
            newton_residual_rel: 1e-11,
            newton_step_rel: 1e-12,
            max_depth: 80,
        }
    }
}

impl RootFinderOptions {
    fn sampling(&self) -> Sampling {
        Sampling {
            per_circle: self.samples_per_circle,
            max_samples: self.max_samples,
            max_phase_step: self.max_phase_step,
        }
    }
}

/// A root of `g(z) = 1/α`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Root {
    pub z: Complex64,
    /// Winding number of the cell the root was isolated in.
    pub multiplicity: usize,
    /// `|g(z) − 1/α|` at `z`.
    pub residual: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct RootSet {
    pub alpha: Complex64,
    /// The annulus actually used; radii may be nudged off a root.
    pub annulus: Annulus,
    /// Winding number of `h` around the annulus boundary.
    pub total_winding: usize,
    /// Sorted by modulus (descending), then argument.
    pub roots: Vec<Root>,
}

impl RootSet {
    /// Roots counted with multiplicity.
    pub fn count(&self) -> usize {
        self.roots.iter().map(|r| r.multiplicity).sum()
    }
}

fn target(alpha: Complex64) -> Result<Complex64> {
    check_finite(alpha, "alpha")?;
    if alpha == Complex64::new(0.0, 0.0) {
        return Err(Error::InvalidArgument("alpha must be nonzero".into()));
    }
    Ok(alpha.inv())
}

fn residual_scale(target: Complex64) -> f64 {
    target.norm().max(1.0)
}

fn sample(problem: &RankOneProblem, target: Complex64, z: Complex64) -> Result<contour::Sample> {
    Ok((g_solve_accurate(z, problem)? - target, g_prime(z, problem)?))
}

/// Winding number of `g − 1/α` around 0 along `contour`.
pub fn winding_count(
    problem: &RankOneProblem,
    alpha: Complex64,
    contour: &Contour,
    opts: &RootFinderOptions,
) -> Result<i64> {
    let w = target(alpha)?;
    let h = |z: Complex64| sample(problem, w, z);
    contour::contour_winding(contour, &h, &opts.sampling(), opts.zero_rel * residual_scale(w))
}

/// Newton's method on `h(z) = g(z) − 1/α`, with `h` evaluated in
/// double-double precision.
///
/// With `domain`, iterates leaving `[r_min/2, 2 r_max]` fail with
/// `LeftDomain`.
pub fn newton_polish(
    problem: &RankOneProblem,
    alpha: Complex64,
    z0: Complex64,
    domain: Option<&Annulus>,
    opts: &RootFinderOptions,
) -> Result<Root> {
    let w = target(alpha)?;
    check_finite(z0, "z0")?;
    let h_tol = opts.newton_residual_rel * residual_scale(w);
    let mut z = z0;
    let mut residual = f64::INFINITY;
    for _ in 0..opts.newton_max_iter {
        let h = g_solve_accurate(z, problem)? - w;
        residual = h.norm();
        let dh = g_prime(z, problem)?;
        if dh == Complex64::new(0.0, 0.0) {
            break;
        }
        let dz = h / dh;
        if residual < h_tol && dz.norm() < opts.newton_step_rel * z.norm() {
            return Ok(Root {
                z,
                multiplicity: 1,
                residual,
            });
        }
        z -= dz;
        let r = z.norm();
        if !r.is_finite() || r == 0.0 {
            return Err(Error::LeftDomain { modulus: r });
        }
        if let Some(a) = domain {
            if r < 0.5 * a.r_min || r > 2.0 * a.r_max {
                return Err(Error::LeftDomain { modulus: r });
            }
        }
    }
    Err(Error::NewtonStall {
        iterations: opts.newton_max_iter,
        residual,
    })
}

/// A polar cell `r0 ≤ |z| ≤ r1`, `t0 ≤ arg z ≤ t1`.
#[derive(Clone, Copy, Debug)]
struct Cell {
    r0: f64,
    r1: f64,
    t0: f64,
    t1: f64,
    winding: i64,
    depth: usize,
}

impl Cell {
    fn contour(&self) -> Contour {
        Contour::sector(self.r0, self.r1, self.t0, self.t1)
    }

    fn center(&self) -> Complex64 {
        Complex64::from_polar((self.r0 * self.r1).sqrt(), 0.5 * (self.t0 + self.t1))
    }

    fn radial_extent(&self) -> f64 {
        self.r1 - self.r0
    }

    fn angular_extent(&self) -> f64 {
        (self.r0 * self.r1).sqrt() * (self.t1 - self.t0)
    }

    fn diameter(&self) -> f64 {
        self.radial_extent().hypot(self.r1 * (self.t1 - self.t0))
    }

    fn contains(&self, z: Complex64) -> bool {
        const SLACK: f64 = 1e-9;
        let r = z.norm();
        if r < self.r0 * (1.0 - SLACK) || r > self.r1 * (1.0 + SLACK) {
            return false;
        }
        let a = self.t0 + (z.arg() - self.t0).rem_euclid(TAU);
        a <= self.t1 + SLACK || a >= self.t0 + TAU - SLACK
    }
}

struct Finder<'a> {
    problem: &'a RankOneProblem,
    alpha: Complex64,
    target: Complex64,
    annulus: Annulus,
    opts: &'a RootFinderOptions,
    zero_tol: f64,
    cluster_radius: f64,
}

const SPLIT_FRACTIONS: [f64; 5] = [0.5, 0.47, 0.53, 0.41, 0.59];

impl Finder<'_> {
    fn winding(&self, contour: &Contour) -> Result<i64> {
        let h = |z: Complex64| sample(self.problem, self.target, z);
        contour::contour_winding(contour, &h, &self.opts.sampling(), self.zero_tol)
    }

    /// Winding of one full circle, nudging the radius off any root on it.
    fn circle_winding(&self, radius: f64) -> Result<(i64, f64)> {
        let mut last = None;
        for nudge in [0.0, 1e-6, -1e-6, 3.1e-6] {
            let r = radius * (1.0 + nudge);
            match self.winding(&Contour::circle(r)) {
                Ok(w) => return Ok((w, r)),
                Err(e @ (Error::ContourThroughRoot { .. } | Error::PhaseStepTooLarge { .. })) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one attempt"))
    }

    fn split(&self, cell: &Cell) -> Result<Vec<Cell>> {
        let radial = cell.radial_extent() >= cell.angular_extent();
        let mut last = None;
        for frac in SPLIT_FRACTIONS {
            let (a, b) = if radial {
                let rs = (cell.r0.ln() + frac * (cell.r1.ln() - cell.r0.ln())).exp();
                (Cell { r1: rs, ..*cell }, Cell { r0: rs, ..*cell })
            } else {
                let ts = cell.t0 + frac * (cell.t1 - cell.t0);
                (Cell { t1: ts, ..*cell }, Cell { t0: ts, ..*cell })
            };
            let children = [a, b]
                .into_iter()
                .map(|c| {
                    self.winding(&c.contour()).map(|w| Cell {
                        winding: w,
                        depth: cell.depth + 1,
                        ..c
                    })
                })
                .collect::<Result<Vec<_>>>();
            match children {
                Ok(ch) => {
                    let sum: i64 = ch.iter().map(|c| c.winding).sum();
                    if sum == cell.winding && ch.iter().all(|c| c.winding >= 0) {
                        return Ok(ch);
                    }
                    last = Some(Error::InconsistentWinding {
                        parent: cell.winding,
                        children: sum,
                    });
                }
                Err(e @ (Error::ContourThroughRoot { .. } | Error::PhaseStepTooLarge { .. })) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one split attempt"))
    }

    fn resolve(&self, cell: Cell) -> Result<Vec<Root>> {
        if cell.winding == 0 {
            return Ok(Vec::new());
        }
        if cell.winding == 1 {
            if let Ok(root) = newton_polish(self.problem, self.alpha, cell.center(), Some(&self.annulus), self.opts) {
                if cell.contains(root.z) {
                    return Ok(vec![root]);
                }
            }
        }
        if cell.diameter() <= self.cluster_radius || cell.depth >= self.opts.max_depth {
            let z = cell.center();
            let residual = (g_solve_accurate(z, self.problem)? - self.target).norm();
            return Ok(vec![Root {
                z,
                multiplicity: cell.winding as usize,
                residual,
            }]);
        }
        let mut roots = Vec::new();
        for child in self.split(&cell)? {
            roots.extend(self.resolve(child)?);
        }
        Ok(roots)
    }

    /// Cuts the annulus into four sectors whose windings add up to `total`,
    /// rotating the cut lines if one passes through a root.
    fn sectors(&self, total: i64) -> Result<Vec<Cell>> {
        let mut last = None;
        for offset in [0.1, 0.4, 0.75, 1.2, 0.05] {
            let cells: Vec<Cell> = (0..4)
                .map(|j| Cell {
                    r0: self.annulus.r_min,
                    r1: self.annulus.r_max,
                    t0: offset + j as f64 * TAU / 4.0,
                    t1: offset + (j + 1) as f64 * TAU / 4.0,
                    winding: 0,
                    depth: 0,
                })
                .collect();
            let windings = cells
                .par_iter()
                .map(|c| self.winding(&c.contour()))
                .collect::<Result<Vec<_>>>();
            match windings {
                Ok(ws) => {
                    let sum: i64 = ws.iter().sum();
                    if sum == total && ws.iter().all(|&w| w >= 0) {
                        return Ok(cells
                            .into_iter()
                            .zip(ws)
                            .map(|(c, w)| Cell { winding: w, ..c })
                            .collect());
                    }
                    last = Some(Error::InconsistentWinding {
                        parent: total,
                        children: sum,
                    });
                }
                Err(e @ (Error::ContourThroughRoot { .. } | Error::PhaseStepTooLarge { .. })) => last = Some(e),
                Err(e) => return Err(e),
            }
        }
        Err(last.expect("at least one sector attempt"))
    }
}

/// All solutions of `g(z) = 1/α` in the annulus, with multiplicities.
pub fn find_roots(
    problem: &RankOneProblem,
    alpha: Complex64,
    annulus: &Annulus,
    opts: &RootFinderOptions,
) -> Result<RootSet> {
    let w = target(alpha)?;
    let mut finder = Finder {
        problem,
        alpha,
        target: w,
        annulus: *annulus,
        opts,
        zero_tol: opts.zero_rel * residual_scale(w),
        cluster_radius: opts.cluster_rel * annulus.r_max,
    };
    let (outer, r_max) = finder.circle_winding(annulus.r_max)?;
    let (inner, r_min) = finder.circle_winding(annulus.r_min)?;
    finder.annulus = Annulus::new(r_min, r_max)?;
    let total = outer - inner;
    if total < 0 {
        return Err(Error::InconsistentWinding {
            parent: total,
            children: 0,
        });
    }
    let mut roots = if total == 0 {
        Vec::new()
    } else {
        let per_sector = finder
            .sectors(total)?
            .into_par_iter()
            .map(|c| finder.resolve(c))
            .collect::<Result<Vec<_>>>()?;
        per_sector.into_iter().flatten().collect()
    };
    roots = merge_clusters(roots, finder.cluster_radius);
    sort_roots(&mut roots);
    let count: usize = roots.iter().map(|r| r.multiplicity).sum();
    if count as i64 != total {
        return Err(Error::InconsistentWinding {
            parent: total,
            children: count as i64,
        });
    }
    Ok(RootSet {
        alpha,
        annulus: finder.annulus,
        total_winding: total as usize,
        roots,
    })
}

fn merge_clusters(roots: Vec<Root>, radius: f64) -> Vec<Root> {
    let mut out: Vec<Root> = Vec::with_capacity(roots.len());
    for r in roots {
        match out.iter_mut().find(|o| (o.z - r.z).norm() <= radius) {
            Some(o) => {
                o.multiplicity += r.multiplicity;
                if r.residual < o.residual {
                    o.z = r.z;
                    o.residual = r.residual;
                }
            }
            None => out.push(r),
        }
    }
    out
}

/// Orders points by modulus (descending), then by argument; moduli within
/// a relative `1e-9` count as equal.
pub fn compare_points(a: Complex64, b: Complex64) -> Ordering {
    let (ra, rb) = (a.norm(), b.norm());
    if (ra - rb).abs() <= 1e-9 * ra.max(rb) {
        a.arg().total_cmp(&b.arg())
    } else {
        rb.total_cmp(&ra)
    }
}

fn sort_roots(roots: &mut [Root]) {
    roots.sort_by(|a, b| compare_points(a.z, b.z));
}
