//! Discrete closed geodesics of the weighted half-plane metric.
//!
//! The solved curve is a critical point of the discrete length with respect
//! to normal variations and has all segment distances equal. Newton steps act
//! only along the normals (tangential directions are nearly null for a length
//! functional) and every step is followed by an equal-spacing resample.

use std::f64::consts::{PI, SQRT_2};

use crate::linalg;
use crate::metric::{
    segment_derivatives, segment_distance, HalfPlanePoint, SegmentDerivatives, DEGENERATE_SEGMENT,
};
use crate::stability;
use crate::{Error, Result};

/// Closed polygon `q_0 .. q_{M-1}` in the open half-plane; indices wrap mod `M`.
#[derive(Debug, Clone, PartialEq)]
pub struct DiscreteCurve {
    points: Vec<HalfPlanePoint>,
}

impl DiscreteCurve {
    pub fn new(points: Vec<HalfPlanePoint>) -> Result<Self> {
        if points.len() < 3 {
            return Err(Error::InvalidInput(format!(
                "a closed curve needs at least 3 points, got {}",
                points.len()
            )));
        }
        if let Some(m) = points
            .iter()
            .position(|q| !(q.r > 0.0) || !q.r.is_finite() || !q.z.is_finite())
        {
            return Err(Error::InvalidInput(format!(
                "point {m} = ({}, {}) is not in the open half-plane",
                points[m].r, points[m].z
            )));
        }
        Ok(Self { points })
    }

    pub fn points(&self) -> &[HalfPlanePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Cyclic access.
    pub fn at(&self, m: isize) -> HalfPlanePoint {
        let n = self.points.len() as isize;
        self.points[m.rem_euclid(n) as usize]
    }

    pub fn segment_distances(&self) -> Vec<f64> {
        self.segments()
            .map(|(a, b)| segment_distance(a, b))
            .collect()
    }

    pub fn segments(&self) -> impl Iterator<Item = (HalfPlanePoint, HalfPlanePoint)> + '_ {
        let n = self.points.len();
        (0..n).map(move |m| (self.points[m], self.points[(m + 1) % n]))
    }

    pub fn segment_derivatives(&self) -> Result<Vec<SegmentDerivatives>> {
        self.segments()
            .map(|(a, b)| segment_derivatives(a, b))
            .collect()
    }

    /// Euclidean length of the polygon.
    pub fn euclidean_length(&self) -> f64 {
        self.segments().map(|(a, b)| a.dist(b)).sum()
    }

    pub fn centroid(&self) -> HalfPlanePoint {
        let n = self.points.len() as f64;
        let (r, z) = self
            .points
            .iter()
            .fold((0.0, 0.0), |(r, z), q| (r + q.r, z + q.z));
        HalfPlanePoint::new(r / n, z / n)
    }

    /// Twice the signed area enclosed in the `(r, z)` plane; positive when
    /// the points run counterclockwise.
    pub fn signed_area2(&self) -> f64 {
        self.segments().map(|(a, b)| a.r * b.z - b.r * a.z).sum()
    }

    pub fn max_r_index(&self) -> usize {
        let mut best = 0;
        for (m, q) in self.points.iter().enumerate() {
            if q.r > self.points[best].r {
                best = m;
            }
        }
        best
    }

    /// Image under `z -> -z`, reindexed `m -> -m` so that orientation and
    /// starting point are preserved for a reflection-symmetric curve.
    pub fn reflect(&self) -> Self {
        let n = self.points.len();
        let points = (0..n).map(|m| self.points[(n - m) % n].reflect()).collect();
        Self { points }
    }

    /// Counterclockwise order, starting at the point of largest `r`.
    pub fn canonicalize(mut self) -> Self {
        if self.signed_area2() < 0.0 {
            self.points.reverse();
        }
        let start = self.max_r_index();
        self.points.rotate_left(start);
        self
    }

    /// Largest relative deviation of the segment distances from each other,
    /// `max/min - 1`.
    pub fn spacing_deviation(&self) -> f64 {
        let d = self.segment_distances();
        let (lo, hi) = d.iter().fold((f64::INFINITY, 0.0f64), |(lo, hi), &v| {
            (lo.min(v), hi.max(v))
        });
        hi / lo - 1.0
    }

    /// Gradient of the discrete length with respect to each point.
    pub fn length_gradient(&self) -> Result<Vec<[f64; 2]>> {
        let segs = self.segment_derivatives()?;
        Ok(point_gradients(&segs))
    }
}

pub(crate) fn point_gradients(segs: &[SegmentDerivatives]) -> Vec<[f64; 2]> {
    let n = segs.len();
    (0..n)
        .map(|m| {
            let prev = segs[(m + n - 1) % n].grad(1);
            let next = segs[m].grad(0);
            [prev[0] + next[0], prev[1] + next[1]]
        })
        .collect()
}

/// Discrete length: the sum of midpoint-rule segment distances around the
/// closed curve. On a solved curve this is the entropy estimate.
pub fn discrete_length(curve: &DiscreteCurve) -> f64 {
    curve.segment_distances().iter().sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveConfig {
    pub points: usize,
    pub seed_center: HalfPlanePoint,
    pub seed_radius: f64,
    pub grad_tol: f64,
    pub spacing_tol: f64,
    pub max_iters: usize,
    pub damping: f64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        Self {
            points: 2048,
            seed_center: HalfPlanePoint::new(SQRT_2, 0.0),
            seed_radius: 0.5,
            grad_tol: 1e-10,
            spacing_tol: 1e-8,
            max_iters: 200,
            damping: 1.0,
        }
    }
}

impl SolveConfig {
    pub fn with_points(points: usize) -> Self {
        Self {
            points,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidInput(msg));
        if self.points < 8 {
            return bad(format!("points must be at least 8, got {}", self.points));
        }
        if !(self.seed_radius > 0.0) || !(self.seed_center.r - self.seed_radius > 0.0) {
            return bad(format!(
                "seed circle (center ({}, {}), radius {}) must lie in r > 0",
                self.seed_center.r, self.seed_center.z, self.seed_radius
            ));
        }
        if !self.seed_center.z.is_finite() {
            return bad("seed center must be finite".into());
        }
        if !(self.grad_tol > 0.0) || !(self.spacing_tol > 0.0) {
            return bad("tolerances must be positive".into());
        }
        if self.max_iters == 0 {
            return bad("max_iters must be positive".into());
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return bad(format!("damping must lie in (0, 1], got {}", self.damping));
        }
        Ok(())
    }
}

/// Outcome details of a geodesic solve.
#[derive(Debug, Clone, PartialEq)]
pub struct SolveReport {
    pub iterations: usize,
    /// Largest normal component of the length gradient.
    pub residual: f64,
    pub spacing: f64,
}

struct State {
    curve: DiscreteCurve,
    normals: Vec<[f64; 2]>,
    segs: Vec<SegmentDerivatives>,
    residual: f64,
    spacing: f64,
}

impl State {
    fn evaluate(curve: DiscreteCurve) -> Result<Self> {
        let segs = curve.segment_derivatives()?;
        let blocks = stability::blocks_from_segments(&segs);
        let normals = stability::normals_from_blocks(&curve, &blocks)?.normals;
        let grads = point_gradients(&segs);
        let residual = grads
            .iter()
            .zip(&normals)
            .fold(0.0f64, |m, (g, n)| m.max((g[0] * n[0] + g[1] * n[1]).abs()));
        let spacing = curve.spacing_deviation();
        Ok(Self {
            curve,
            normals,
            segs,
            residual,
            spacing,
        })
    }
}

fn seed_circle(config: &SolveConfig) -> Vec<HalfPlanePoint> {
    let n = config.points;
    (0..n)
        .map(|m| {
            let t = 2.0 * PI * m as f64 / n as f64;
            HalfPlanePoint::new(
                config.seed_center.r + config.seed_radius * t.cos(),
                config.seed_center.z + config.seed_radius * t.sin(),
            )
        })
        .collect()
}

/// Solves for the discrete closed geodesic described by `config`.
pub fn solve_geodesic(config: &SolveConfig) -> Result<DiscreteCurve> {
    solve_geodesic_with_report(config).map(|(c, _)| c)
}

pub fn solve_geodesic_with_report(config: &SolveConfig) -> Result<(DiscreteCurve, SolveReport)> {
    config.validate()?;
    let m = config.points;
    let seed = DiscreteCurve::new(seed_circle(config))?;
    let mut state = State::evaluate(resample_anchored(&seed, m)?)?;
    let min_step = config.damping / 1024.0;

    for iter in 0..config.max_iters {
        if state.residual <= config.grad_tol && state.spacing <= config.spacing_tol {
            let report = SolveReport {
                iterations: iter,
                residual: state.residual,
                spacing: state.spacing,
            };
            return Ok((state.curve.canonicalize(), report));
        }

        let reduced = stability::reduce_segments(
            &state.segs,
            &stability::NormalField::from_vecs(state.normals.clone()),
        );
        let grads = point_gradients(&state.segs);
        let rhs: Vec<f64> = grads
            .iter()
            .zip(&state.normals)
            .map(|(g, n)| -(g[0] * n[0] + g[1] * n[1]))
            .collect();
        let du = linalg::cyclic_solve(&reduced.0, &reduced.1, &rhs);

        let mut step = config.damping;
        loop {
            let trial = displaced(&state.curve, &state.normals, &du, step)
                .and_then(|c| resample_anchored(&c, m))
                .and_then(State::evaluate);
            match trial {
                Ok(next) if next.residual < state.residual || step <= min_step => {
                    state = next;
                    break;
                }
                Err(e) if step <= min_step => {
                    return Err(match e {
                        Error::InvalidInput(msg) => Error::CurveCollapse(msg),
                        Error::DegenerateSegment { length } => {
                            Error::CurveCollapse(format!("segment of length {length:e}"))
                        }
                        other => other,
                    });
                }
                _ => step *= 0.5,
            }
        }
    }

    if state.residual <= config.grad_tol && state.spacing <= config.spacing_tol {
        let report = SolveReport {
            iterations: config.max_iters,
            residual: state.residual,
            spacing: state.spacing,
        };
        return Ok((state.curve.canonicalize(), report));
    }
    Err(Error::NonConvergence {
        iterations: config.max_iters,
        residual: state.residual,
        spacing: state.spacing,
    })
}

fn displaced(
    curve: &DiscreteCurve,
    normals: &[[f64; 2]],
    du: &[f64],
    step: f64,
) -> Result<DiscreteCurve> {
    let pts = curve
        .points()
        .iter()
        .zip(normals)
        .zip(du)
        .map(|((q, n), u)| HalfPlanePoint::new(q.r + step * u * n[0], q.z + step * u * n[1]))
        .collect();
    DiscreteCurve::new(pts)
}

/// Cumulative `g^sigma` length at each vertex, plus the total.
fn cumulative(curve: &DiscreteCurve) -> Result<(Vec<f64>, Vec<f64>)> {
    let d = curve.segment_distances();
    if let Some(i) = d.iter().position(|&v| !(v > DEGENERATE_SEGMENT * 1e-3)) {
        return Err(Error::DegenerateSegment { length: d[i] });
    }
    let mut cum = Vec::with_capacity(d.len() + 1);
    let mut acc = 0.0;
    cum.push(0.0);
    for v in &d {
        acc += v;
        cum.push(acc);
    }
    Ok((cum, d))
}

fn sample(
    curve: &DiscreteCurve,
    cum: &[f64],
    d: &[f64],
    offset: f64,
    m_new: usize,
) -> Result<DiscreteCurve> {
    let n = curve.len();
    let total = cum[n];
    let mut seg = 0;
    let pts = (0..m_new)
        .map(|i| {
            let mut t = offset + total * i as f64 / m_new as f64;
            if t >= total {
                t -= total;
            }
            // sample positions increase until the single wrap at `offset`
            if t < cum[seg] {
                seg = 0;
            }
            while seg + 1 < n && cum[seg + 1] <= t {
                seg += 1;
            }
            let f = ((t - cum[seg]) / d[seg]).clamp(0.0, 1.0);
            let (a, b) = (curve.points[seg], curve.points[(seg + 1) % n]);
            HalfPlanePoint::new(a.r + f * (b.r - a.r), a.z + f * (b.z - a.z))
        })
        .collect();
    DiscreteCurve::new(pts)
}

/// Resamples `m_new` points equally spaced in accumulated `g^sigma` length
/// along the piecewise-linear interpolant, starting at `q_0`.
pub fn resample_uniform(curve: &DiscreteCurve, m_new: usize) -> Result<DiscreteCurve> {
    let (cum, d) = cumulative(curve)?;
    sample(curve, &cum, &d, 0.0, m_new)
}

/// Like [`resample_uniform`], but starting where the polygon crosses `z = 0`
/// at its largest `r`, so that reflection-symmetric curves stay symmetric
/// under reindexing. Falls back to `q_0` when there is no crossing.
fn resample_anchored(curve: &DiscreteCurve, m_new: usize) -> Result<DiscreteCurve> {
    let (cum, d) = cumulative(curve)?;
    let n = curve.len();
    let mut anchor: Option<(f64, f64)> = None;
    for i in 0..n {
        let (a, b) = (curve.points[i], curve.points[(i + 1) % n]);
        let crosses = (a.z <= 0.0 && b.z > 0.0) || (a.z >= 0.0 && b.z < 0.0);
        if !crosses {
            continue;
        }
        let f = if a.z == 0.0 { 0.0 } else { a.z / (a.z - b.z) };
        let r = a.r + f * (b.r - a.r);
        if anchor.is_none_or(|(best, _)| r > best) {
            anchor = Some((r, cum[i] + f * d[i]));
        }
    }
    let offset = anchor.map_or(0.0, |(_, t)| t);
    sample(curve, &cum, &d, offset, m_new)
}
