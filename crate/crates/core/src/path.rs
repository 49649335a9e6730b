//! Paths of curves `t ↦ γ(t)`: container, length quadrature and the
//! canonical constructors (shrink, translate, rotate, shorten, power
//! shrink-shorten, linear interpolation and the planar example path).

use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::curve::{same_grid, DiscreteCurve, TangentField, IMMERSION_FLOOR};
use crate::diffeo::DiscreteDiffeo;
use crate::error::{Error, Result};
use crate::grid::{differentiate, DerivativeScheme, Grid};
use crate::metric::{terms_flat, MetricCoefficients};

/// Smallest number of time intervals in a path.
pub const MIN_TIME_INTERVALS: usize = 8;
/// Smallest number of time intervals when the velocity is differenced.
pub const MIN_TIME_INTERVALS_FD: usize = 16;
/// Largest ratio between consecutive nodes of a geometric time grid. With
/// integrands no steeper than `t^{-3/2}` neighbouring values differ by
/// less than ten percent.
pub const GEOMETRIC_RATIO: f64 = 1.06;

/// Which constructor produced a path, and with what parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathInfo {
    pub constructor: String,
    pub parameters: Map<String, Value>,
}

impl PathInfo {
    pub fn new(constructor: &str, parameters: Value) -> Self {
        let parameters = match parameters {
            Value::Object(m) => m,
            Value::Null => Map::new(),
            other => {
                let mut m = Map::new();
                m.insert("value".into(), other);
                m
            }
        };
        PathInfo { constructor: constructor.into(), parameters }
    }
}

/// A time-indexed family of immersed curves, optionally with its exact
/// velocity at every time node.
#[derive(Debug, Clone)]
pub struct CurvePath {
    times: Vec<f64>,
    frames: Vec<DiscreteCurve>,
    velocity: Option<Vec<TangentField>>,
    info: PathInfo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VelocitySource {
    Analytic,
    FiniteDifference,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Quadrature {
    Trapezoid,
}

/// Result of [`path_length`].
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PathLengthReport {
    pub length: f64,
    pub times: Vec<f64>,
    /// `√G_{γ(t)}(γ_t, γ_t)` at each time node.
    pub integrand: Vec<f64>,
    pub quadrature: Quadrature,
    pub grid_n: usize,
    pub time_m: usize,
    pub velocity: VelocitySource,
    pub scheme: DerivativeScheme,
}

impl PathLengthReport {
    /// Trapezoid integral of the integrand between time nodes `i0 ≤ i1`.
    pub fn partial(&self, i0: usize, i1: usize) -> f64 {
        (i0..i1).map(|i| 0.5 * (self.times[i + 1] - self.times[i]) * (self.integrand[i] + self.integrand[i + 1])).sum()
    }

    /// Length of the path from time node `i` to the end.
    pub fn length_from(&self, i: usize) -> f64 {
        self.partial(i, self.times.len() - 1)
    }

    /// Running integral from the first node.
    pub fn cumulative(&self) -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = vec![0.0];
        for i in 0..self.times.len() - 1 {
            acc += self.partial(i, i + 1);
            out.push(acc);
        }
        out
    }
}

impl CurvePath {
    pub fn new(
        times: Vec<f64>,
        frames: Vec<DiscreteCurve>,
        velocity: Option<Vec<TangentField>>,
        info: PathInfo,
    ) -> Result<Self> {
        if times.len() != frames.len() {
            return Err(Error::InvalidPath(format!("{} times for {} frames", times.len(), frames.len())));
        }
        let m = times.len().saturating_sub(1);
        let floor = if velocity.is_some() { MIN_TIME_INTERVALS } else { MIN_TIME_INTERVALS_FD };
        if m < floor {
            return Err(Error::InvalidPath(format!("{m} time intervals, need at least {floor}")));
        }
        if times[0] < 0.0 || times[m] > 1.0 || times.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidPath("times must increase strictly within [0, 1]".into()));
        }
        let (grid, dim) = (frames[0].grid(), frames[0].dim());
        for f in &frames {
            same_grid(&grid, &f.grid())?;
            if f.dim() != dim {
                return Err(Error::InvalidPath("frames of different dimension".into()));
            }
        }
        if let Some(v) = &velocity {
            if v.len() != frames.len() || v.iter().any(|h| h.grid() != grid || h.dim() != dim) {
                return Err(Error::InvalidPath("velocity fields do not match the frames".into()));
            }
        }
        Ok(CurvePath { times, frames, velocity, info })
    }

    pub fn times(&self) -> &[f64] {
        &self.times
    }
    pub fn frames(&self) -> &[DiscreteCurve] {
        &self.frames
    }
    pub fn velocity(&self) -> Option<&[TangentField]> {
        self.velocity.as_deref()
    }
    pub fn info(&self) -> &PathInfo {
        &self.info
    }
    pub fn grid(&self) -> Grid {
        self.frames[0].grid()
    }
    pub fn dim(&self) -> usize {
        self.frames[0].dim()
    }
    /// Number of time intervals `M`.
    pub fn time_intervals(&self) -> usize {
        self.times.len() - 1
    }
    pub fn first(&self) -> &DiscreteCurve {
        &self.frames[0]
    }
    pub fn last(&self) -> &DiscreteCurve {
        &self.frames[self.frames.len() - 1]
    }

    /// `max_t ℓ_{γ(t)}` over the time nodes.
    pub fn max_frame_length(&self) -> f64 {
        self.frames.iter().map(DiscreteCurve::length).fold(0.0, f64::max)
    }

    /// Splits at an interior time node; both halves share that frame.
    /// Only paths with analytic velocity can be split.
    pub fn split_at(&self, m: usize) -> Result<(CurvePath, CurvePath)> {
        let v =
            self.velocity.as_ref().ok_or_else(|| Error::InvalidPath("splitting needs an analytic velocity".into()))?;
        let part = |r: std::ops::Range<usize>| {
            CurvePath::new(
                self.times[r.clone()].to_vec(),
                self.frames[r.clone()].to_vec(),
                Some(v[r].to_vec()),
                self.info.clone(),
            )
        };
        Ok((part(0..m + 1)?, part(m..self.times.len())?))
    }

    /// `γ(t) ∘ φ` for every frame (and velocity).
    pub fn reparametrize(&self, phi: &DiscreteDiffeo) -> Result<CurvePath> {
        let frames = self.frames.iter().map(|f| crate::curve::reparametrize(f, phi)).collect::<Result<Vec<_>>>()?;
        let velocity = match &self.velocity {
            Some(v) => Some(v.iter().map(|h| h.reparametrize(phi)).collect::<Result<Vec<_>>>()?),
            None => None,
        };
        CurvePath::new(self.times.clone(), frames, velocity, self.info.clone())
    }

    /// The same frames assigned to new time labels `s`; analytic velocities
    /// are rescaled by `dt/ds` (given per node).
    pub fn retimed(&self, times: Vec<f64>, dt_ds: &[f64]) -> Result<CurvePath> {
        let velocity =
            self.velocity.as_ref().map(|v| v.iter().zip(dt_ds).map(|(h, r)| h.scaled(*r)).collect::<Vec<_>>());
        CurvePath::new(times, self.frames.clone(), velocity, self.info.clone())
    }
}

/// Velocity at time node `m` by non-uniform three-point differences
/// (one-sided at the ends).
fn fd_velocity(path: &CurvePath, m: usize) -> Vec<f64> {
    let t = &path.times;
    let last = t.len() - 1;
    let (i0, i1, i2, at) = if m == 0 {
        (0, 1, 2, 0)
    } else if m == last {
        (last - 2, last - 1, last, 2)
    } else {
        (m - 1, m, m + 1, 1)
    };
    let (h1, h2) = (t[i1] - t[i0], t[i2] - t[i1]);
    let w = match at {
        0 => [-(2.0 * h1 + h2) / (h1 * (h1 + h2)), (h1 + h2) / (h1 * h2), -h1 / (h2 * (h1 + h2))],
        1 => [-h2 / (h1 * (h1 + h2)), (h2 - h1) / (h1 * h2), h1 / (h2 * (h1 + h2))],
        _ => [h2 / (h1 * (h1 + h2)), -(h1 + h2) / (h1 * h2), (2.0 * h2 + h1) / (h2 * (h1 + h2))],
    };
    let (a, b, c) = (path.frames[i0].samples(), path.frames[i1].samples(), path.frames[i2].samples());
    (0..a.len()).map(|k| w[0] * a[k] + w[1] * b[k] + w[2] * c[k]).collect()
}

/// `len(γ) = ∫ √G_{γ(t)}(γ_t, γ_t) dt` by the trapezoid rule in `t`.
pub fn path_length(path: &CurvePath, g: &MetricCoefficients) -> Result<PathLengthReport> {
    let grid = path.grid();
    let dim = path.dim();
    let integrand: Vec<f64> = (0..path.times.len())
        .into_par_iter()
        .map(|m| {
            let c = path.frames[m].samples();
            let t = match &path.velocity {
                Some(v) => terms_flat(g.order(), &grid, dim, c, v[m].samples(), None),
                None => terms_flat(g.order(), &grid, dim, c, &fd_velocity(path, m), None),
            };
            t.iter().zip(g.weights()).map(|(t, a)| a * t).sum::<f64>().max(0.0).sqrt()
        })
        .collect();
    let mut report = PathLengthReport {
        length: 0.0,
        times: path.times.clone(),
        integrand,
        quadrature: Quadrature::Trapezoid,
        grid_n: grid.intervals(),
        time_m: path.time_intervals(),
        velocity: if path.velocity.is_some() { VelocitySource::Analytic } else { VelocitySource::FiniteDifference },
        scheme: DerivativeScheme::default(),
    };
    report.length = report.partial(0, report.times.len() - 1);
    Ok(report)
}

// ---------------------------------------------------------------- time grids

/// `m + 1` uniform nodes on `[0, 1]`.
pub fn uniform_times(m: usize) -> Vec<f64> {
    (0..=m).map(|i| i as f64 / m as f64).collect()
}

fn check_t_min(t_min: f64) -> Result<()> {
    if !(t_min > 0.0 && t_min < 1.0) {
        return Err(Error::InvalidParameter(format!("t_min = {t_min} must lie in (0, 1)")));
    }
    Ok(())
}

/// Geometric grid from `t_min` to 1 with at least `m` intervals and ratio at
/// most [`GEOMETRIC_RATIO`].
pub fn geometric_times(t_min: f64, m: usize) -> Result<Vec<f64>> {
    check_t_min(t_min)?;
    let span = -t_min.ln();
    let m = m.max((span / GEOMETRIC_RATIO.ln()).ceil() as usize).max(1);
    let mut t: Vec<f64> = (0..=m).map(|i| (-span * (1.0 - i as f64 / m as f64)).exp()).collect();
    t[0] = t_min;
    t[m] = 1.0;
    Ok(t)
}

/// Geometric grid passing exactly through every breakpoint (each in
/// `(0, 1]`), with at least `per_decade` nodes per decade. The result always
/// ends at 1.
pub fn geometric_times_through(breakpoints: &[f64], per_decade: usize) -> Result<Vec<f64>> {
    let mut b: Vec<f64> = breakpoints.to_vec();
    b.push(1.0);
    b.sort_by(f64::total_cmp);
    b.dedup();
    check_t_min(b[0])?;
    let max_log_step = (10f64.ln() / per_decade.max(1) as f64).min(GEOMETRIC_RATIO.ln());
    let mut t = vec![b[0]];
    for w in b.windows(2) {
        let span = (w[1] / w[0]).ln();
        let k = (span / max_log_step).ceil().max(1.0) as usize;
        for i in 1..k {
            t.push(w[0] * (span * i as f64 / k as f64).exp());
        }
        t.push(w[1]);
    }
    Ok(t)
}

// -------------------------------------------------------------- constructors

fn build_frames(
    times: &[f64],
    grid: Grid,
    dim: usize,
    frame: impl Fn(f64, &mut [f64]) + Sync,
) -> Result<Vec<DiscreteCurve>> {
    times
        .par_iter()
        .map(|&t| {
            let mut s = vec![0.0; grid.len() * dim];
            frame(t, &mut s);
            DiscreteCurve::new(grid, dim, s).map_err(|e| match e {
                Error::NotAnImmersion(msg) => Error::PathLeftTheSpace(format!("frame at t = {t:.6e}: {msg}")),
                other => other,
            })
        })
        .collect()
}

fn fields(times: &[f64], grid: Grid, dim: usize, vel: impl Fn(f64, &mut [f64]) + Sync) -> Vec<TangentField> {
    times
        .par_iter()
        .map(|&t| {
            let mut s = vec![0.0; grid.len() * dim];
            vel(t, &mut s);
            TangentField::new(grid, dim, s).expect("shape is consistent")
        })
        .collect()
}

/// `t ↦ t·c` on a geometric grid from `t_min` to 1; velocity `c`.
pub fn shrink_path(c: &DiscreteCurve, t_min: f64, m: usize) -> Result<CurvePath> {
    shrink_path_on(c, geometric_times(t_min, m)?)
}

pub fn shrink_path_on(c: &DiscreteCurve, times: Vec<f64>) -> Result<CurvePath> {
    if !(times[0] > 0.0) {
        return Err(Error::InvalidParameter("shrink path needs t_min > 0".into()));
    }
    let (grid, dim, cs) = (c.grid(), c.dim(), c.samples());
    let frames = build_frames(&times, grid, dim, |t, out| {
        out.iter_mut().zip(cs).for_each(|(o, x)| *o = t * x);
    })?;
    let v = c.as_field();
    let velocity = vec![v; times.len()];
    let info = PathInfo::new("shrink", json!({"t_min": times[0], "curve_length": c.length()}));
    CurvePath::new(times, frames, Some(velocity), info)
}

/// `t ↦ c + t·v₀` on a uniform grid; velocity `v₀`.
pub fn translate_path(c: &DiscreteCurve, v0: &[f64], m: usize) -> Result<CurvePath> {
    if v0.len() != c.dim() {
        return Err(Error::GridMismatch(format!("v0 has {} components, curve has {}", v0.len(), c.dim())));
    }
    let times = uniform_times(m);
    let (grid, dim, cs) = (c.grid(), c.dim(), c.samples());
    let frames = build_frames(&times, grid, dim, |t, out| {
        for (j, o) in out.iter_mut().enumerate() {
            *o = cs[j] + t * v0[j % dim];
        }
    })?;
    let velocity = vec![TangentField::constant(grid, v0); times.len()];
    CurvePath::new(times, frames, Some(velocity), PathInfo::new("translate", json!({"v0": v0})))
}

/// Target rotation of a [`rotate_path`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Rotation {
    /// Angle `ϑ` in the plane.
    Planar(f64),
    /// Rotation by `angle` about `axis` in `R³`.
    AxisAngle { axis: [f64; 3], angle: f64 },
}

impl Rotation {
    pub fn angle(&self) -> f64 {
        match self {
            Rotation::Planar(a) => *a,
            Rotation::AxisAngle { angle, .. } => *angle,
        }
    }
}

/// `t ↦ A(t)c` with `A(t)` the constant-speed rotation from the identity
/// to `A`; velocity `A'(t)c`.
pub fn rotate_path(c: &DiscreteCurve, rotation: Rotation, m: usize) -> Result<CurvePath> {
    let times = uniform_times(m);
    let (grid, dim, cs) = (c.grid(), c.dim(), c.samples().to_vec());
    match (rotation, dim) {
        (Rotation::Planar(th), 2) => {
            let frames = build_frames(&times, grid, 2, |t, out| {
                let (s, co) = (t * th).sin_cos();
                for j in 0..grid.len() {
                    let (x, y) = (cs[2 * j], cs[2 * j + 1]);
                    out[2 * j] = co * x - s * y;
                    out[2 * j + 1] = s * x + co * y;
                }
            })?;
            let velocity = fields(&times, grid, 2, |t, out| {
                let (s, co) = (t * th).sin_cos();
                for j in 0..grid.len() {
                    let (x, y) = (cs[2 * j], cs[2 * j + 1]);
                    out[2 * j] = th * (-s * x - co * y);
                    out[2 * j + 1] = th * (co * x - s * y);
                }
            });
            CurvePath::new(times, frames, Some(velocity), PathInfo::new("rotate", json!({"angle": th})))
        }
        (Rotation::AxisAngle { axis, angle }, 3) => {
            let norm = axis.iter().map(|x| x * x).sum::<f64>().sqrt();
            if !(norm > 0.0) {
                return Err(Error::InvalidParameter("rotation axis must be non-zero".into()));
            }
            let k = axis.map(|x| x / norm);
            let rot = move |t: f64, p: [f64; 3]| -> [f64; 3] {
                let (s, co) = (t * angle).sin_cos();
                let kxp = cross(k, p);
                let kp = k[0] * p[0] + k[1] * p[1] + k[2] * p[2];
                [0, 1, 2].map(|i| p[i] * co + kxp[i] * s + k[i] * kp * (1.0 - co))
            };
            let at = |j: usize| [cs[3 * j], cs[3 * j + 1], cs[3 * j + 2]];
            let frames = build_frames(&times, grid, 3, |t, out| {
                for j in 0..grid.len() {
                    out[3 * j..3 * j + 3].copy_from_slice(&rot(t, at(j)));
                }
            })?;
            let velocity = fields(&times, grid, 3, |t, out| {
                for j in 0..grid.len() {
                    let v = cross(k, rot(t, at(j))).map(|x| angle * x);
                    out[3 * j..3 * j + 3].copy_from_slice(&v);
                }
            });
            let info = PathInfo::new("rotate", json!({"axis": k, "angle": angle}));
            CurvePath::new(times, frames, Some(velocity), info)
        }
        (_, d) => Err(Error::UnsupportedDimension(format!("rotation {rotation:?} in dimension {d}"))),
    }
}

fn cross(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]]
}

/// `t ↦ c(tθ)`; velocity `θ·c'(tθ)`.
pub fn shorten_path(c: &DiscreteCurve, t_min: f64, m: usize) -> Result<CurvePath> {
    power_shrink_shorten(c, 0.0, t_min, m)
}

/// `t ↦ t^α c(tθ)`; velocity `αt^{α−1}c(tθ) + t^α θ c'(tθ)`.
pub fn power_shrink_shorten(c: &DiscreteCurve, alpha: f64, t_min: f64, m: usize) -> Result<CurvePath> {
    check_t_min(t_min)?;
    power_shrink_shorten_on(c, alpha, geometric_times(t_min, m)?)
}

pub fn power_shrink_shorten_on(c: &DiscreteCurve, alpha: f64, times: Vec<f64>) -> Result<CurvePath> {
    if !(alpha >= 0.0) || !alpha.is_finite() {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must be non-negative")));
    }
    if !(times[0] > 0.0) {
        return Err(Error::InvalidParameter("shortening paths need t_min > 0".into()));
    }
    if !c.is_smooth() {
        return Err(Error::InsufficientRegularity(
            "shortening needs a curve flagged smooth (sampled from an analytic construction)".into(),
        ));
    }
    let (grid, dim) = (c.grid(), c.dim());
    let eval = c.evaluator();
    let frames = build_frames(&times, grid, dim, |t, out| {
        let scale = t.powf(alpha);
        for j in 0..grid.len() {
            let o = &mut out[j * dim..(j + 1) * dim];
            eval.point(t * grid.node(j), o);
            o.iter_mut().for_each(|x| *x *= scale);
        }
    })?;
    let velocity = fields(&times, grid, dim, |t, out| {
        let (scale, dscale) = (t.powf(alpha), if alpha == 0.0 { 0.0 } else { alpha * t.powf(alpha - 1.0) });
        let mut p = vec![0.0; dim];
        let mut q = vec![0.0; dim];
        for j in 0..grid.len() {
            let th = grid.node(j);
            eval.point(t * th, &mut p);
            eval.tangent(t * th, &mut q);
            for k in 0..dim {
                out[j * dim + k] = dscale * p[k] + scale * th * q[k];
            }
        }
    });
    let name = if alpha == 0.0 { "shorten" } else { "power-shrink-shorten" };
    let info = PathInfo::new(name, json!({"alpha": alpha, "t_min": times[0], "analytic_source": eval.is_analytic()}));
    CurvePath::new(times, frames, Some(velocity), info)
}

/// Smallest `|(1−τ)a + τb|` over `τ ∈ [0, 1]`.
fn segment_min_norm(a: &[f64], b: &[f64]) -> f64 {
    let d: Vec<f64> = b.iter().zip(a).map(|(x, y)| x - y).collect();
    let dd: f64 = d.iter().map(|x| x * x).sum();
    let tau = if dd > 0.0 { (-a.iter().zip(&d).map(|(x, y)| x * y).sum::<f64>() / dd).clamp(0.0, 1.0) } else { 0.0 };
    a.iter().zip(&d).map(|(x, y)| (x + tau * y).powi(2)).sum::<f64>().sqrt()
}

/// Checks that every frame of the linear interpolation between two sampled
/// curves is immersed, for all `τ ∈ [0, 1]` (not only at time nodes).
pub(crate) fn interpolation_stays_immersed(
    grid: &Grid,
    dim: usize,
    c0: &[f64],
    c1: &[f64],
    floor: f64,
) -> Option<usize> {
    let mut d0 = vec![0.0; c0.len()];
    let mut d1 = vec![0.0; c1.len()];
    differentiate(c0, dim, grid, &mut d0);
    differentiate(c1, dim, grid, &mut d1);
    (0..grid.len()).find(|&j| {
        let r = j * dim..(j + 1) * dim;
        !(segment_min_norm(&d0[r.clone()], &d1[r]) > floor)
    })
}

/// `τ ↦ (1−τ)c₀ + τc₁`; velocity `c₁ − c₀`.
pub fn linear_interpolation_path(c0: &DiscreteCurve, c1: &DiscreteCurve, m: usize) -> Result<CurvePath> {
    same_grid(&c0.grid(), &c1.grid())?;
    if c0.dim() != c1.dim() {
        return Err(Error::GridMismatch(format!("dimension {} vs {}", c0.dim(), c1.dim())));
    }
    let (grid, dim) = (c0.grid(), c0.dim());
    let floor = IMMERSION_FLOOR * c0.length().max(c1.length());
    if let Some(j) = interpolation_stays_immersed(&grid, dim, c0.samples(), c1.samples(), floor) {
        return Err(Error::PathLeftTheSpace(format!(
            "the interpolating curves lose immersion at node {j}: no path of immersions along the segment"
        )));
    }
    let times = uniform_times(m);
    let (a, b) = (c0.samples(), c1.samples());
    let frames = build_frames(&times, grid, dim, |t, out| {
        for (k, o) in out.iter_mut().enumerate() {
            *o = (1.0 - t) * a[k] + t * b[k];
        }
    })?;
    let v: Vec<f64> = a.iter().zip(b).map(|(x, y)| y - x).collect();
    let velocity = vec![TangentField::new(grid, dim, v)?; times.len()];
    CurvePath::new(times, frames, Some(velocity), PathInfo::new("linear-interpolation", Value::Null))
}

/// A scalar function of time sampled with its derivative.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalarSamples {
    pub values: Vec<f64>,
    pub derivatives: Vec<f64>,
}

impl ScalarSamples {
    pub fn from_fn(times: &[f64], f: impl Fn(f64) -> f64, df: impl Fn(f64) -> f64) -> Self {
        ScalarSamples {
            values: times.iter().map(|t| f(*t)).collect(),
            derivatives: times.iter().map(|t| df(*t)).collect(),
        }
    }

    pub fn zero(times: &[f64]) -> Self {
        ScalarSamples { values: vec![0.0; times.len()], derivatives: vec![0.0; times.len()] }
    }
}

/// `γ(t, θ) = (tθ + f(t), g(t))` in the plane; velocity `(θ + f'(t), g'(t))`.
pub fn example_path(grid: Grid, times: Vec<f64>, f: &ScalarSamples, g: &ScalarSamples) -> Result<CurvePath> {
    if !(times[0] > 0.0) {
        return Err(Error::InvalidParameter("example path needs t_min > 0".into()));
    }
    if f.values.len() != times.len() || g.values.len() != times.len() {
        return Err(Error::InvalidPath("profile samples do not match the time grid".into()));
    }
    let index = |t: f64| times.iter().position(|s| *s == t).expect("time node");
    let frames = build_frames(&times, grid, 2, |t, out| {
        let m = index(t);
        for j in 0..grid.len() {
            out[2 * j] = t * grid.node(j) + f.values[m];
            out[2 * j + 1] = g.values[m];
        }
    })?;
    let velocity = fields(&times, grid, 2, |t, out| {
        let m = index(t);
        for j in 0..grid.len() {
            out[2 * j] = grid.node(j) + f.derivatives[m];
            out[2 * j + 1] = g.derivatives[m];
        }
    });
    CurvePath::new(times, frames, Some(velocity), PathInfo::new("example", Value::Null))
}
