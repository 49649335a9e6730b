//! Geodesic-distance estimates: discrete path-energy minimization with fixed
//! endpoints, bracketed by the closed-form certificates.

use std::collections::VecDeque;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::json;

use crate::bounds::{delta_lower_with, rotate_upper, shrink_upper, translate_upper, BoundCertificate};
use crate::curve::{same_grid, DiscreteCurve, IMMERSION_FLOOR};
use crate::diffeo::{log_ratio_range, DiscreteDiffeo};
use crate::error::{Error, Result};
use crate::grid::{differentiate, node_norm, Grid};
use crate::metric::{quadratic_with_gradient, terms_flat, MetricCoefficients};
use crate::path::{
    interpolation_stays_immersed, linear_interpolation_path, path_length, uniform_times, CurvePath, PathInfo,
    MIN_TIME_INTERVALS_FD,
};

/// Tolerance of the bracket invariant `lower ≤ upper + BRACKET_SLACK`.
pub const BRACKET_SLACK: f64 = 1e-6;
/// Relative residual below which a curve counts as a straight line.
pub const STRAIGHT_TOL: f64 = 1e-8;

const LBFGS_MEMORY: usize = 10;
const STALL_WINDOW: usize = 10;
const MAX_HALVINGS: usize = 60;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct OptimizerOptions {
    pub max_iters: usize,
    /// Stop when the energy decreased by less than `tol` (relative) over the
    /// last ten iterations.
    pub tol: f64,
    /// Numbers of time intervals of the seed paths.
    pub seeds: Vec<usize>,
    /// Relative amplitude of a random perturbation of seed interiors.
    pub perturbation: f64,
    /// RNG seed for the perturbation.
    pub seed: u64,
}

impl Default for OptimizerOptions {
    fn default() -> Self {
        OptimizerOptions { max_iters: 5000, tol: 1e-8, seeds: vec![16, 32, 64], perturbation: 0.0, seed: 0 }
    }
}

/// The discrete energy `E = Σ_m Δτ_m G_{b_m}(v_m, v_m)` with midpoints
/// `b_m = (x_m + x_{m+1})/2` and difference quotients
/// `v_m = (x_{m+1} − x_m)/Δτ_m`, as a function of the interior frames.
#[derive(Debug, Clone)]
pub struct PathEnergy {
    grid: Grid,
    dim: usize,
    weights: Vec<f64>,
    times: Vec<f64>,
    start: Vec<f64>,
    end: Vec<f64>,
}

impl PathEnergy {
    pub fn new(path: &CurvePath, g: &MetricCoefficients) -> Self {
        PathEnergy {
            grid: path.grid(),
            dim: path.dim(),
            weights: g.weights().to_vec(),
            times: path.times().to_vec(),
            start: path.first().samples().to_vec(),
            end: path.last().samples().to_vec(),
        }
    }

    fn frame_len(&self) -> usize {
        self.grid.len() * self.dim
    }

    /// Number of free variables: the interior frames, concatenated.
    pub fn num_variables(&self) -> usize {
        (self.times.len() - 2) * self.frame_len()
    }

    /// Concatenated interior frames of a path.
    pub fn pack(path: &CurvePath) -> Vec<f64> {
        let f = path.frames();
        f[1..f.len() - 1].iter().flat_map(|c| c.samples().iter().copied()).collect()
    }

    fn frame<'a>(&'a self, x: &'a [f64], m: usize) -> &'a [f64] {
        let last = self.times.len() - 1;
        let k = self.frame_len();
        match m {
            0 => &self.start,
            _ if m == last => &self.end,
            _ => &x[(m - 1) * k..m * k],
        }
    }

    fn interval(&self, x: &[f64], m: usize) -> (f64, Vec<f64>, Vec<f64>) {
        let (a, b) = (self.frame(x, m), self.frame(x, m + 1));
        let dt = self.times[m + 1] - self.times[m];
        let mid = a.iter().zip(b).map(|(p, q)| 0.5 * (p + q)).collect();
        let vel = a.iter().zip(b).map(|(p, q)| (q - p) / dt).collect();
        (dt, mid, vel)
    }

    pub fn energy(&self, x: &[f64]) -> f64 {
        let n = self.weights.len() - 1;
        (0..self.times.len() - 1)
            .map(|m| {
                let (dt, mid, vel) = self.interval(x, m);
                let t = terms_flat(n, &self.grid, self.dim, &mid, &vel, None);
                dt * t.iter().zip(&self.weights).map(|(t, a)| a * t).sum::<f64>()
            })
            .sum()
    }

    /// Energy and its exact gradient.
    pub fn gradient(&self, x: &[f64]) -> (f64, Vec<f64>) {
        let k = self.frame_len();
        let last = self.times.len() - 1;
        let mut grad = vec![0.0; x.len()];
        let mut e = 0.0;
        let mut bar_b = vec![0.0; k];
        let mut bar_v = vec![0.0; k];
        for m in 0..last {
            let (dt, mid, vel) = self.interval(x, m);
            bar_b.iter_mut().for_each(|v| *v = 0.0);
            bar_v.iter_mut().for_each(|v| *v = 0.0);
            e += dt
                * quadratic_with_gradient(&self.weights, &self.grid, self.dim, &mid, &vel, dt, &mut bar_b, &mut bar_v);
            if m >= 1 {
                let g = &mut grad[(m - 1) * k..m * k];
                for i in 0..k {
                    g[i] += 0.5 * bar_b[i] - bar_v[i] / dt;
                }
            }
            if m + 1 < last {
                let g = &mut grad[m * k..(m + 1) * k];
                for i in 0..k {
                    g[i] += 0.5 * bar_b[i] + bar_v[i] / dt;
                }
            }
        }
        (e, grad)
    }

    fn frame_length(&self, f: &[f64]) -> f64 {
        let mut d = vec![0.0; f.len()];
        differentiate(f, self.dim, &self.grid, &mut d);
        let s: Vec<f64> = (0..self.grid.len()).map(|j| node_norm(&d, self.dim, j)).collect();
        self.grid.trapezoid(&s)
    }

    /// Every frame, and every curve on the segments between consecutive
    /// frames, stays above the immersion floor.
    pub fn is_feasible(&self, x: &[f64]) -> bool {
        if x.iter().any(|v| !v.is_finite()) {
            return false;
        }
        let lengths: Vec<f64> = (0..self.times.len()).map(|m| self.frame_length(self.frame(x, m))).collect();
        (0..self.times.len() - 1).all(|m| {
            let floor = IMMERSION_FLOOR * lengths[m].max(lengths[m + 1]);
            interpolation_stays_immersed(&self.grid, self.dim, self.frame(x, m), self.frame(x, m + 1), floor).is_none()
        })
    }

    fn unpack(&self, x: &[f64], info: PathInfo) -> Result<CurvePath> {
        let frames = (0..self.times.len())
            .map(|m| DiscreteCurve::new(self.grid, self.dim, self.frame(x, m).to_vec()))
            .collect::<Result<Vec<_>>>()?;
        CurvePath::new(self.times.clone(), frames, None, info)
    }
}

/// Per-run optimizer statistics.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OptimizerTrace {
    pub iterations: usize,
    pub initial_energy: f64,
    pub final_energy: f64,
    /// Energy after every accepted step (first entry: the seed).
    pub energies: Vec<f64>,
    pub rejected_immersion: usize,
    pub backtracks: usize,
    pub restarts: usize,
    pub converged: bool,
    pub stalled: bool,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Minimizes the discrete energy over the interior frames of `seed` by
/// L-BFGS with Armijo backtracking. Steps that push any frame (or any curve
/// between consecutive frames) below the immersion floor are rejected and
/// the step halved.
pub fn minimize_path_energy(
    seed: &CurvePath,
    g: &MetricCoefficients,
    opts: &OptimizerOptions,
) -> Result<(CurvePath, OptimizerTrace)> {
    if seed.time_intervals() < MIN_TIME_INTERVALS_FD {
        return Err(Error::InvalidPath(format!(
            "optimization needs at least {MIN_TIME_INTERVALS_FD} time intervals, got {}",
            seed.time_intervals()
        )));
    }
    let problem = PathEnergy::new(seed, g);
    let mut x = PathEnergy::pack(seed);
    let (mut e, mut grad) = problem.gradient(&x);
    let mut trace = OptimizerTrace {
        iterations: 0,
        initial_energy: e,
        final_energy: e,
        energies: vec![e],
        rejected_immersion: 0,
        backtracks: 0,
        restarts: 0,
        converged: false,
        stalled: false,
    };
    let mut memory: VecDeque<(Vec<f64>, Vec<f64>, f64)> = VecDeque::with_capacity(LBFGS_MEMORY);

    while trace.iterations < opts.max_iters {
        if e == 0.0 || grad.iter().all(|v| *v == 0.0) {
            trace.converged = true;
            break;
        }
        let n_hist = trace.energies.len();
        if n_hist > STALL_WINDOW {
            let past = trace.energies[n_hist - 1 - STALL_WINDOW];
            if past - e <= opts.tol * past {
                trace.converged = true;
                break;
            }
        }

        let mut accepted = None;
        for attempt in 0..2 {
            let dir = if attempt == 0 && !memory.is_empty() {
                two_loop(&grad, &memory)
            } else {
                grad.iter().map(|v| -v).collect()
            };
            let slope = dot(&grad, &dir);
            if !(slope < 0.0) {
                continue;
            }
            let mut step =
                if memory.is_empty() { (1.0 / dot(&grad, &grad).sqrt()).min(1.0) * rms(&x).max(1e-12) } else { 1.0 };
            for _ in 0..MAX_HALVINGS {
                let cand: Vec<f64> = x.iter().zip(&dir).map(|(a, d)| a + step * d).collect();
                if !problem.is_feasible(&cand) {
                    trace.rejected_immersion += 1;
                    step *= 0.5;
                    continue;
                }
                let ec = problem.energy(&cand);
                if ec <= e + 1e-4 * step * slope {
                    accepted = Some(cand);
                    break;
                }
                trace.backtracks += 1;
                step *= 0.5;
            }
            if accepted.is_some() {
                break;
            }
            memory.clear();
            trace.restarts += 1;
        }

        let Some(cand) = accepted else {
            trace.stalled = true;
            break;
        };
        let (ec, gc) = problem.gradient(&cand);
        if ec > e {
            // rounding in the line-search energy; keep the descent invariant
            trace.stalled = true;
            break;
        }
        let s: Vec<f64> = cand.iter().zip(&x).map(|(a, b)| a - b).collect();
        let y: Vec<f64> = gc.iter().zip(&grad).map(|(a, b)| a - b).collect();
        let sy = dot(&s, &y);
        if sy > 1e-300 {
            if memory.len() == LBFGS_MEMORY {
                memory.pop_front();
            }
            memory.push_back((s, y, 1.0 / sy));
        }
        x = cand;
        e = ec;
        grad = gc;
        trace.iterations += 1;
        trace.energies.push(e);
    }
    trace.final_energy = e;

    let mut info = seed.info().clone();
    info.parameters.insert("optimized".into(), json!(true));
    let path = if trace.iterations == 0 { seed.clone() } else { problem.unpack(&x, info)? };
    if path.first().samples() != seed.first().samples() || path.last().samples() != seed.last().samples() {
        return Err(Error::InvariantViolation("optimizer moved an endpoint frame".into()));
    }
    Ok((path, trace))
}

fn rms(x: &[f64]) -> f64 {
    (dot(x, x) / x.len().max(1) as f64).sqrt()
}

fn two_loop(grad: &[f64], memory: &VecDeque<(Vec<f64>, Vec<f64>, f64)>) -> Vec<f64> {
    let mut q: Vec<f64> = grad.to_vec();
    let mut alphas = Vec::with_capacity(memory.len());
    for (s, y, rho) in memory.iter().rev() {
        let a = rho * dot(s, &q);
        q.iter_mut().zip(y).for_each(|(q, y)| *q -= a * y);
        alphas.push(a);
    }
    let (s, y, _) = memory.back().unwrap();
    let gamma = dot(s, y) / dot(y, y);
    q.iter_mut().for_each(|v| *v *= gamma);
    for ((s, y, rho), a) in memory.iter().zip(alphas.iter().rev()) {
        let b = rho * dot(y, &q);
        q.iter_mut().zip(s).for_each(|(q, s)| *q += (a - b) * s);
    }
    q.iter_mut().for_each(|v| *v = -*v);
    q
}

/// One optimizer run from one seed path.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Candidate {
    pub time_m: usize,
    pub seed_kind: String,
    pub upper: f64,
    pub max_frame_length: f64,
    pub trace: OptimizerTrace,
}

/// A bracketed distance estimate.
#[derive(Debug, Clone, Serialize)]
pub struct GeodesicEstimate {
    /// Length of the best path found.
    pub upper: f64,
    pub lower: Option<BoundCertificate>,
    pub gap: Option<f64>,
    /// Largest frame length over all candidate paths (the `L̂` of `lower`).
    pub max_frame_length: f64,
    pub best: usize,
    pub candidates: Vec<Candidate>,
    #[serde(skip)]
    pub path: CurvePath,
}

fn constant_path(c: &DiscreteCurve, m: usize) -> Result<CurvePath> {
    CurvePath::new(uniform_times(m), vec![c.clone(); m + 1], None, PathInfo::new("constant", serde_json::Value::Null))
}

/// Sign of a scalar immersed curve (+1 increasing, −1 decreasing).
fn orientation_1d(c: &DiscreteCurve) -> f64 {
    (c.point(c.grid().intervals())[0] - c.point(0)[0]).signum()
}

/// The endpoint-fixing diffeo `(c − c(0))/(c(1) − c(0))` of a scalar curve.
pub fn normalized_diffeo(c: &DiscreteCurve) -> Result<DiscreteDiffeo> {
    if c.dim() != 1 {
        return Err(Error::UnsupportedDimension("only scalar curves are multiples of diffeos".into()));
    }
    let (a, b) = (c.point(0)[0], c.point(c.grid().intervals())[0]);
    DiscreteDiffeo::new(c.grid(), c.samples().iter().map(|x| (x - a) / (b - a)).collect())
}

/// Seed path: the linear interpolation when it stays immersed, else a
/// detour that interpolates the tangent directions along great circles.
pub fn seed_path(c0: &DiscreteCurve, c1: &DiscreteCurve, m: usize) -> Result<CurvePath> {
    match linear_interpolation_path(c0, c1, m) {
        Ok(p) => Ok(p),
        Err(Error::PathLeftTheSpace(_)) if c0.dim() >= 2 => detour_path(c0, c1, m),
        Err(e) => Err(e),
    }
}

fn detour_path(c0: &DiscreteCurve, c1: &DiscreteCurve, m: usize) -> Result<CurvePath> {
    let (grid, dim) = (c0.grid(), c0.dim());
    let (d0, d1) = (c0.derivative(), c1.derivative());
    let times = uniform_times(m);
    let nodes = grid.len();
    // unit directions and speeds at each node
    let split = |d: &[f64], j: usize| {
        let r = node_norm(d, dim, j);
        (r, d[j * dim..(j + 1) * dim].iter().map(|x| x / r).collect::<Vec<f64>>())
    };
    let mut prev_axis: Option<Vec<f64>> = None;
    let mut plan = Vec::with_capacity(nodes);
    for j in 0..nodes {
        let (r0, u0) = split(d0.samples(), j);
        let (r1, u1) = split(d1.samples(), j);
        let cos = dot(&u0, &u1).clamp(-1.0, 1.0);
        let omega = cos.acos();
        // w: unit vector orthogonal to u0 in the plane of rotation
        let mut w: Vec<f64> = u1.iter().zip(&u0).map(|(a, b)| a - cos * b).collect();
        let wn = dot(&w, &w).sqrt();
        if wn > 1e-12 {
            w.iter_mut().for_each(|x| *x /= wn);
        } else {
            w = match &prev_axis {
                Some(p) => p.clone(),
                None => {
                    let mut e = vec![0.0; dim];
                    let k = (0..dim).min_by(|a, b| u0[*a].abs().total_cmp(&u0[*b].abs())).unwrap();
                    e[k] = 1.0;
                    let proj = dot(&e, &u0);
                    let mut v: Vec<f64> = e.iter().zip(&u0).map(|(a, b)| a - proj * b).collect();
                    let vn = dot(&v, &v).sqrt();
                    v.iter_mut().for_each(|x| *x /= vn);
                    v
                }
            };
        }
        prev_axis = Some(w.clone());
        plan.push((r0, r1, u0, w, omega));
    }
    let mut frames = Vec::with_capacity(times.len());
    let integrate = |tau: f64| -> Vec<f64> {
        let mut d = vec![0.0; nodes * dim];
        for (j, (r0, r1, u0, w, omega)) in plan.iter().enumerate() {
            let r = r0.powf(1.0 - tau) * r1.powf(tau);
            let (s, c) = (tau * omega).sin_cos();
            for k in 0..dim {
                d[j * dim + k] = r * (c * u0[k] + s * w[k]);
            }
        }
        let mut out = vec![0.0; nodes * dim];
        for k in 0..dim {
            let comp: Vec<f64> = (0..nodes).map(|j| d[j * dim + k]).collect();
            for (j, v) in grid.cumulative_trapezoid(&comp).into_iter().enumerate() {
                out[j * dim + k] = v;
            }
        }
        out
    };
    let (p0, p1) = (integrate(0.0), integrate(1.0));
    for (i, &tau) in times.iter().enumerate() {
        let samples = if i == 0 {
            c0.samples().to_vec()
        } else if i == m {
            c1.samples().to_vec()
        } else {
            let p = integrate(tau);
            (0..p.len())
                .map(|k| p[k] + (1.0 - tau) * (c0.samples()[k] - p0[k]) + tau * (c1.samples()[k] - p1[k]))
                .collect()
        };
        frames.push(DiscreteCurve::new(grid, dim, samples).map_err(|e| match e {
            Error::NotAnImmersion(msg) => Error::PathLeftTheSpace(format!("detour seed at tau = {tau}: {msg}")),
            other => other,
        })?);
    }
    CurvePath::new(times, frames, None, PathInfo::new("detour", serde_json::Value::Null))
}

fn perturb(path: &CurvePath, amplitude: f64, seed: u64) -> Result<CurvePath> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = path.time_intervals();
    let mut frames = path.frames().to_vec();
    for (i, f) in frames.iter_mut().enumerate().take(m).skip(1) {
        let tau = path.times()[i];
        let scale = amplitude * f.length() * (std::f64::consts::PI * tau).sin();
        let s: Vec<f64> = f.samples().iter().map(|x| x + scale * rng.gen_range(-1.0..1.0)).collect();
        if let Ok(c) = DiscreteCurve::new(f.grid(), f.dim(), s) {
            *f = c;
        }
    }
    CurvePath::new(path.times().to_vec(), frames, None, path.info().clone())
}

/// Estimates `d_G(c₀, c₁)`: optimizes from one seed path per entry of
/// `opts.seeds` (in parallel) and keeps the shortest result. For scalar
/// curves with `a₂ > 0` the parametrization-gap lower bound is attached.
pub fn geodesic_estimate(
    c0: &DiscreteCurve,
    c1: &DiscreteCurve,
    g: &MetricCoefficients,
    opts: &OptimizerOptions,
) -> Result<GeodesicEstimate> {
    same_grid(&c0.grid(), &c1.grid())?;
    if c0.dim() != c1.dim() {
        return Err(Error::GridMismatch(format!("dimension {} vs {}", c0.dim(), c1.dim())));
    }
    if c0.dim() == 1 && orientation_1d(c0) != orientation_1d(c1) {
        return Err(Error::DisconnectedComponents(
            "orientation mismatch: increasing and decreasing scalar curves lie in different components; \
             no path of immersions connects them"
                .into(),
        ));
    }
    if opts.seeds.is_empty() || opts.seeds.iter().any(|m| *m < MIN_TIME_INTERVALS_FD) {
        return Err(Error::InvalidParameter(format!(
            "seed path sizes must be at least {MIN_TIME_INTERVALS_FD}, got {:?}",
            opts.seeds
        )));
    }

    let runs: Vec<Result<(CurvePath, Candidate)>> = opts
        .seeds
        .par_iter()
        .map(|&m| {
            if c0 == c1 {
                let p = constant_path(c0, m)?;
                let trace = OptimizerTrace {
                    iterations: 0,
                    initial_energy: 0.0,
                    final_energy: 0.0,
                    energies: vec![0.0],
                    rejected_immersion: 0,
                    backtracks: 0,
                    restarts: 0,
                    converged: true,
                    stalled: false,
                };
                let cand = Candidate {
                    time_m: m,
                    seed_kind: "constant".into(),
                    upper: 0.0,
                    max_frame_length: c0.length(),
                    trace,
                };
                return Ok((p, cand));
            }
            let mut seed = seed_path(c0, c1, m)?;
            let seed_kind = seed.info().constructor.clone();
            if opts.perturbation > 0.0 {
                seed = perturb(&seed, opts.perturbation, opts.seed.wrapping_add(m as u64))?;
            }
            let (path, trace) = minimize_path_energy(&seed, g, opts)?;
            let upper = path_length(&path, g)?.length;
            let cand = Candidate { time_m: m, seed_kind, upper, max_frame_length: path.max_frame_length(), trace };
            Ok((path, cand))
        })
        .collect();
    let mut paths = Vec::with_capacity(runs.len());
    let mut candidates = Vec::with_capacity(runs.len());
    for r in runs {
        let (p, c) = r?;
        paths.push(p);
        candidates.push(c);
    }
    let best = (0..candidates.len()).min_by(|a, b| candidates[*a].upper.total_cmp(&candidates[*b].upper)).unwrap();
    let upper = candidates[best].upper;
    let max_frame_length = candidates.iter().map(|c| c.max_frame_length).fold(0.0, f64::max);

    let lower = if c0.dim() == 1 && g.weight(2) > 0.0 {
        let (p0, p1) = (normalized_diffeo(c0)?, normalized_diffeo(c1)?);
        let delta = log_ratio_range(&p0.derivative(), &p1.derivative());
        Some(delta_lower_with(delta, g, max_frame_length)?)
    } else {
        None
    };
    if let Some(l) = &lower {
        if l.value > upper + BRACKET_SLACK {
            return Err(Error::InvariantViolation(format!("lower bound {} exceeds upper bound {upper}", l.value)));
        }
    }
    let gap = lower.as_ref().map(|l| upper - l.value);
    Ok(GeodesicEstimate { upper, lower, gap, max_frame_length, best, candidates, path: paths.swap_remove(best) })
}

/// A chain of certificates bounding the distance between two straight
/// lines.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ChainBound {
    pub value: f64,
    pub legs: Vec<BoundCertificate>,
}

/// Upper bound on `d_G(s₀, s₁)` for straight lines with the same
/// parametrization: translate the longer one to the origin, shrink it to
/// the shorter length, rotate (planar), translate into place.
pub fn chain_distance_bound(s0: &DiscreteCurve, s1: &DiscreteCurve, g: &MetricCoefficients) -> Result<ChainBound> {
    same_grid(&s0.grid(), &s1.grid())?;
    if s0.dim() != s1.dim() {
        return Err(Error::GridMismatch(format!("dimension {} vs {}", s0.dim(), s1.dim())));
    }
    let line = |c: &DiscreteCurve, which: &str| {
        c.as_straight_line(STRAIGHT_TOL)
            .ok_or_else(|| Error::NotASegment(format!("{which} curve is not a straight line")))
    };
    let (l0, l1) = (line(s0, "first")?, line(s1, "second")?);
    if s0 == s1 {
        return Ok(ChainBound { value: 0.0, legs: vec![] });
    }
    let dim = s0.dim();
    if dim == 1 && l0.direction[0] != l1.direction[0] {
        return Err(Error::DisconnectedComponents("scalar segments of opposite orientation".into()));
    }
    let mismatch = l0.sigma.iter().zip(&l1.sigma).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    if mismatch > STRAIGHT_TOL {
        return Err(Error::ParametrizationMismatch(format!(
            "the segments are parametrized differently (max deviation {mismatch:.3e})"
        )));
    }
    let ((big, lb), (small, ls)) =
        if s0.length() >= s1.length() { ((s0, &l0), (s1, &l1)) } else { ((s1, &l1), (s0, &l0)) };
    let norm = |v: &[f64]| v.iter().map(|x| x * x).sum::<f64>().sqrt();

    let mut legs = vec![translate_upper(g, big.length(), norm(&lb.start))?];
    if big.length() != small.length() {
        legs.push(shrink_upper(g, big.length())?);
    }
    let cos = dot(&lb.direction, &ls.direction).clamp(-1.0, 1.0);
    if cos < 1.0 {
        match dim {
            2 => {
                let sin = lb.direction[0] * ls.direction[1] - lb.direction[1] * ls.direction[0];
                let angle = sin.atan2(cos);
                let neg: Vec<f64> = ls.start.iter().map(|x| -x).collect();
                legs.push(rotate_upper(g, &small.translated(&neg)?, angle)?);
            }
            _ => return Err(Error::UnsupportedDimension(format!("no certified rotation bound in dimension {dim}"))),
        }
    }
    legs.push(translate_upper(g, small.length(), norm(&ls.start))?);
    Ok(ChainBound { value: legs.iter().map(|c| c.value).sum(), legs })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::Segment;
    use std::sync::Arc;

    fn seg(n: usize, start: Vec<f64>, dir: Vec<f64>) -> DiscreteCurve {
        DiscreteCurve::sample(Grid::new(n).unwrap(), Arc::new(Segment::new(start, dir))).unwrap()
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let grid = Grid::new(16).unwrap();
        let c0 = DiscreteCurve::new(grid, 2, grid.nodes().iter().flat_map(|&t| [t, 0.2 * t * t]).collect()).unwrap();
        let c1 = DiscreteCurve::new(grid, 2, grid.nodes().iter().flat_map(|&t| [0.5 * t, 0.3 + t]).collect()).unwrap();
        let path = linear_interpolation_path(&c0, &c1, 16).unwrap();
        let pe = PathEnergy::new(&path, &MetricCoefficients::default());
        let x = PathEnergy::pack(&path);
        let (e, g) = pe.gradient(&x);
        assert!((e - pe.energy(&x)).abs() < 1e-12 * e);
        for idx in [0, 7, 100, x.len() - 1] {
            let h = 1e-6;
            let mut p = x.clone();
            p[idx] += h;
            let mut q = x.clone();
            q[idx] -= h;
            let fd = (pe.energy(&p) - pe.energy(&q)) / (2.0 * h);
            assert!((fd - g[idx]).abs() <= 1e-5 * fd.abs().max(1e-3), "{idx}: {fd} {}", g[idx]);
        }
    }

    #[test]
    fn identical_endpoints_give_zero() {
        let c = seg(32, vec![0.0, 0.0], vec![1.0, 0.0]);
        let est = geodesic_estimate(&c, &c, &MetricCoefficients::default(), &OptimizerOptions::default()).unwrap();
        assert_eq!(est.upper, 0.0);
    }

    #[test]
    fn translation_is_nearly_optimal() {
        let c0 = seg(32, vec![0.0, 0.0], vec![1.0, 0.0]);
        let c1 = seg(32, vec![0.0, 1.0], vec![1.0, 0.0]);
        let g = MetricCoefficients::new(2, vec![1.0, 1.0, 1.0]).unwrap();
        let opts = OptimizerOptions { max_iters: 200, seeds: vec![16], ..Default::default() };
        let est = geodesic_estimate(&c0, &c1, &g, &opts).unwrap();
        assert!(est.upper <= 1.0 + 1e-3 && est.upper >= 1.0 - 1e-3, "{}", est.upper);
        assert!(est.lower.is_none());
    }

    #[test]
    fn energy_never_increases() {
        let grid = Grid::new(32).unwrap();
        let id = DiscreteDiffeo::identity(grid);
        let psi = DiscreteDiffeo::exp_family(grid, 1.0).unwrap();
        let c0 = DiscreteCurve::from_diffeo(&id, 0.2).unwrap();
        let c1 = DiscreteCurve::from_diffeo(&psi, 0.2).unwrap();
        let seed = linear_interpolation_path(&c0, &c1, 16).unwrap();
        let opts = OptimizerOptions { max_iters: 100, ..Default::default() };
        let (p, trace) = minimize_path_energy(&seed, &MetricCoefficients::default(), &opts).unwrap();
        assert!(trace.energies.windows(2).all(|w| w[1] <= w[0]));
        assert!(trace.final_energy < trace.initial_energy);
        assert_eq!(p.first().samples(), c0.samples());
        assert_eq!(p.last().samples(), c1.samples());
    }

    #[test]
    fn scalar_orientations_are_disconnected() {
        let up = seg(16, vec![0.0], vec![1.0]);
        let down = seg(16, vec![1.0], vec![-1.0]);
        let err =
            geodesic_estimate(&up, &down, &MetricCoefficients::default(), &OptimizerOptions::default()).unwrap_err();
        assert_eq!(err.tag(), "disconnected-components");
    }

    #[test]
    fn detour_seed_for_reversed_planar_segment() {
        let c0 = seg(32, vec![0.0, 0.0], vec![1.0, 0.0]);
        let c1 = seg(32, vec![1.0, 0.0], vec![-1.0, 0.0]);
        let p = seed_path(&c0, &c1, 16).unwrap();
        assert_eq!(p.info().constructor, "detour");
        assert_eq!(p.last().samples(), c1.samples());
    }

    #[test]
    fn chain_bounds() {
        let g = MetricCoefficients::default();
        let a = seg(64, vec![0.0, 0.0], vec![0.01, 0.0]);
        let b = seg(64, vec![0.0, 0.0], vec![0.005, 0.0]);
        assert_eq!(chain_distance_bound(&a, &a, &g).unwrap().value, 0.0);
        let v = chain_distance_bound(&a, &b, &g).unwrap().value;
        assert!(v <= 4.0 * 0.01f64.sqrt() * 1.01, "{v}");
        let bent =
            DiscreteCurve::sample(Grid::new(64).unwrap(), Arc::new(crate::curve::CircleArc::unit_speed())).unwrap();
        assert_eq!(chain_distance_bound(&a, &bent, &g).unwrap_err().tag(), "not-a-segment");
        let grid = Grid::new(64).unwrap();
        let warped = DiscreteCurve::from_diffeo(&DiscreteDiffeo::exp_family(grid, 1.0).unwrap(), 0.3).unwrap();
        let straight = DiscreteCurve::from_diffeo(&DiscreteDiffeo::identity(grid), 0.1).unwrap();
        assert_eq!(chain_distance_bound(&warped, &straight, &g).unwrap_err().tag(), "parametrization-mismatch");
    }
}
