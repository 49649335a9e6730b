//! Discrete curves and tangent fields, the calculus on them, and the analytic
//! curves they are usually sampled from.

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::Serialize;

use crate::diffeo::DiscreteDiffeo;
use crate::error::{Error, Result};
use crate::grid::{differentiate, node_norm, Grid};
use crate::interp::MonotoneCubic;

/// Relative immersion floor: a curve counts as immersed when
/// `min_j |Dc_j| > IMMERSION_FLOOR * ℓ_c`.
pub const IMMERSION_FLOOR: f64 = 1e-8;

/// An analytic parametrized curve `[0, 1] → R^d`.
pub trait SmoothCurve: Send + Sync + fmt::Debug {
    fn dim(&self) -> usize;
    fn point(&self, theta: f64, out: &mut [f64]);
    /// Derivative with respect to `theta`.
    fn tangent(&self, theta: f64, out: &mut [f64]);
    fn describe(&self) -> String;
}

/// `c(θ) = start + θ·direction`.
#[derive(Debug, Clone)]
pub struct Segment {
    pub start: Vec<f64>,
    pub direction: Vec<f64>,
}

impl Segment {
    pub fn new(start: Vec<f64>, direction: Vec<f64>) -> Self {
        assert_eq!(start.len(), direction.len());
        Segment { start, direction }
    }

    /// The unit segment `θ ↦ θ·e₁` in `R^d`.
    pub fn unit(dim: usize) -> Self {
        let mut direction = vec![0.0; dim];
        direction[0] = 1.0;
        Segment { start: vec![0.0; dim], direction }
    }
}

impl SmoothCurve for Segment {
    fn dim(&self) -> usize {
        self.start.len()
    }
    fn point(&self, theta: f64, out: &mut [f64]) {
        for ((o, s), v) in out.iter_mut().zip(&self.start).zip(&self.direction) {
            *o = s + theta * v;
        }
    }
    fn tangent(&self, _theta: f64, out: &mut [f64]) {
        out.copy_from_slice(&self.direction);
    }
    fn describe(&self) -> String {
        format!("segment(start={:?}, direction={:?})", self.start, self.direction)
    }
}

/// Planar arc `c(θ) = center + r·(cos(φ₀ + sθ), sin(φ₀ + sθ))`.
#[derive(Debug, Clone)]
pub struct CircleArc {
    pub center: [f64; 2],
    pub radius: f64,
    pub start_angle: f64,
    pub sweep: f64,
}

impl CircleArc {
    /// `θ ↦ (cos θ, sin θ)`: the unit-speed arc of angle one.
    pub fn unit_speed() -> Self {
        CircleArc { center: [0.0, 0.0], radius: 1.0, start_angle: 0.0, sweep: 1.0 }
    }

    /// `θ ↦ r·(cos 2πθ, sin 2πθ)`.
    pub fn full(radius: f64) -> Self {
        CircleArc { center: [0.0, 0.0], radius, start_angle: 0.0, sweep: 2.0 * PI }
    }
}

impl SmoothCurve for CircleArc {
    fn dim(&self) -> usize {
        2
    }
    fn point(&self, theta: f64, out: &mut [f64]) {
        let (s, c) = (self.start_angle + self.sweep * theta).sin_cos();
        out[0] = self.center[0] + self.radius * c;
        out[1] = self.center[1] + self.radius * s;
    }
    fn tangent(&self, theta: f64, out: &mut [f64]) {
        let (s, c) = (self.start_angle + self.sweep * theta).sin_cos();
        let w = self.radius * self.sweep;
        out[0] = -w * s;
        out[1] = w * c;
    }
    fn describe(&self) -> String {
        format!(
            "circle-arc(center={:?}, radius={}, start_angle={}, sweep={})",
            self.center, self.radius, self.start_angle, self.sweep
        )
    }
}

type PointFn = dyn Fn(f64, &mut [f64]) + Send + Sync;

/// A curve given by a pair of closures (point and tangent).
#[derive(Clone)]
pub struct FnCurve {
    dim: usize,
    name: String,
    point: Arc<PointFn>,
    tangent: Arc<PointFn>,
}

impl FnCurve {
    pub fn new(
        dim: usize,
        name: impl Into<String>,
        point: impl Fn(f64, &mut [f64]) + Send + Sync + 'static,
        tangent: impl Fn(f64, &mut [f64]) + Send + Sync + 'static,
    ) -> Self {
        FnCurve { dim, name: name.into(), point: Arc::new(point), tangent: Arc::new(tangent) }
    }
}

impl fmt::Debug for FnCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "FnCurve({})", self.name)
    }
}

impl SmoothCurve for FnCurve {
    fn dim(&self) -> usize {
        self.dim
    }
    fn point(&self, theta: f64, out: &mut [f64]) {
        (self.point)(theta, out)
    }
    fn tangent(&self, theta: f64, out: &mut [f64]) {
        (self.tangent)(theta, out)
    }
    fn describe(&self) -> String {
        self.name.clone()
    }
}

/// `λ·c + v` for an analytic `c`.
#[derive(Debug, Clone)]
struct Affine {
    inner: Arc<dyn SmoothCurve>,
    scale: f64,
    offset: Vec<f64>,
}

impl SmoothCurve for Affine {
    fn dim(&self) -> usize {
        self.inner.dim()
    }
    fn point(&self, theta: f64, out: &mut [f64]) {
        self.inner.point(theta, out);
        for (o, v) in out.iter_mut().zip(&self.offset) {
            *o = self.scale * *o + v;
        }
    }
    fn tangent(&self, theta: f64, out: &mut [f64]) {
        self.inner.tangent(theta, out);
        out.iter_mut().for_each(|o| *o *= self.scale);
    }
    fn describe(&self) -> String {
        format!("{} * {} + {:?}", self.scale, self.inner.describe(), self.offset)
    }
}

/// Grid samples of a vector field along a curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TangentField {
    grid: Grid,
    dim: usize,
    samples: Vec<f64>,
}

impl TangentField {
    pub fn new(grid: Grid, dim: usize, samples: Vec<f64>) -> Result<Self> {
        check_shape(&grid, dim, samples.len())?;
        Ok(TangentField { grid, dim, samples })
    }

    pub fn zeros(grid: Grid, dim: usize) -> Self {
        TangentField { grid, dim, samples: vec![0.0; grid.len() * dim] }
    }

    /// The constant field `h ≡ v`.
    pub fn constant(grid: Grid, v: &[f64]) -> Self {
        let samples = (0..grid.len()).flat_map(|_| v.iter().copied()).collect();
        TangentField { grid, dim: v.len(), samples }
    }

    pub fn from_fn(grid: Grid, dim: usize, f: impl Fn(f64, &mut [f64])) -> Self {
        let mut samples = vec![0.0; grid.len() * dim];
        for j in 0..grid.len() {
            f(grid.node(j), &mut samples[j * dim..(j + 1) * dim]);
        }
        TangentField { grid, dim, samples }
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }
    pub fn at(&self, j: usize) -> &[f64] {
        &self.samples[j * self.dim..(j + 1) * self.dim]
    }

    /// Discrete `∂_θ h`.
    pub fn derivative(&self) -> TangentField {
        let mut out = vec![0.0; self.samples.len()];
        differentiate(&self.samples, self.dim, &self.grid, &mut out);
        TangentField { grid: self.grid, dim: self.dim, samples: out }
    }

    pub fn scaled(&self, lambda: f64) -> TangentField {
        let samples = self.samples.iter().map(|x| lambda * x).collect();
        TangentField { samples, ..self.clone() }
    }

    /// `h ∘ φ`, by shape-preserving interpolation.
    pub fn reparametrize(&self, phi: &DiscreteDiffeo) -> Result<TangentField> {
        same_grid(&self.grid, &phi.grid())?;
        let p = MonotoneCubic::new(self.grid, self.dim, &self.samples);
        let mut samples = vec![0.0; self.samples.len()];
        for (j, x) in phi.samples().iter().enumerate() {
            p.eval_into(*x, &mut samples[j * self.dim..(j + 1) * self.dim]);
        }
        Ok(TangentField { samples, ..self.clone() })
    }
}

/// Grid samples of an immersed curve.
///
/// Every constructor checks the immersion floor; a `DiscreteCurve` value is
/// always immersed.
#[derive(Clone)]
pub struct DiscreteCurve {
    grid: Grid,
    dim: usize,
    samples: Vec<f64>,
    source: Option<Arc<dyn SmoothCurve>>,
    smooth: bool,
    length: f64,
}

impl fmt::Debug for DiscreteCurve {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("DiscreteCurve")
            .field("intervals", &self.grid.intervals())
            .field("dim", &self.dim)
            .field("length", &self.length)
            .field("source", &self.source.as_ref().map(|s| s.describe()))
            .field("smooth", &self.smooth)
            .finish()
    }
}

impl PartialEq for DiscreteCurve {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.dim == other.dim && self.samples == other.samples
    }
}

impl DiscreteCurve {
    /// Wraps raw node-major samples. The result is not flagged smooth.
    pub fn new(grid: Grid, dim: usize, samples: Vec<f64>) -> Result<Self> {
        check_shape(&grid, dim, samples.len())?;
        let length = immersion_check(&grid, dim, &samples)?;
        Ok(DiscreteCurve { grid, dim, samples, source: None, smooth: false, length })
    }

    /// Samples an analytic curve; the result is flagged smooth and keeps the
    /// source for exact reparametrization.
    pub fn sample(grid: Grid, curve: Arc<dyn SmoothCurve>) -> Result<Self> {
        let dim = curve.dim();
        let mut samples = vec![0.0; grid.len() * dim];
        for j in 0..grid.len() {
            curve.point(grid.node(j), &mut samples[j * dim..(j + 1) * dim]);
        }
        let mut c = Self::new(grid, dim, samples)?;
        c.source = Some(curve);
        c.smooth = true;
        Ok(c)
    }

    /// Scalar curve `θ ↦ λ·φ(θ)` in `R¹`.
    pub fn from_diffeo(phi: &DiscreteDiffeo, lambda: f64) -> Result<Self> {
        let samples = phi.samples().iter().map(|x| lambda * x).collect();
        let mut c = Self::new(phi.grid(), 1, samples)?;
        c.smooth = phi.is_analytic();
        Ok(c)
    }

    /// Marks the samples as coming from a construction with enough
    /// regularity for shortening paths.
    pub fn with_smooth_flag(mut self, smooth: bool) -> Self {
        self.smooth = smooth;
        self
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
    pub fn point(&self, j: usize) -> &[f64] {
        &self.samples[j * self.dim..(j + 1) * self.dim]
    }
    pub fn is_smooth(&self) -> bool {
        self.smooth
    }
    pub fn source(&self) -> Option<&Arc<dyn SmoothCurve>> {
        self.source.as_ref()
    }

    /// `ℓ_c`, trapezoid quadrature of `|Dc|`.
    pub fn length(&self) -> f64 {
        self.length
    }

    /// The curve samples viewed as a tangent field (the field `h = c`).
    pub fn as_field(&self) -> TangentField {
        TangentField { grid: self.grid, dim: self.dim, samples: self.samples.clone() }
    }

    pub fn derivative(&self) -> TangentField {
        self.as_field().derivative()
    }

    /// Nodewise speed `|Dc_j|`.
    pub fn speed(&self) -> Vec<f64> {
        let d = self.derivative();
        (0..self.grid.len()).map(|j| node_norm(d.samples(), self.dim, j)).collect()
    }

    /// `λ·c`.
    pub fn scaled(&self, lambda: f64) -> Result<Self> {
        self.affine(lambda, &vec![0.0; self.dim])
    }

    /// `c + v`.
    pub fn translated(&self, v: &[f64]) -> Result<Self> {
        self.affine(1.0, v)
    }

    fn affine(&self, lambda: f64, v: &[f64]) -> Result<Self> {
        if v.len() != self.dim {
            return Err(Error::GridMismatch(format!("offset has {} components, curve has {}", v.len(), self.dim)));
        }
        let samples =
            self.samples.chunks(self.dim).flat_map(|p| p.iter().zip(v).map(|(x, o)| lambda * x + o)).collect();
        let mut c = Self::new(self.grid, self.dim, samples)?;
        c.smooth = self.smooth;
        c.source = self
            .source
            .as_ref()
            .map(|s| Arc::new(Affine { inner: s.clone(), scale: lambda, offset: v.to_vec() }) as Arc<dyn SmoothCurve>);
        Ok(c)
    }

    /// Evaluates the curve off the grid: analytically when the source is
    /// known, else by shape-preserving interpolation.
    pub fn evaluator(&self) -> CurveEvaluator {
        match &self.source {
            Some(s) => CurveEvaluator::Analytic(s.clone()),
            None => CurveEvaluator::Interpolated(MonotoneCubic::new(self.grid, self.dim, &self.samples)),
        }
    }

    /// Returns the straight-line decomposition `c_j = p + ℓ·σ_j·u` when the
    /// curve is a segment (residual below `tol·ℓ`), else `None`.
    pub fn as_straight_line(&self, tol: f64) -> Option<StraightLine> {
        let n = self.grid.intervals();
        let p = self.point(0).to_vec();
        let chord: Vec<f64> = self.point(n).iter().zip(&p).map(|(a, b)| a - b).collect();
        let span = chord.iter().map(|x| x * x).sum::<f64>().sqrt();
        if span == 0.0 {
            return None;
        }
        let u: Vec<f64> = chord.iter().map(|x| x / span).collect();
        let mut sigma = Vec::with_capacity(self.grid.len());
        for j in 0..=n {
            let r: Vec<f64> = self.point(j).iter().zip(&p).map(|(a, b)| a - b).collect();
            let along: f64 = r.iter().zip(&u).map(|(a, b)| a * b).sum();
            let off = r.iter().zip(&u).map(|(a, b)| (a - along * b).powi(2)).sum::<f64>().sqrt();
            if off > tol * self.length {
                return None;
            }
            sigma.push(along / span);
        }
        // an immersed curve on a line is monotone along it, so span = ℓ up to quadrature
        Some(StraightLine { start: p, direction: u, length: span, sigma })
    }
}

/// `c_j = start + length·σ_j·direction`, with `σ` increasing from 0 to 1.
#[derive(Debug, Clone, PartialEq)]
pub struct StraightLine {
    pub start: Vec<f64>,
    pub direction: Vec<f64>,
    pub length: f64,
    pub sigma: Vec<f64>,
}

/// Off-grid evaluation of a curve and its derivative.
#[derive(Debug)]
pub enum CurveEvaluator {
    Analytic(Arc<dyn SmoothCurve>),
    Interpolated(MonotoneCubic),
}

impl CurveEvaluator {
    pub fn point(&self, theta: f64, out: &mut [f64]) {
        match self {
            CurveEvaluator::Analytic(s) => s.point(theta, out),
            CurveEvaluator::Interpolated(p) => p.eval_into(theta, out),
        }
    }
    pub fn tangent(&self, theta: f64, out: &mut [f64]) {
        match self {
            CurveEvaluator::Analytic(s) => s.tangent(theta, out),
            CurveEvaluator::Interpolated(p) => p.derivative_into(theta, out),
        }
    }
    pub fn is_analytic(&self) -> bool {
        matches!(self, CurveEvaluator::Analytic(_))
    }
}

fn check_shape(grid: &Grid, dim: usize, len: usize) -> Result<()> {
    if dim == 0 {
        return Err(Error::InvalidParameter("dimension must be at least 1".into()));
    }
    if len != grid.len() * dim {
        return Err(Error::GridMismatch(format!("{len} values do not fill {} nodes of dimension {dim}", grid.len())));
    }
    Ok(())
}

pub(crate) fn same_grid(a: &Grid, b: &Grid) -> Result<()> {
    if a != b {
        return Err(Error::GridMismatch(format!("N={} vs N={}", a.intervals(), b.intervals())));
    }
    Ok(())
}

fn paired(c: &DiscreteCurve, h: &TangentField) -> Result<()> {
    same_grid(&c.grid, &h.grid)?;
    if c.dim != h.dim {
        return Err(Error::GridMismatch(format!("curve dimension {} vs field dimension {}", c.dim, h.dim)));
    }
    Ok(())
}

/// Checks the immersion floor and returns the length.
fn immersion_check(grid: &Grid, dim: usize, samples: &[f64]) -> Result<f64> {
    if samples.iter().any(|x| !x.is_finite()) {
        return Err(Error::NotAnImmersion("non-finite sample".into()));
    }
    let mut d = vec![0.0; samples.len()];
    differentiate(samples, dim, grid, &mut d);
    let speed: Vec<f64> = (0..grid.len()).map(|j| node_norm(&d, dim, j)).collect();
    let length = grid.trapezoid(&speed);
    let (j, min) =
        speed.iter().copied().enumerate().fold((0, f64::INFINITY), |a, (j, s)| if s < a.1 { (j, s) } else { a });
    if !(length > 0.0) || !(min > IMMERSION_FLOOR * length) {
        return Err(Error::NotAnImmersion(format!(
            "|Dc| = {min:.3e} at node {j} is below the floor {:.3e}",
            IMMERSION_FLOOR * length
        )));
    }
    Ok(length)
}

/// `ℓ_c = ∫|c'| dθ`.
pub fn curve_length(c: &DiscreteCurve) -> f64 {
    c.length()
}

/// `∇_∂s h = Dh / |Dc|`.
pub fn arclength_derivative(c: &DiscreteCurve, h: &TangentField) -> Result<TangentField> {
    paired(c, h)?;
    let speed = c.speed();
    let mut dh = h.derivative();
    for (j, s) in speed.iter().enumerate() {
        dh.samples[j * c.dim..(j + 1) * c.dim].iter_mut().for_each(|x| *x /= s);
    }
    Ok(dh)
}

/// `√(∫⟨h,h⟩|c'| dθ)`.
pub fn l2ds_norm(c: &DiscreteCurve, h: &TangentField) -> Result<f64> {
    paired(c, h)?;
    let speed = c.speed();
    let vals: Vec<f64> = (0..c.grid.len()).map(|j| node_norm(&h.samples, h.dim, j).powi(2) * speed[j]).collect();
    Ok(c.grid.trapezoid(&vals).sqrt())
}

/// `c ∘ φ`. Uses the analytic source when present, shape-preserving
/// interpolation of the samples otherwise.
pub fn reparametrize(c: &DiscreteCurve, phi: &DiscreteDiffeo) -> Result<DiscreteCurve> {
    same_grid(&c.grid, &phi.grid())?;
    if phi.samples().iter().any(|x| !(0.0..=1.0).contains(x)) {
        return Err(Error::DomainViolation("diffeo samples leave [0, 1]".into()));
    }
    let eval = c.evaluator();
    let d = c.dim;
    let mut samples = vec![0.0; c.samples.len()];
    for (j, x) in phi.samples().iter().enumerate() {
        let out = &mut samples[j * d..(j + 1) * d];
        if *x == c.grid.node(j) {
            out.copy_from_slice(c.point(j));
        } else {
            eval.point(*x, out);
        }
    }
    let mut r = DiscreteCurve::new(c.grid, d, samples)?;
    r.smooth = c.smooth;
    Ok(r)
}

/// Reparametrizes `c` to constant speed; returns `c ∘ ψ` and `ψ`.
pub fn constant_speed(c: &DiscreteCurve) -> Result<(DiscreteCurve, DiscreteDiffeo)> {
    let speed = match &c.source {
        Some(s) => {
            let mut t = vec![0.0; c.dim];
            (0..c.grid.len())
                .map(|j| {
                    s.tangent(c.grid.node(j), &mut t);
                    t.iter().map(|x| x * x).sum::<f64>().sqrt()
                })
                .collect()
        }
        None => c.speed(),
    };
    let mut s = c.grid.cumulative_trapezoid(&speed);
    let total = *s.last().unwrap();
    s.iter_mut().for_each(|x| *x /= total);
    *s.last_mut().unwrap() = 1.0;
    let arclength = DiscreteDiffeo::new(c.grid, s)?;
    let psi = arclength.invert()?;
    Ok((reparametrize(c, &psi)?, psi))
}

/// Both sides of `‖u‖_∞ ≤ ‖u‖_{L²} + ‖u'‖_{L²}` for `u = c' − d'`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SupNormCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

pub fn sobolev_sup_check(c: &DiscreteCurve, d: &DiscreteCurve) -> Result<SupNormCheck> {
    same_grid(&c.grid, &d.grid)?;
    if c.dim != d.dim {
        return Err(Error::GridMismatch(format!("dimension {} vs {}", c.dim, d.dim)));
    }
    let diff: Vec<f64> = c.samples.iter().zip(&d.samples).map(|(a, b)| a - b).collect();
    let u = TangentField { grid: c.grid, dim: c.dim, samples: diff }.derivative();
    let du = u.derivative();
    let n = c.grid.len();
    let lhs = (0..n).map(|j| node_norm(&u.samples, c.dim, j)).fold(0.0, f64::max);
    let sq = |f: &TangentField| {
        let v: Vec<f64> = (0..n).map(|j| node_norm(&f.samples, c.dim, j).powi(2)).collect();
        c.grid.trapezoid(&v).sqrt()
    };
    let rhs = sq(&u) + sq(&du);
    Ok(SupNormCheck { lhs, rhs, holds: lhs <= rhs })
}
