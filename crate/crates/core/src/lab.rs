//! Experiment drivers: Cauchy diagnostics for vanishing sequences,
//! separation tables, exponent-threshold scans and limit identification.
//!
//! Every driver returns an [`ExperimentReport`]: a table whose columns name
//! the operation that produced them, least-squares fits, and verdicts that
//! can be recomputed from the table alone.

use std::collections::BTreeMap;
use std::f64::consts::TAU;
use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::bounds::{separation_delta_with, BoundCertificate};
use crate::curve::{CircleArc, DiscreteCurve};
use crate::diffeo::{delta, DiscreteDiffeo, Orientation};
use crate::error::{Error, Result};
use crate::geodesic::{chain_distance_bound, geodesic_estimate, OptimizerOptions, BRACKET_SLACK};
use crate::grid::{DerivativeScheme, Grid};
use crate::metric::MetricCoefficients;
use crate::path::{
    geometric_times, geometric_times_through, linear_interpolation_path, path_length, power_shrink_shorten_on,
    shrink_path_on, CurvePath,
};
use crate::svg::LineChart;

pub const MIN_SCHEDULE: usize = 5;
/// Minimum number of points in any fit.
pub const MIN_FIT_POINTS: usize = 4;
/// R² needed to call a power-law decay.
pub const DECAY_R2: f64 = 0.95;
/// R² needed to call logarithmic (or power) growth.
pub const GROWTH_R2: f64 = 0.99;
/// Smallest increment exponent still counted as convergent.
pub const P_MIN: f64 = 0.01;
/// Relative size of increments treated as exact zeros.
pub const ZERO_TOL: f64 = 1e-12;
/// Distances at or below this count as numerically zero (second
/// differences amplify roundoff on tiny curves).
pub const NUMERICAL_ZERO: f64 = 1e-9;
/// Probe points per decade used by the threshold classifier.
pub const PROBES_PER_DECADE: usize = 4;
/// Time nodes per decade for paths through a schedule (the geometric ratio
/// cap usually dominates).
const PER_DECADE: usize = 40;

/// `start · 2^{-k}` for `k = 0..points`.
pub fn default_schedule(start: f64, points: usize) -> Vec<f64> {
    (0..points).map(|k| start * 0.5f64.powi(k as i32)).collect()
}

fn check_schedule(s: &[f64], what: &str) -> Result<()> {
    if s.len() < MIN_SCHEDULE {
        return Err(Error::InvalidParameter(format!("{what} needs at least {MIN_SCHEDULE} entries, got {}", s.len())));
    }
    if s.iter().any(|x| !(x.is_finite() && *x > 0.0)) || s.windows(2).any(|w| !(w[1] < w[0])) {
        return Err(Error::InvalidParameter(format!("{what} must be positive and strictly decreasing")));
    }
    Ok(())
}

// ------------------------------------------------------------------ specs

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SequenceFamily {
    /// `c_m = v_m + R(r_m)·ℓ_m φ_m e₁`
    StraightLine,
    /// `c_m(θ) = c(ℓ_m θ)`
    ShortenedCurve,
    /// `c_m(θ) = ℓ_m^α c(ℓ_m θ)`
    PowerShrinkShorten,
    /// `c_m(θ) = ℓ_m (cos 2πθ, sin 2πθ)`
    VanishingCircles,
}

impl SequenceFamily {
    pub fn name(self) -> &'static str {
        match self {
            SequenceFamily::StraightLine => "straight-line",
            SequenceFamily::ShortenedCurve => "shortened-curve",
            SequenceFamily::PowerShrinkShorten => "power-shrink-shorten",
            SequenceFamily::VanishingCircles => "vanishing-circles",
        }
    }
}

/// A sequence of curves indexed by a decreasing schedule `ℓ_m`.
#[derive(Debug, Clone)]
pub struct SequenceSpec {
    pub family: SequenceFamily,
    pub schedule: Vec<f64>,
    pub grid: Grid,
    pub dim: usize,
    /// Straight lines: one diffeo for all members, or one per member.
    pub phis: Vec<DiscreteDiffeo>,
    /// Straight lines: translations `v_m` (empty = none).
    pub translations: Vec<Vec<f64>>,
    /// Straight lines in the plane: rotation angles `r_m` (empty = none).
    pub rotations: Vec<f64>,
    /// Base curve of the shortening families.
    pub base: Option<DiscreteCurve>,
    pub alpha: f64,
}

impl SequenceSpec {
    pub fn straight_line(phi: DiscreteDiffeo, dim: usize, schedule: Vec<f64>) -> Self {
        SequenceSpec {
            family: SequenceFamily::StraightLine,
            schedule,
            grid: phi.grid(),
            dim,
            phis: vec![phi],
            translations: vec![],
            rotations: vec![],
            base: None,
            alpha: 0.0,
        }
    }

    pub fn with_diffeos(mut self, phis: Vec<DiscreteDiffeo>) -> Self {
        self.phis = phis;
        self
    }

    pub fn with_translations(mut self, v: Vec<Vec<f64>>) -> Self {
        self.translations = v;
        self
    }

    pub fn with_rotations(mut self, r: Vec<f64>) -> Self {
        self.rotations = r;
        self
    }

    pub fn shortened_curve(base: DiscreteCurve, schedule: Vec<f64>) -> Self {
        Self::power_shrink_shorten(base, 0.0, schedule).family(SequenceFamily::ShortenedCurve)
    }

    pub fn power_shrink_shorten(base: DiscreteCurve, alpha: f64, schedule: Vec<f64>) -> Self {
        SequenceSpec {
            family: SequenceFamily::PowerShrinkShorten,
            schedule,
            grid: base.grid(),
            dim: base.dim(),
            phis: vec![],
            translations: vec![],
            rotations: vec![],
            base: Some(base),
            alpha,
        }
    }

    pub fn vanishing_circles(grid: Grid, schedule: Vec<f64>) -> Self {
        SequenceSpec {
            family: SequenceFamily::VanishingCircles,
            schedule,
            grid,
            dim: 2,
            phis: vec![],
            translations: vec![],
            rotations: vec![],
            base: None,
            alpha: 0.0,
        }
    }

    fn family(mut self, f: SequenceFamily) -> Self {
        self.family = f;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_schedule(&self.schedule, "the schedule")?;
        let n = self.schedule.len();
        match self.family {
            SequenceFamily::StraightLine => {
                if self.dim == 0 {
                    return Err(Error::InvalidParameter("dimension must be positive".into()));
                }
                if self.phis.len() != 1 && self.phis.len() != n {
                    return Err(Error::InvalidParameter(format!(
                        "give one diffeo or one per member ({n}), got {}",
                        self.phis.len()
                    )));
                }
                if self.phis.iter().any(|p| p.grid() != self.grid) {
                    return Err(Error::GridMismatch("diffeos live on different grids".into()));
                }
                if !self.translations.is_empty()
                    && (self.translations.len() != n || self.translations.iter().any(|v| v.len() != self.dim))
                {
                    return Err(Error::InvalidParameter(format!("need {n} translations of dimension {}", self.dim)));
                }
                if !self.rotations.is_empty() {
                    if self.dim != 2 {
                        return Err(Error::UnsupportedDimension("rotations r_m are planar".into()));
                    }
                    if self.rotations.len() != n {
                        return Err(Error::InvalidParameter(format!("need {n} rotation angles")));
                    }
                }
                if self.dim == 1 {
                    let o = self.phis[0].orientation();
                    if self.phis.iter().any(|p| p.orientation() != o) {
                        return Err(Error::DisconnectedComponents(
                            "members of opposite orientation lie in different components of the scalar curve space"
                                .into(),
                        ));
                    }
                }
            }
            SequenceFamily::ShortenedCurve | SequenceFamily::PowerShrinkShorten => {
                let base = self.base.as_ref().ok_or_else(|| Error::InvalidParameter("base curve missing".into()))?;
                if !base.is_smooth() {
                    return Err(Error::InsufficientRegularity("the base curve must be flagged smooth".into()));
                }
                if !(self.alpha >= 0.0 && self.alpha.is_finite()) {
                    return Err(Error::InvalidParameter(format!("alpha = {} must be non-negative", self.alpha)));
                }
                if self.schedule[0] > 1.0 {
                    return Err(Error::DomainViolation("shortening parameters must lie in (0, 1]".into()));
                }
            }
            SequenceFamily::VanishingCircles => {
                if self.schedule[0] > 1.0 {
                    return Err(Error::DomainViolation(
                        "radii are measured against the unit circle: need r ≤ 1".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    /// The curves `c_m`.
    pub fn members(&self) -> Result<Vec<DiscreteCurve>> {
        self.validate()?;
        (0..self.schedule.len()).map(|m| self.member(m)).collect()
    }

    fn member(&self, m: usize) -> Result<DiscreteCurve> {
        let l = self.schedule[m];
        let grid = self.grid;
        match self.family {
            SequenceFamily::StraightLine => {
                let phi = &self.phis[if self.phis.len() == 1 { 0 } else { m }];
                let (cos, sin) = self.rotations.get(m).map_or((1.0, 0.0), |r| (r.cos(), r.sin()));
                let mut s = vec![0.0; grid.len() * self.dim];
                for j in 0..grid.len() {
                    let x = l * phi.samples()[j];
                    let p = &mut s[j * self.dim..(j + 1) * self.dim];
                    p[0] = x * cos;
                    if self.dim >= 2 {
                        p[1] = x * sin;
                    }
                    if let Some(v) = self.translations.get(m) {
                        p.iter_mut().zip(v).for_each(|(a, b)| *a += b);
                    }
                }
                DiscreteCurve::new(grid, self.dim, s)
            }
            SequenceFamily::ShortenedCurve | SequenceFamily::PowerShrinkShorten => {
                let base = self.base.as_ref().expect("validated");
                let eval = base.evaluator();
                let scale = l.powf(self.alpha);
                let mut s = vec![0.0; grid.len() * self.dim];
                for j in 0..grid.len() {
                    let p = &mut s[j * self.dim..(j + 1) * self.dim];
                    eval.point(l * grid.node(j), p);
                    p.iter_mut().for_each(|x| *x *= scale);
                }
                DiscreteCurve::new(grid, self.dim, s)
            }
            SequenceFamily::VanishingCircles => unit_circle(grid)?.scaled(l),
        }
    }
}

fn unit_circle(grid: Grid) -> Result<DiscreteCurve> {
    DiscreteCurve::sample(
        grid,
        std::sync::Arc::new(CircleArc { center: [0.0, 0.0], radius: 1.0, start_angle: 0.0, sweep: TAU }),
    )
}

// ---------------------------------------------------------------- reports

/// A table column together with the operation that produced it.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Column {
    pub name: String,
    pub source: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FitModel {
    /// `ln y = intercept + slope · ln x`
    PowerLaw,
    /// `y = intercept + slope · ln(1/x)`
    Logarithmic,
    /// `ln y = intercept + slope · ln(1/x)`
    PowerGrowth,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Fit {
    pub name: String,
    pub model: FitModel,
    /// Column of the abscissa.
    pub x: String,
    /// Column of the ordinate.
    pub y: String,
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub claim: String,
    pub verdict: String,
    pub detail: String,
}

/// Which columns to draw, for [`ExperimentReport::plot`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PlotSpec {
    pub title: String,
    pub x: String,
    pub y: Vec<String>,
    /// One series per distinct value of this column (with a single `y`).
    pub group_by: Option<String>,
    pub log_x: bool,
    pub log_y: bool,
    pub y_label: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentReport {
    pub experiment: String,
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Option<f64>>>,
    pub fits: Vec<Fit>,
    pub verdicts: Vec<Verdict>,
    pub parameters: Value,
    /// Runtime information; excluded from the CSV so tables stay
    /// reproducible.
    pub metadata: BTreeMap<String, Value>,
    pub plot: Option<PlotSpec>,
}

impl ExperimentReport {
    fn new(experiment: &str, columns: &[(&str, &str)], parameters: Value) -> Self {
        ExperimentReport {
            experiment: experiment.into(),
            columns: columns.iter().map(|(n, s)| Column { name: (*n).into(), source: (*s).into() }).collect(),
            rows: vec![],
            fits: vec![],
            verdicts: vec![],
            parameters,
            metadata: BTreeMap::new(),
            plot: None,
        }
    }

    fn finish(mut self, started: Instant, grid: Option<Grid>) -> Self {
        self.metadata.insert("runtime_seconds".into(), json!(started.elapsed().as_secs_f64()));
        self.metadata.insert("lib_version".into(), json!(env!("CARGO_PKG_VERSION")));
        self.metadata.insert("derivative_scheme".into(), json!(DerivativeScheme::default().to_string()));
        if let Some(g) = grid {
            self.metadata.insert("grid_n".into(), json!(g.intervals()));
        }
        self
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c.name == name)
    }

    /// Values of a column, one per row.
    pub fn column(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.column_index(name)?;
        Some(self.rows.iter().map(|r| r[k]).collect())
    }

    pub fn verdict(&self, claim: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.claim == claim)
    }

    pub fn fit(&self, name: &str) -> Option<&Fit> {
        self.fits.iter().find(|f| f.name == name)
    }

    fn verdict_push(&mut self, claim: &str, verdict: &str, detail: String) {
        self.verdicts.push(Verdict { claim: claim.into(), verdict: verdict.into(), detail });
    }

    /// RFC-4180 table; `extra` columns are appended to every row.
    pub fn write_csv<W: std::io::Write>(&self, w: W, extra: &[(&str, &str)]) -> Result<()> {
        let mut out = csv::Writer::from_writer(w);
        let header: Vec<&str> =
            self.columns.iter().map(|c| c.name.as_str()).chain(extra.iter().map(|(k, _)| *k)).collect();
        out.write_record(&header)?;
        for r in &self.rows {
            let rec: Vec<String> = r
                .iter()
                .map(|v| v.map(|x| format!("{x:.16e}")).unwrap_or_default())
                .chain(extra.iter().map(|(_, v)| (*v).to_string()))
                .collect();
            out.write_record(&rec)?;
        }
        out.flush()?;
        Ok(())
    }

    /// Renders the report's plot, if it has one.
    pub fn plot(&self) -> Option<String> {
        let p = self.plot.as_ref()?;
        let xs = self.column(&p.x)?;
        let mut chart = LineChart::new(&p.title, &p.x, &p.y_label);
        chart.log_x = p.log_x;
        chart.log_y = p.log_y;
        let collect = |ys: &[Option<f64>], keep: &dyn Fn(usize) -> bool| -> Vec<(f64, f64)> {
            xs.iter()
                .zip(ys)
                .enumerate()
                .filter(|(i, _)| keep(*i))
                .filter_map(|(_, (x, y))| Some(((*x)?, (*y)?)))
                .collect()
        };
        match &p.group_by {
            Some(g) => {
                let groups = self.column(g)?;
                let ys = self.column(&p.y[0])?;
                let mut keys: Vec<f64> = groups.iter().flatten().copied().collect();
                keys.sort_by(f64::total_cmp);
                keys.dedup();
                for key in keys {
                    let pts = collect(&ys, &|i| groups[i] == Some(key));
                    chart.add(&format!("{g} = {key}"), pts);
                }
            }
            None => {
                for y in &p.y {
                    let ys = self.column(y)?;
                    chart.add(y, collect(&ys, &|_| true));
                }
            }
        }
        Some(chart.render())
    }
}

// ------------------------------------------------------------------- fits

/// Ordinary least squares `y ≈ a + b x`; returns `(b, a, R²)`.
pub fn least_squares(x: &[f64], y: &[f64]) -> (f64, f64, f64) {
    let n = x.len() as f64;
    let (mx, my) = (x.iter().sum::<f64>() / n, y.iter().sum::<f64>() / n);
    let sxx: f64 = x.iter().map(|v| (v - mx).powi(2)).sum();
    let sxy: f64 = x.iter().zip(y).map(|(a, b)| (a - mx) * (b - my)).sum();
    let slope = if sxx > 0.0 { sxy / sxx } else { 0.0 };
    let intercept = my - slope * mx;
    let ss_tot: f64 = y.iter().map(|v| (v - my).powi(2)).sum();
    let ss_res: f64 = x.iter().zip(y).map(|(a, b)| (b - intercept - slope * a).powi(2)).sum();
    let r2 = if ss_tot > 0.0 {
        1.0 - ss_res / ss_tot
    } else if ss_res == 0.0 {
        1.0
    } else {
        0.0
    };
    (slope, intercept, r2)
}

fn fit(name: &str, model: FitModel, xc: &str, yc: &str, x: &[f64], y: &[f64]) -> Fit {
    let (tx, ty): (Vec<f64>, Vec<f64>) = match model {
        FitModel::PowerLaw => (x.iter().map(|v| v.ln()).collect(), y.iter().map(|v| v.ln()).collect()),
        FitModel::Logarithmic => (x.iter().map(|v| -v.ln()).collect(), y.to_vec()),
        FitModel::PowerGrowth => (x.iter().map(|v| -v.ln()).collect(), y.iter().map(|v| v.ln()).collect()),
    };
    let (slope, intercept, r_squared) = least_squares(&tx, &ty);
    Fit { name: name.into(), model, x: xc.into(), y: yc.into(), slope, intercept, r_squared, points: x.len() }
}

/// Outcome of testing `y → 0` along a schedule `x → 0`.
#[derive(Debug, Clone, PartialEq)]
enum Decay {
    IdenticallyZero,
    Decays(Fit),
    NoDecay(Option<Fit>),
}

fn decay(name: &str, xc: &str, yc: &str, x: &[f64], y: &[f64]) -> Decay {
    if !y.is_empty() && y.iter().all(|v| v.abs() <= NUMERICAL_ZERO) {
        return Decay::IdenticallyZero;
    }
    if y.len() < MIN_FIT_POINTS || y.iter().any(|v| !(*v > 0.0)) {
        return Decay::NoDecay(None);
    }
    let f = fit(name, FitModel::PowerLaw, xc, yc, x, y);
    if f.slope > 0.0 && f.r_squared >= DECAY_R2 {
        Decay::Decays(f)
    } else {
        Decay::NoDecay(Some(f))
    }
}

fn describe(d: &Decay) -> String {
    match d {
        Decay::IdenticallyZero => format!("all values ≤ {NUMERICAL_ZERO:e}"),
        Decay::Decays(f) => format!("∝ x^{:.4} (R² = {:.4}, {} points)", f.slope, f.r_squared, f.points),
        Decay::NoDecay(Some(f)) => {
            format!("no decay: exponent {:.4}, R² = {:.4} over {} points", f.slope, f.r_squared, f.points)
        }
        Decay::NoDecay(None) => format!("fewer than {MIN_FIT_POINTS} positive values"),
    }
}

fn push_fit(report: &mut ExperimentReport, d: &Decay) {
    if let Decay::Decays(f) | Decay::NoDecay(Some(f)) = d {
        report.fits.push(f.clone());
    }
}

// -------------------------------------------------------- Cauchy diagnostic

/// Bounds on `d_G(c_m, c_{m+1})` along a sequence and the lengths `ℓ_{c_m}`.
pub fn run_cauchy_diagnostic(spec: &SequenceSpec, g: &MetricCoefficients) -> Result<ExperimentReport> {
    let started = Instant::now();
    let members = spec.members()?;
    let s = &spec.schedule;
    let n = s.len();
    let source = match spec.family {
        SequenceFamily::StraightLine => "chain_distance_bound(c_m, c_{m+1})",
        SequenceFamily::ShortenedCurve | SequenceFamily::PowerShrinkShorten => {
            "path_length(power_shrink_shorten over [ℓ_{m+1}, ℓ_m])"
        }
        SequenceFamily::VanishingCircles => "path_length(shrink_path of the unit circle over [r_{m+1}, r_m])",
    };
    let mut report = ExperimentReport::new(
        "cauchy-diagnostic",
        &[("m", "index"), ("ell", "schedule"), ("curve_length", "curve_length(c_m)"), ("consecutive_bound", source)],
        json!({
            "family": spec.family.name(),
            "schedule": s,
            "alpha": spec.alpha,
            "translations": spec.translations,
            "rotations": spec.rotations,
            "dim": spec.dim,
            "coefficients": g,
        }),
    );

    let bounds: Vec<f64> = match spec.family {
        SequenceFamily::StraightLine => (0..n - 1)
            .into_par_iter()
            .map(|m| chain_distance_bound(&members[m], &members[m + 1], g).map(|b| b.value))
            .collect::<Result<_>>()?,
        SequenceFamily::ShortenedCurve | SequenceFamily::PowerShrinkShorten => {
            let base = spec.base.as_ref().expect("validated");
            let path = power_shrink_shorten_on(base, spec.alpha, geometric_times_through(s, PER_DECADE)?)?;
            segment_lengths(&path, s, g)?
        }
        SequenceFamily::VanishingCircles => {
            let path = shrink_path_on(&unit_circle(spec.grid)?, geometric_times_through(s, PER_DECADE)?)?;
            segment_lengths(&path, s, g)?
        }
    };
    for m in 0..n {
        report.rows.push(vec![Some(m as f64), Some(s[m]), Some(members[m].length()), bounds.get(m).copied()]);
    }

    let xb = &s[..n - 1];
    let cauchy = decay("consecutive-bound-decay", "ell", "consecutive_bound", xb, &bounds);
    push_fit(&mut report, &cauchy);
    let lengths: Vec<f64> = members.iter().map(|c| c.length()).collect();
    let vanish = decay("curve-length-decay", "ell", "curve_length", s, &lengths);
    push_fit(&mut report, &vanish);

    let verdict = if spec.family == SequenceFamily::VanishingCircles {
        "unknown"
    } else if matches!(cauchy, Decay::Decays(_) | Decay::IdenticallyZero) {
        "cauchy-consistent"
    } else {
        "inconclusive"
    };
    let detail = describe(&cauchy);
    report.verdict_push("cauchy", verdict, format!("consecutive bounds {detail}"));
    let v = if matches!(vanish, Decay::Decays(_)) { "vanishes" } else { "inconclusive" };
    report.verdict_push(
        "curve-length",
        v,
        format!("ℓ_(c_m) {}: a sequence whose length tends to 0 has no limit among immersions", describe(&vanish)),
    );
    report.plot = Some(PlotSpec {
        title: format!("consecutive distance bounds, {}", spec.family.name()),
        x: "ell".into(),
        y: vec!["consecutive_bound".into(), "curve_length".into()],
        group_by: None,
        log_x: true,
        log_y: true,
        y_label: "bound / length".into(),
    });
    Ok(report.finish(started, Some(spec.grid)))
}

/// Lengths of a path between consecutive schedule points (all of which
/// are time nodes).
fn segment_lengths(path: &CurvePath, s: &[f64], g: &MetricCoefficients) -> Result<Vec<f64>> {
    let rep = path_length(path, g)?;
    let idx = |v: f64| {
        rep.times
            .iter()
            .position(|t| *t == v)
            .ok_or_else(|| Error::InvariantViolation(format!("schedule point {v} is not a time node")))
    };
    s.windows(2).map(|w| Ok(rep.partial(idx(w[1])?, idx(w[0])?))).collect()
}

// ------------------------------------------------------------- separation

/// Distance estimates between `ℓ_m φ` and `ℓ_m ψ` against the separation
/// constant `δ = Δ√a₂/(2√L̂)`, and chain bounds along `ℓ_m ψ`.
pub fn run_separation_experiment(
    phi: &DiscreteDiffeo,
    psi: &DiscreteDiffeo,
    g: &MetricCoefficients,
    schedule: &[f64],
    opts: &OptimizerOptions,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    check_schedule(schedule, "the schedule")?;
    if g.weight(2) <= 0.0 {
        return Err(Error::InapplicableCertificate("the separation constant needs a₂ > 0".into()));
    }
    if phi.orientation() != Orientation::EndpointFixing || psi.orientation() != Orientation::EndpointFixing {
        return Err(Error::OrientationMismatch("separation compares endpoint-fixing diffeos".into()));
    }
    let big_delta = delta(phi, psi)?;
    let n = schedule.len();

    let estimates = schedule
        .par_iter()
        .map(|&l| {
            let c0 = DiscreteCurve::from_diffeo(phi, l)?;
            let c1 = DiscreteCurve::from_diffeo(psi, l)?;
            geodesic_estimate(&c0, &c1, g, opts)
        })
        .collect::<Result<Vec<_>>>()?;
    let psis = schedule.iter().map(|&l| DiscreteCurve::from_diffeo(psi, l)).collect::<Result<Vec<_>>>()?;
    let chains = (0..n - 1)
        .into_par_iter()
        .map(|m| chain_distance_bound(&psis[m], &psis[m + 1], g).map(|b| b.value))
        .collect::<Result<Vec<_>>>()?;

    let l_hat = estimates.iter().map(|e| e.max_frame_length).fold(0.0, f64::max);
    let sep: BoundCertificate = separation_delta_with(big_delta, g, l_hat)?;
    let mut report = ExperimentReport::new(
        "separation",
        &[
            ("m", "index"),
            ("ell", "schedule"),
            ("upper", "geodesic_estimate(ℓ_m φ, ℓ_m ψ).upper"),
            ("lower", "delta_lower(Δ, G, L̂_m) attached to the estimate"),
            ("max_frame_length", "geodesic_estimate(...).max_frame_length (L̂_m)"),
            ("separation_delta", "separation_delta(Δ, G, L̂ = max_m L̂_m)"),
            ("chain_bound_psi", "chain_distance_bound(ℓ_m ψ, ℓ_{m+1} ψ)"),
        ],
        json!({
            "schedule": schedule,
            "delta": big_delta,
            "l_hat": l_hat,
            "coefficients": g,
            "optimizer": opts,
            "separation_certificate": sep,
        }),
    );
    for (m, e) in estimates.iter().enumerate() {
        report.rows.push(vec![
            Some(m as f64),
            Some(schedule[m]),
            Some(e.upper),
            Some(e.lower.as_ref().map_or(0.0, |c| c.value)),
            Some(e.max_frame_length),
            Some(sep.value),
            chains.get(m).copied(),
        ]);
    }
    report.metadata.insert(
        "optimizer_iterations".into(),
        json!(estimates
            .iter()
            .map(|e| e.candidates.iter().map(|c| c.trace.iterations).collect::<Vec<_>>())
            .collect::<Vec<_>>()),
    );
    report.metadata.insert(
        "optimizer_converged".into(),
        json!(estimates
            .iter()
            .map(|e| e.candidates.iter().map(|c| c.trace.converged).collect::<Vec<_>>())
            .collect::<Vec<_>>()),
    );

    let lowers: Vec<f64> = estimates.iter().map(|e| e.lower.as_ref().map_or(0.0, |c| c.value)).collect();
    let uppers: Vec<f64> = estimates.iter().map(|e| e.upper).collect();
    let min_lower = lowers.iter().copied().fold(f64::INFINITY, f64::min);
    let min_upper = uppers.iter().copied().fold(f64::INFINITY, f64::min);
    let separated = min_lower >= sep.value - 1e-9 && min_upper > sep.value;
    report.verdict_push(
        "separation",
        if separated { "separated" } else { "not-separated" },
        format!("δ = {:.6e}; min lower = {min_lower:.6e}; min upper = {min_upper:.6e}", sep.value),
    );
    let bracket_ok = lowers.iter().zip(&uppers).all(|(l, u)| *l <= u + BRACKET_SLACK);
    report.verdict_push(
        "bracket",
        if bracket_ok { "consistent" } else { "violated" },
        "lower ≤ upper on every row".into(),
    );
    let chain = decay("chain-bound-decay", "ell", "chain_bound_psi", &schedule[..n - 1], &chains);
    push_fit(&mut report, &chain);
    let v =
        if matches!(chain, Decay::Decays(_) | Decay::IdenticallyZero) { "cauchy-consistent" } else { "inconclusive" };
    report.verdict_push(
        "chain",
        v,
        format!("chain bounds {}; last = {:.6e}", describe(&chain), chains.last().copied().unwrap_or(f64::NAN)),
    );
    report.plot = Some(PlotSpec {
        title: "distance bracket vs scale".into(),
        x: "ell".into(),
        y: vec!["upper".into(), "lower".into(), "separation_delta".into(), "chain_bound_psi".into()],
        group_by: None,
        log_x: true,
        log_y: true,
        y_label: "distance".into(),
    });
    Ok(report.finish(started, Some(phi.grid())))
}

// --------------------------------------------------------- threshold scan

/// Classification of `ε ↦ L(ε)`, the length over `[ε, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Trend {
    FiniteTrend,
    DivergentTrend,
    Inconclusive,
}

impl Trend {
    pub fn name(self) -> &'static str {
        match self {
            Trend::FiniteTrend => "finite-trend",
            Trend::DivergentTrend => "divergent-trend",
            Trend::Inconclusive => "inconclusive",
        }
    }
}

/// Classifies lengths `L_k` at decreasing `ε_k` from the increments
/// `I_k = L_{k+1} − L_k`: geometric decay of increments (exponent ≥
/// [`P_MIN`]) is finite; non-decaying positive increments with a good
/// logarithmic or power fit of `L` are divergent.
pub fn classify_lengths(eps: &[f64], lengths: &[f64], tag: &str) -> (Trend, Vec<Fit>) {
    let inc: Vec<f64> = lengths.windows(2).map(|w| w[1] - w[0]).collect();
    let x_inc = &eps[1..];
    let mut fits = vec![];
    if inc.len() < MIN_FIT_POINTS - 1 {
        return (Trend::Inconclusive, fits);
    }
    let scale = lengths.iter().fold(1.0f64, |a, b| a.max(b.abs()));
    if inc.iter().all(|i| i.abs() <= ZERO_TOL * scale) {
        return (Trend::FiniteTrend, fits);
    }
    let log_fit = fit(&format!("log-growth {tag}"), FitModel::Logarithmic, "epsilon", "length", eps, lengths);
    fits.push(log_fit.clone());
    if inc.iter().any(|i| !(*i > 0.0)) {
        return (Trend::Inconclusive, fits);
    }
    let inc_fit = fit(&format!("increments {tag}"), FitModel::PowerLaw, "epsilon", "increment", x_inc, &inc);
    fits.push(inc_fit.clone());
    if inc_fit.slope >= P_MIN && inc_fit.r_squared >= DECAY_R2 {
        return (Trend::FiniteTrend, fits);
    }
    let pow_fit = fit(&format!("power-growth {tag}"), FitModel::PowerGrowth, "epsilon", "length", eps, lengths);
    fits.push(pow_fit.clone());
    if inc_fit.slope < P_MIN && (log_fit.r_squared > GROWTH_R2 || pow_fit.r_squared > GROWTH_R2) {
        return (Trend::DivergentTrend, fits);
    }
    (Trend::Inconclusive, fits)
}

/// `1/(2n − 3)`.
pub fn threshold_exponent(g: &MetricCoefficients) -> f64 {
    1.0 / (2.0 * g.order() as f64 - 3.0)
}

/// Geometric probe points from `hi` down to `lo` with
/// [`PROBES_PER_DECADE`] per decade, always containing both ends.
fn probes(hi: f64, lo: f64) -> Vec<f64> {
    let decades = (hi / lo).log10();
    let k = ((decades * PROBES_PER_DECADE as f64).round() as usize).max(1);
    let mut p: Vec<f64> = (0..=k).map(|i| hi * (lo / hi).powf(i as f64 / k as f64)).collect();
    p[0] = hi;
    p[k] = lo;
    p
}

/// Lengths of `t ↦ t^α c(tθ)` over `[ε, 1]` for every `(α, ε)`.
pub fn run_threshold_scan(
    c: &DiscreteCurve,
    g: &MetricCoefficients,
    alphas: &[f64],
    epsilons: &[f64],
) -> Result<ExperimentReport> {
    let started = Instant::now();
    if !c.is_smooth() {
        return Err(Error::InsufficientRegularity("the threshold scan needs a curve flagged smooth".into()));
    }
    if alphas.is_empty() || alphas.iter().any(|a| !(*a >= 0.0 && a.is_finite())) {
        return Err(Error::InvalidParameter("alphas must be non-negative".into()));
    }
    let mut requested = epsilons.to_vec();
    requested.sort_by(|a, b| b.total_cmp(a));
    requested.dedup();
    if requested.len() < MIN_FIT_POINTS - 1 + 1 || requested.iter().any(|e| !(*e > 0.0 && *e < 1.0)) {
        return Err(Error::InvalidParameter(format!("need at least {MIN_FIT_POINTS} distinct epsilons in (0, 1)")));
    }
    let mut eps = probes(requested[0], requested[requested.len() - 1]);
    eps.extend(&requested);
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup_by(|a, b| (*a / *b - 1.0).abs() < 1e-12);
    let times = geometric_times_through(&eps, PER_DECADE)?;

    let results = alphas
        .par_iter()
        .map(|&alpha| {
            let path = power_shrink_shorten_on(c, alpha, times.clone())?;
            let rep = path_length(&path, g)?;
            eps.iter()
                .map(|e| {
                    let i = rep
                        .times
                        .iter()
                        .position(|t| t == e)
                        .ok_or_else(|| Error::InvariantViolation(format!("ε = {e} is not a time node")))?;
                    Ok(rep.length_from(i))
                })
                .collect::<Result<Vec<f64>>>()
        })
        .collect::<Result<Vec<_>>>()?;

    let thr = threshold_exponent(g);
    let mut report = ExperimentReport::new(
        "threshold-scan",
        &[
            ("alpha", "parameter"),
            ("epsilon", "parameter"),
            ("requested", "1 if ε was requested, 0 for classifier probes"),
            ("length", "path_length(power_shrink_shorten(c, α) over [ε, 1])"),
            ("increment", "length(ε_k) − length(ε_{k−1})"),
        ],
        json!({
            "alphas": alphas,
            "epsilons": requested,
            "probes_per_decade": PROBES_PER_DECADE,
            "threshold": thr,
            "coefficients": g,
            "curve": c.source().map(|s| s.describe()),
        }),
    );
    let mut trends = vec![];
    for (a, lengths) in alphas.iter().zip(&results) {
        for (k, e) in eps.iter().enumerate() {
            let is_req = requested.iter().any(|r| (r / e - 1.0).abs() < 1e-12);
            report.rows.push(vec![
                Some(*a),
                Some(*e),
                Some(if is_req { 1.0 } else { 0.0 }),
                Some(lengths[k]),
                (k > 0).then(|| lengths[k] - lengths[k - 1]),
            ]);
        }
        let tag = format!("alpha={a}");
        let (trend, fits) = classify_lengths(&eps, lengths, &tag);
        let detail = fits
            .iter()
            .map(|f| format!("{}: slope {:.4}, R² {:.5}", f.name, f.slope, f.r_squared))
            .collect::<Vec<_>>()
            .join("; ");
        report.fits.extend(fits);
        report.verdict_push(&tag, trend.name(), detail);
        trends.push((*a, trend));
    }

    let below: Vec<_> = trends.iter().filter(|(a, _)| *a < thr).collect();
    let above: Vec<_> = trends.iter().filter(|(a, _)| *a >= thr).collect();
    let v = if below.is_empty() || above.is_empty() {
        "one-sided"
    } else if below.iter().all(|(_, t)| *t == Trend::FiniteTrend)
        && above.iter().all(|(_, t)| *t == Trend::DivergentTrend)
    {
        "straddles"
    } else {
        "does-not-straddle"
    };
    report.verdict_push("threshold", v, format!("threshold exponent 1/(2n−3) = {thr}"));

    let mut order: Vec<usize> = (0..alphas.len()).collect();
    order.sort_by(|i, j| alphas[*i].total_cmp(&alphas[*j]));
    let monotone = (0..eps.len()).all(|k| order.windows(2).all(|w| results[w[1]][k] >= results[w[0]][k]));
    report.verdict_push(
        "alpha-monotonicity",
        if monotone { "holds" } else { "violated" },
        "for fixed ε the length is non-decreasing in α".into(),
    );
    report.plot = Some(PlotSpec {
        title: "length of t^α c(tθ) over [ε, 1]".into(),
        x: "epsilon".into(),
        y: vec!["length".into()],
        group_by: Some("alpha".into()),
        log_x: true,
        log_y: false,
        y_label: "length".into(),
    });
    Ok(report.finish(started, Some(c.grid())))
}

// ---------------------------------------------------- limit identification

/// Lengths of the two explicit connecting paths from `c(tθ)`: linear
/// interpolation to its tangent segment, and the scaling path to
/// `t^α c(tθ)`. Curves are translated so that `c(0) = 0` first; the metric
/// is translation invariant.
pub fn run_limit_identification(
    c: &DiscreteCurve,
    g: &MetricCoefficients,
    alpha: f64,
    schedule: &[f64],
    time_m: usize,
) -> Result<ExperimentReport> {
    let started = Instant::now();
    if !c.is_smooth() {
        return Err(Error::InsufficientRegularity("limit identification needs a curve flagged smooth".into()));
    }
    let thr = threshold_exponent(g);
    if !(alpha >= 0.0 && alpha < thr) {
        return Err(Error::InvalidParameter(format!("alpha = {alpha} must lie in [0, {thr})")));
    }
    check_schedule(schedule, "the schedule")?;
    if schedule[0] > 1.0 {
        return Err(Error::DomainViolation("shortening parameters must lie in (0, 1]".into()));
    }
    let (grid, dim) = (c.grid(), c.dim());
    let eval = c.evaluator();
    let mut c0 = vec![0.0; dim];
    let mut d0 = vec![0.0; dim];
    eval.point(0.0, &mut c0);
    eval.tangent(0.0, &mut d0);

    let rows = schedule
        .par_iter()
        .map(|&t| -> Result<[Option<f64>; 4]> {
            let mut a = vec![0.0; grid.len() * dim];
            let mut b = vec![0.0; grid.len() * dim];
            for j in 0..grid.len() {
                let th = grid.node(j);
                eval.point(t * th, &mut a[j * dim..(j + 1) * dim]);
                for k in 0..dim {
                    a[j * dim + k] -= c0[k];
                    b[j * dim + k] = t * th * d0[k];
                }
            }
            let short = DiscreteCurve::new(grid, dim, a)?;
            let tangent = DiscreteCurve::new(grid, dim, b)?;
            let (interp, immersed) = match linear_interpolation_path(&short, &tangent, time_m) {
                Ok(p) => (Some(path_length(&p, g)?.length), 1.0),
                Err(Error::PathLeftTheSpace(_)) => (None, 0.0),
                Err(e) => return Err(e),
            };
            let s_min = t.powf(alpha);
            let scaling = if s_min >= 1.0 {
                0.0
            } else {
                path_length(&shrink_path_on(&short, geometric_times(s_min, time_m)?)?, g)?.length
            };
            Ok([Some(t), interp, Some(scaling), Some(immersed)])
        })
        .collect::<Result<Vec<_>>>()?;

    let mut report = ExperimentReport::new(
        "limit-identification",
        &[
            ("t", "schedule"),
            ("tangent_connection", "path_length(linear_interpolation_path(c(tθ), t c'(0) θ))"),
            ("scaling_connection", "path_length(shrink_path(c(tθ)) over [t^α, 1])"),
            ("frames_immersed", "1 if every interpolation frame is immersed"),
        ],
        json!({
            "alpha": alpha,
            "schedule": schedule,
            "time_m": time_m,
            "threshold": thr,
            "coefficients": g,
            "curve": c.source().map(|s| s.describe()),
        }),
    );
    report.rows = rows.iter().map(|r| r.to_vec()).collect();

    let col = |k: usize| -> Vec<f64> { rows.iter().map(|r| r[k].unwrap_or(f64::NAN)).collect() };
    let (tan, scl) = (col(1), col(2));
    let dt = decay("tangent-connection-decay", "t", "tangent_connection", schedule, &tan);
    let ds = decay("scaling-connection-decay", "t", "scaling_connection", schedule, &scl);
    push_fit(&mut report, &dt);
    push_fit(&mut report, &ds);
    let ok = |d: &Decay| matches!(d, Decay::Decays(_) | Decay::IdenticallyZero);
    report.verdict_push(
        "same-limit",
        if ok(&dt) && ok(&ds) { "same-limit-trend" } else { "inconclusive" },
        format!("tangent connection {}; scaling connection {}", describe(&dt), describe(&ds)),
    );
    let mono = |v: &[f64]| v.windows(2).all(|w| w[1] <= w[0]);
    report.verdict_push(
        "monotone",
        if mono(&tan) && mono(&scl) { "monotone-decrease" } else { "not-monotone" },
        format!(
            "last values: tangent {:.6e}, scaling {:.6e}",
            tan.last().copied().unwrap_or(f64::NAN),
            scl.last().copied().unwrap_or(f64::NAN)
        ),
    );
    let all_immersed = rows.iter().all(|r| r[3] == Some(1.0));
    report.verdict_push(
        "immersion",
        if all_immersed { "all-frames-immersed" } else { "some-frames-left-the-space" },
        "exact check along every interpolation segment".into(),
    );
    report.plot = Some(PlotSpec {
        title: format!("connecting-path lengths, α = {alpha}"),
        x: "t".into(),
        y: vec!["tangent_connection".into(), "scaling_connection".into()],
        group_by: None,
        log_x: true,
        log_y: true,
        y_label: "length".into(),
    });
    Ok(report.finish(started, Some(grid)))
}
