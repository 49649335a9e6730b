//! Sampled diffeomorphisms of `[0, 1]`: the reparametrization group, the
//! separation functional `Δ`, and the standard test families.

use serde::{Deserialize, Serialize};

use crate::curve::same_grid;
use crate::error::{Error, Result};
use crate::grid::{differentiate, Grid};
use crate::interp::MonotoneCubic;

/// Largest `|a|` accepted by [`DiscreteDiffeo::exp_family`].
pub const EXP_FAMILY_LIMIT: f64 = 50.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Orientation {
    EndpointFixing,
    EndpointSwitching,
}

impl Orientation {
    pub fn compose(self, other: Orientation) -> Orientation {
        if self == other {
            Orientation::EndpointFixing
        } else {
            Orientation::EndpointSwitching
        }
    }
}

/// Closed forms for the named families, used for off-grid evaluation.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Analytic {
    Identity,
    Reversal,
    Exp(f64),
    Hermite(f64, f64),
}

impl Analytic {
    fn eval(self, x: f64) -> f64 {
        match self {
            Analytic::Identity => x,
            Analytic::Reversal => 1.0 - x,
            Analytic::Exp(a) => (a * x).exp_m1() / a.exp_m1(),
            Analytic::Hermite(s0, s1) => ((s0 + s1 - 2.0) * x + (3.0 - 2.0 * s0 - s1)) * x * x + s0 * x,
        }
    }

    fn derivative(self, x: f64) -> f64 {
        match self {
            Analytic::Identity => 1.0,
            Analytic::Reversal => -1.0,
            Analytic::Exp(a) => a * (a * x).exp() / a.exp_m1(),
            Analytic::Hermite(s0, s1) => (3.0 * (s0 + s1 - 2.0) * x + 2.0 * (3.0 - 2.0 * s0 - s1)) * x + s0,
        }
    }
}

/// Grid samples of an endpoint-fixing or endpoint-switching diffeomorphism.
#[derive(Debug, Clone)]
pub struct DiscreteDiffeo {
    grid: Grid,
    samples: Vec<f64>,
    orientation: Orientation,
    analytic: Option<Analytic>,
}

impl PartialEq for DiscreteDiffeo {
    fn eq(&self, other: &Self) -> bool {
        self.grid == other.grid && self.samples == other.samples
    }
}

impl DiscreteDiffeo {
    /// Validates samples: endpoints `(0, 1)` or `(1, 0)`, strict monotonicity
    /// and a non-vanishing discrete derivative of the right sign.
    pub fn new(grid: Grid, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != grid.len() {
            return Err(Error::GridMismatch(format!("{} samples for {} nodes", samples.len(), grid.len())));
        }
        let n = grid.intervals();
        let orientation = match (samples[0], samples[n]) {
            (a, b) if a == 0.0 && b == 1.0 => Orientation::EndpointFixing,
            (a, b) if a == 1.0 && b == 0.0 => Orientation::EndpointSwitching,
            (a, b) => return Err(Error::InvalidDiffeo(format!("endpoints ({a}, {b}) are neither (0,1) nor (1,0)"))),
        };
        let sign = if orientation == Orientation::EndpointFixing { 1.0 } else { -1.0 };
        if let Some(j) = samples.windows(2).position(|w| !(sign * (w[1] - w[0]) > 0.0)) {
            return Err(Error::MonotonicityViolation(format!("samples not strictly monotone at node {j}")));
        }
        let mut d = vec![0.0; samples.len()];
        differentiate(&samples, 1, &grid, &mut d);
        if let Some(j) = d.iter().position(|x| !(sign * x > 0.0)) {
            return Err(Error::MonotonicityViolation(format!("derivative {:.3e} at node {j}", d[j])));
        }
        Ok(DiscreteDiffeo { grid, samples, orientation, analytic: None })
    }

    /// Samples `f` at the nodes; endpoints are taken as given.
    pub fn from_fn(grid: Grid, f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(grid, grid.nodes().into_iter().map(f).collect())
    }

    fn from_analytic(grid: Grid, a: Analytic) -> Result<Self> {
        // closed forms hit the endpoints only up to rounding
        let mut phi = Self::from_fn(grid, |x| if x == 0.0 || x == 1.0 { a.eval(x).round() } else { a.eval(x) })?;
        phi.analytic = Some(a);
        Ok(phi)
    }

    pub fn identity(grid: Grid) -> Self {
        Self::from_analytic(grid, Analytic::Identity).expect("identity is a diffeo")
    }

    /// `θ ↦ 1 − θ`.
    pub fn reversal(grid: Grid) -> Self {
        Self::from_analytic(grid, Analytic::Reversal).expect("reversal is a diffeo")
    }

    /// `ψ_a(θ) = (e^{aθ} − 1)/(e^a − 1)`; `a = 0` is the identity.
    pub fn exp_family(grid: Grid, a: f64) -> Result<Self> {
        if !a.is_finite() || a.abs() > EXP_FAMILY_LIMIT {
            return Err(Error::OverflowGuard(format!("|a| = {} exceeds {EXP_FAMILY_LIMIT}", a.abs())));
        }
        if a == 0.0 {
            return Ok(Self::identity(grid));
        }
        Self::from_analytic(grid, Analytic::Exp(a))
    }

    /// Endpoint-fixing cubic with end slopes `s0`, `s1`.
    pub fn hermite(grid: Grid, s0: f64, s1: f64) -> Result<Self> {
        let a = Analytic::Hermite(s0, s1);
        // the derivative is a quadratic: check it at the ends and its vertex
        let c2 = 3.0 * (s0 + s1 - 2.0);
        let mut probes = vec![0.0, 1.0];
        if c2 != 0.0 {
            let v = -(3.0 - 2.0 * s0 - s1) / c2;
            if (0.0..=1.0).contains(&v) {
                probes.push(v);
            }
        }
        if probes.iter().any(|x| !(a.derivative(*x) > 0.0)) {
            return Err(Error::InvalidDiffeo(format!("hermite slopes ({s0}, {s1}) are not monotone")));
        }
        Self::from_analytic(grid, a)
    }

    pub fn grid(&self) -> Grid {
        self.grid
    }
    pub fn samples(&self) -> &[f64] {
        &self.samples
    }
    pub fn orientation(&self) -> Orientation {
        self.orientation
    }
    pub fn is_analytic(&self) -> bool {
        self.analytic.is_some()
    }

    /// Discrete derivative `Dφ` at the nodes.
    pub fn derivative(&self) -> Vec<f64> {
        let mut d = vec![0.0; self.samples.len()];
        differentiate(&self.samples, 1, &self.grid, &mut d);
        d
    }

    fn interpolant(&self) -> Option<MonotoneCubic> {
        match self.analytic {
            Some(_) => None,
            None => Some(MonotoneCubic::new(self.grid, 1, &self.samples)),
        }
    }

    /// `φ(x)` off the grid.
    pub fn eval(&self, x: f64) -> f64 {
        self.evaluator().eval(x)
    }

    /// `φ'(x)` off the grid.
    pub fn derivative_at(&self, x: f64) -> f64 {
        self.evaluator().derivative(x)
    }

    fn evaluator(&self) -> DiffeoEval {
        DiffeoEval { analytic: self.analytic, interp: self.interpolant() }
    }

    /// `φ⁻¹(y)` by bisection to `1e-12`.
    pub fn inverse_at(&self, y: f64) -> f64 {
        self.evaluator().inverse(y, self.orientation)
    }

    /// `φ ∘ ψ`.
    pub fn compose(&self, psi: &DiscreteDiffeo) -> Result<DiscreteDiffeo> {
        same_grid(&self.grid, &psi.grid)?;
        let e = self.evaluator();
        let mut samples: Vec<f64> = psi.samples.iter().map(|x| e.eval(*x)).collect();
        // endpoints map to endpoints exactly; analytic forms may miss by an ulp
        let n = self.grid.intervals();
        let end = |x: f64| if x == 0.0 { self.samples[0] } else { self.samples[n] };
        samples[0] = end(psi.samples[0]);
        samples[n] = end(psi.samples[n]);
        Self::new(self.grid, samples)
    }

    /// `φ⁻¹`.
    pub fn invert(&self) -> Result<DiscreteDiffeo> {
        let e = self.evaluator();
        let n = self.grid.intervals();
        let mut samples: Vec<f64> = self.grid.nodes().iter().map(|y| e.inverse(*y, self.orientation)).collect();
        let (first, last) = match self.orientation {
            Orientation::EndpointFixing => (0.0, 1.0),
            Orientation::EndpointSwitching => (1.0, 0.0),
        };
        samples[0] = first;
        samples[n] = last;
        let mut inv = Self::new(self.grid, samples)?;
        if matches!(self.analytic, Some(Analytic::Identity) | Some(Analytic::Reversal)) {
            inv.analytic = self.analytic;
        }
        Ok(inv)
    }
}

struct DiffeoEval {
    analytic: Option<Analytic>,
    interp: Option<MonotoneCubic>,
}

impl DiffeoEval {
    fn eval(&self, x: f64) -> f64 {
        match (&self.analytic, &self.interp) {
            (Some(a), _) => a.eval(x),
            (None, Some(p)) => p.eval(x)[0],
            (None, None) => unreachable!(),
        }
    }

    fn derivative(&self, x: f64) -> f64 {
        match (&self.analytic, &self.interp) {
            (Some(a), _) => a.derivative(x),
            (None, Some(p)) => p.derivative(x)[0],
            (None, None) => unreachable!(),
        }
    }

    fn inverse(&self, y: f64, orientation: Orientation) -> f64 {
        let sign = if orientation == Orientation::EndpointFixing { 1.0 } else { -1.0 };
        let (mut lo, mut hi) = (0.0f64, 1.0f64);
        while hi - lo > 1e-13 {
            let mid = 0.5 * (lo + hi);
            if sign * (self.eval(mid) - y) < 0.0 {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        0.5 * (lo + hi)
    }
}

/// `Δ(φ, ψ)`: max minus min over the nodes of `ln Dφ − ln Dψ`.
pub fn delta(phi: &DiscreteDiffeo, psi: &DiscreteDiffeo) -> Result<f64> {
    same_grid(&phi.grid, &psi.grid)?;
    for (name, d) in [("first", phi), ("second", psi)] {
        if d.orientation != Orientation::EndpointFixing {
            return Err(Error::OrientationMismatch(format!("{name} argument is endpoint-switching")));
        }
    }
    Ok(log_ratio_range(&phi.derivative(), &psi.derivative()))
}

/// max − min of `ln(p_j / q_j)` for positive `p`, `q`.
pub(crate) fn log_ratio_range(p: &[f64], q: &[f64]) -> f64 {
    let (lo, hi) = p
        .iter()
        .zip(q)
        .map(|(a, b)| a.ln() - b.ln())
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), r| (lo.min(r), hi.max(r)));
    hi - lo
}
