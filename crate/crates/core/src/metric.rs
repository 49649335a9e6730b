//! Constant-coefficient Sobolev metrics
//! `G_c(h, k) = Σᵢ aᵢ ∫ ⟨∇ⁱ_s h, ∇ⁱ_s k⟩ |c'| dθ`.

use serde::{Deserialize, Serialize};

use crate::curve::{same_grid, DiscreteCurve, TangentField};
use crate::error::{Error, Result};
use crate::grid::{differentiate, differentiate_transpose_add, node_norm, Grid};

/// Sobolev order `n` and weights `a₀..a_n`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "RawCoefficients")]
pub struct MetricCoefficients {
    n: usize,
    a: Vec<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawCoefficients {
    n: usize,
    a: Vec<f64>,
}

impl TryFrom<RawCoefficients> for MetricCoefficients {
    type Error = Error;
    fn try_from(r: RawCoefficients) -> Result<Self> {
        MetricCoefficients::new(r.n, r.a)
    }
}

impl Default for MetricCoefficients {
    /// `n = 2`, `a = (1, 1, 1)`.
    fn default() -> Self {
        MetricCoefficients { n: 2, a: vec![1.0; 3] }
    }
}

impl MetricCoefficients {
    pub fn new(n: usize, a: Vec<f64>) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidCoefficients(format!("order n = {n} is below 2")));
        }
        if a.len() != n + 1 {
            return Err(Error::InvalidCoefficients(format!("order {n} needs {} weights, got {}", n + 1, a.len())));
        }
        if a.iter().any(|x| !x.is_finite() || *x < 0.0) {
            return Err(Error::InvalidCoefficients("weights must be finite and non-negative".into()));
        }
        if a[0] <= 0.0 || a[n] <= 0.0 {
            return Err(Error::InvalidCoefficients("a_0 and a_n must be positive".into()));
        }
        Ok(MetricCoefficients { n, a })
    }

    pub fn order(&self) -> usize {
        self.n
    }
    pub fn weights(&self) -> &[f64] {
        &self.a
    }
    /// `aᵢ`, zero beyond the order.
    pub fn weight(&self, i: usize) -> f64 {
        self.a.get(i).copied().unwrap_or(0.0)
    }
}

fn paired(c: &DiscreteCurve, h: &TangentField) -> Result<()> {
    same_grid(&c.grid(), &h.grid())?;
    if c.dim() != h.dim() {
        return Err(Error::GridMismatch(format!("curve dimension {} vs field dimension {}", c.dim(), h.dim())));
    }
    Ok(())
}

/// Unweighted per-order integrals `∫⟨∇ⁱ_s h, ∇ⁱ_s k⟩|c'|dθ`, `i = 0..=n`.
pub fn metric_terms(g: &MetricCoefficients, c: &DiscreteCurve, h: &TangentField, k: &TangentField) -> Result<Vec<f64>> {
    paired(c, h)?;
    paired(c, k)?;
    let same = h.samples() == k.samples();
    Ok(terms_flat(g.order(), &c.grid(), c.dim(), c.samples(), h.samples(), if same { None } else { Some(k.samples()) }))
}

/// `G_c(h, k)`.
pub fn metric_eval(g: &MetricCoefficients, c: &DiscreteCurve, h: &TangentField, k: &TangentField) -> Result<f64> {
    let t = metric_terms(g, c, h, k)?;
    Ok(t.iter().zip(g.weights()).map(|(t, a)| a * t).sum())
}

/// `√G_c(h, h)`.
pub fn tangent_norm(g: &MetricCoefficients, c: &DiscreteCurve, h: &TangentField) -> Result<f64> {
    Ok(metric_eval(g, c, h, h)?.max(0.0).sqrt())
}

/// Per-order integrals on raw node-major slices. `k = None` means `k = h`.
pub(crate) fn terms_flat(n: usize, grid: &Grid, dim: usize, c: &[f64], h: &[f64], k: Option<&[f64]>) -> Vec<f64> {
    let len = c.len();
    let nodes = grid.len();
    let mut u = vec![0.0; len];
    differentiate(c, dim, grid, &mut u);
    let speed: Vec<f64> = (0..nodes).map(|j| node_norm(&u, dim, j)).collect();

    let mut fh = h.to_vec();
    let mut fk = k.map(|k| k.to_vec());
    let mut scratch = vec![0.0; len];
    let mut out = Vec::with_capacity(n + 1);
    for i in 0..=n {
        if i > 0 {
            arclength_step(&mut fh, &mut scratch, &speed, dim, grid);
            if let Some(fk) = fk.as_mut() {
                arclength_step(fk, &mut scratch, &speed, dim, grid);
            }
        }
        let other = fk.as_deref().unwrap_or(&fh);
        let mut acc = 0.0;
        for j in 0..nodes {
            let dot: f64 =
                fh[j * dim..(j + 1) * dim].iter().zip(&other[j * dim..(j + 1) * dim]).map(|(a, b)| a * b).sum();
            acc += grid.weight(j) * speed[j] * dot;
        }
        out.push(acc);
    }
    out
}

// f ← Df / s
fn arclength_step(f: &mut [f64], scratch: &mut [f64], speed: &[f64], dim: usize, grid: &Grid) {
    differentiate(f, dim, grid, scratch);
    for (j, s) in speed.iter().enumerate() {
        for k in 0..dim {
            f[j * dim + k] = scratch[j * dim + k] / s;
        }
    }
}

/// `G_c(h, h)` together with its gradient with respect to `c` and `h`,
/// accumulated into `bar_c`, `bar_h` scaled by `weight`.
///
/// Hand-written reverse mode through the stencils: `u = Dc`, `s = |u|`,
/// `f⁰ = h`, `fⁱ = Dfⁱ⁻¹ / s`.
pub(crate) fn quadratic_with_gradient(
    a: &[f64],
    grid: &Grid,
    dim: usize,
    c: &[f64],
    h: &[f64],
    weight: f64,
    bar_c: &mut [f64],
    bar_h: &mut [f64],
) -> f64 {
    let n = a.len() - 1;
    let len = c.len();
    let nodes = grid.len();
    let mut u = vec![0.0; len];
    differentiate(c, dim, grid, &mut u);
    let s: Vec<f64> = (0..nodes).map(|j| node_norm(&u, dim, j)).collect();

    let mut f = Vec::with_capacity(n + 1);
    f.push(h.to_vec());
    for i in 1..=n {
        let mut q = vec![0.0; len];
        differentiate(&f[i - 1], dim, grid, &mut q);
        for j in 0..nodes {
            for k in 0..dim {
                q[j * dim + k] /= s[j];
            }
        }
        f.push(q);
    }

    let mut value = 0.0;
    let mut bar_s = vec![0.0; nodes];
    let mut bar_f: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    for (i, fi) in f.iter().enumerate() {
        let mut b = vec![0.0; len];
        for j in 0..nodes {
            let w = grid.weight(j);
            let p = &fi[j * dim..(j + 1) * dim];
            let sq: f64 = p.iter().map(|x| x * x).sum();
            value += a[i] * w * s[j] * sq;
            bar_s[j] += weight * a[i] * w * sq;
            for k in 0..dim {
                b[j * dim + k] = 2.0 * weight * a[i] * w * s[j] * p[k];
            }
        }
        bar_f.push(b);
    }

    for i in (1..=n).rev() {
        let (lower, upper) = bar_f.split_at_mut(i);
        let bi = &upper[0];
        let fi = &f[i];
        let mut bar_q = vec![0.0; len];
        for j in 0..nodes {
            let mut dot = 0.0;
            for k in 0..dim {
                let idx = j * dim + k;
                bar_q[idx] = bi[idx] / s[j];
                dot += bi[idx] * fi[idx];
            }
            bar_s[j] -= dot / s[j];
        }
        differentiate_transpose_add(&bar_q, dim, grid, &mut lower[i - 1]);
    }
    for (bh, b) in bar_h.iter_mut().zip(&bar_f[0]) {
        *bh += b;
    }

    let mut bar_u = vec![0.0; len];
    for j in 0..nodes {
        for k in 0..dim {
            bar_u[j * dim + k] = bar_s[j] * u[j * dim + k] / s[j];
        }
    }
    differentiate_transpose_add(&bar_u, dim, grid, bar_c);
    value
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::{CircleArc, Segment};
    use crate::diffeo::DiscreteDiffeo;
    use std::sync::Arc;

    fn unit_segment(n: usize, dim: usize) -> DiscreteCurve {
        DiscreteCurve::sample(Grid::new(n).unwrap(), Arc::new(Segment::unit(dim))).unwrap()
    }

    #[test]
    fn coefficient_validation() {
        assert!(MetricCoefficients::new(1, vec![1.0, 1.0]).is_err());
        assert!(MetricCoefficients::new(2, vec![1.0, 1.0, 0.0]).is_err());
        assert!(MetricCoefficients::new(2, vec![1.0, -1.0, 1.0]).is_err());
        assert!(MetricCoefficients::new(2, vec![1.0, 0.0, 1.0]).is_ok());
        let parsed: MetricCoefficients = serde_json::from_str(r#"{"n":2,"a":[1.0,1.0,1.0]}"#).unwrap();
        assert_eq!(parsed, MetricCoefficients::default());
        assert!(serde_json::from_str::<MetricCoefficients>(r#"{"n":2,"a":[1,1,1],"b":0}"#).is_err());
        assert!(serde_json::from_str::<MetricCoefficients>(r#"{"n":2,"a":[0,1,1]}"#).is_err());
    }

    #[test]
    fn constant_field_on_unit_segment() {
        let c = unit_segment(32, 2);
        let h = TangentField::constant(c.grid(), &[1.0, 0.0]);
        let g = MetricCoefficients::new(3, vec![2.5, 1.0, 1.0, 1.0]).unwrap();
        assert!((metric_eval(&g, &c, &h, &h).unwrap() - 2.5).abs() < 1e-12);
    }

    #[test]
    fn segment_self_norm() {
        let c = unit_segment(256, 2);
        let g = MetricCoefficients::default();
        let h = c.as_field();
        assert!((metric_eval(&g, &c, &h, &h).unwrap() - 4.0 / 3.0).abs() < 1e-3);
        assert!((tangent_norm(&g, &c, &h).unwrap() - (4.0f64 / 3.0).sqrt()).abs() < 1e-3);
        let t = metric_terms(&g, &c, &h, &h).unwrap();
        assert!(t[2].abs() < 1e-10 * t[0]);
    }

    #[test]
    fn bilinear_and_symmetric() {
        let c = DiscreteCurve::sample(Grid::new(64).unwrap(), Arc::new(CircleArc::unit_speed())).unwrap();
        let g = MetricCoefficients::default();
        let h = TangentField::from_fn(c.grid(), 2, |t, o| {
            o[0] = t * t;
            o[1] = (3.0 * t).sin()
        });
        let k = TangentField::from_fn(c.grid(), 2, |t, o| {
            o[0] = 1.0 - t;
            o[1] = t.exp()
        });
        let hk = metric_eval(&g, &c, &h, &k).unwrap();
        assert!((hk - metric_eval(&g, &c, &k, &h).unwrap()).abs() < 1e-12 * hk.abs());
        let n1 = tangent_norm(&g, &c, &h).unwrap();
        let n2 = tangent_norm(&g, &c, &h.scaled(2.0)).unwrap();
        assert!((n2 - 2.0 * n1).abs() < 1e-12 * n1);
        assert_eq!(tangent_norm(&g, &c, &TangentField::zeros(c.grid(), 2)).unwrap(), 0.0);
    }

    #[test]
    fn reparametrization_invariance() {
        let grid = Grid::new(256).unwrap();
        let c = DiscreteCurve::sample(grid, Arc::new(CircleArc::unit_speed())).unwrap();
        let g = MetricCoefficients::default();
        let h = c.as_field();
        let phi = DiscreteDiffeo::exp_family(grid, 1.0).unwrap();
        let cp = crate::curve::reparametrize(&c, &phi).unwrap();
        let hp = cp.as_field();
        let (a, b) = (metric_eval(&g, &c, &h, &h).unwrap(), metric_eval(&g, &cp, &hp, &hp).unwrap());
        assert!((a - b).abs() / a < 5e-3, "{a} {b}");
    }

    #[test]
    fn gradient_matches_value() {
        let grid = Grid::new(16).unwrap();
        let c = DiscreteCurve::sample(grid, Arc::new(CircleArc::unit_speed())).unwrap();
        let h: Vec<f64> = grid.nodes().iter().flat_map(|t| [t * t, (2.0 * t).cos()]).collect();
        let a = [1.0, 0.5, 0.25];
        let (mut bc, mut bh) = (vec![0.0; h.len()], vec![0.0; h.len()]);
        let v = quadratic_with_gradient(&a, &grid, 2, c.samples(), &h, 1.0, &mut bc, &mut bh);
        let t = terms_flat(2, &grid, 2, c.samples(), &h, None);
        assert!((v - (t[0] + 0.5 * t[1] + 0.25 * t[2])).abs() < 1e-12 * v);
        let eps = 1e-6;
        for idx in [0, 5, 17, 33] {
            let bump = |x: &[f64], d: f64| {
                let mut y = x.to_vec();
                y[idx] += d;
                y
            };
            let f = |cc: &[f64], hh: &[f64]| {
                let t = terms_flat(2, &grid, 2, cc, hh, None);
                t[0] + 0.5 * t[1] + 0.25 * t[2]
            };
            let fd_c = (f(&bump(c.samples(), eps), &h) - f(&bump(c.samples(), -eps), &h)) / (2.0 * eps);
            let fd_h = (f(c.samples(), &bump(&h, eps)) - f(c.samples(), &bump(&h, -eps))) / (2.0 * eps);
            assert!((fd_c - bc[idx]).abs() < 1e-5 * (1.0 + fd_c.abs()), "{idx}: {fd_c} {}", bc[idx]);
            assert!((fd_h - bh[idx]).abs() < 1e-5 * (1.0 + fd_h.abs()), "{idx}: {fd_h} {}", bh[idx]);
        }
    }
}
