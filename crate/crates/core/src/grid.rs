//! Uniform parameter grid on `[0, 1]` and the finite-difference calculus used
//! by every other module.
//!
//! Samples of vector-valued functions are stored node-major: component `k` of
//! node `j` lives at index `j * dim + k`.

use serde::{Deserialize, Serialize};
use std::fmt;

use crate::error::{Error, Result};

/// Smallest admissible number of subintervals.
pub const MIN_INTERVALS: usize = 8;

/// Uniform grid `θ_j = j / N`, `j = 0..=N`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Grid {
    intervals: usize,
}

impl Grid {
    pub fn new(intervals: usize) -> Result<Self> {
        if intervals < MIN_INTERVALS {
            return Err(Error::InsufficientResolution(format!(
                "grid needs at least {MIN_INTERVALS} subintervals, got {intervals}"
            )));
        }
        Ok(Grid { intervals })
    }

    /// Number of subintervals `N`.
    pub fn intervals(&self) -> usize {
        self.intervals
    }

    /// Number of nodes `N + 1`.
    pub fn len(&self) -> usize {
        self.intervals + 1
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn spacing(&self) -> f64 {
        1.0 / self.intervals as f64
    }

    pub fn node(&self, j: usize) -> f64 {
        j as f64 / self.intervals as f64
    }

    pub fn nodes(&self) -> Vec<f64> {
        (0..self.len()).map(|j| self.node(j)).collect()
    }

    /// Trapezoid rule for scalar samples at the nodes.
    pub fn trapezoid(&self, values: &[f64]) -> f64 {
        debug_assert_eq!(values.len(), self.len());
        let n = self.intervals;
        let inner: f64 = values[1..n].iter().sum();
        self.spacing() * (inner + 0.5 * (values[0] + values[n]))
    }

    /// Trapezoid weight of node `j`.
    pub fn weight(&self, j: usize) -> f64 {
        if j == 0 || j == self.intervals {
            0.5 * self.spacing()
        } else {
            self.spacing()
        }
    }

    /// Cumulative trapezoid integral, starting at zero.
    pub fn cumulative_trapezoid(&self, values: &[f64]) -> Vec<f64> {
        let h = self.spacing();
        let mut out = Vec::with_capacity(values.len());
        let mut acc = 0.0;
        out.push(0.0);
        for w in values.windows(2) {
            acc += 0.5 * h * (w[0] + w[1]);
            out.push(acc);
        }
        out
    }
}

/// Interior stencil family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum InteriorStencil {
    Central2ndOrder,
}

/// Endpoint stencil family.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryStencil {
    OneSided2ndOrder,
}

/// The finite-difference scheme in use. There is exactly one; it is recorded
/// in reports so outputs stay reproducible.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DerivativeScheme {
    pub interior: InteriorStencil,
    pub boundary: BoundaryStencil,
}

impl Default for DerivativeScheme {
    fn default() -> Self {
        DerivativeScheme { interior: InteriorStencil::Central2ndOrder, boundary: BoundaryStencil::OneSided2ndOrder }
    }
}

impl fmt::Display for DerivativeScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("central-2nd-order/one-sided-2nd-order")
    }
}

/// Applies the derivative stencil to node-major samples with `dim` components.
///
/// Exact on polynomials of degree two.
pub(crate) fn differentiate(src: &[f64], dim: usize, grid: &Grid, out: &mut [f64]) {
    let n = grid.intervals();
    debug_assert_eq!(src.len(), (n + 1) * dim);
    debug_assert_eq!(out.len(), src.len());
    let s = 0.5 * grid.intervals() as f64;
    for k in 0..dim {
        let at = |j: usize| src[j * dim + k];
        out[k] = s * (-3.0 * at(0) + 4.0 * at(1) - at(2));
        for j in 1..n {
            out[j * dim + k] = s * (at(j + 1) - at(j - 1));
        }
        out[n * dim + k] = s * (3.0 * at(n) - 4.0 * at(n - 1) + at(n - 2));
    }
}

/// Adds the transpose of the derivative stencil applied to `src` into `out`.
pub(crate) fn differentiate_transpose_add(src: &[f64], dim: usize, grid: &Grid, out: &mut [f64]) {
    let n = grid.intervals();
    let s = 0.5 * grid.intervals() as f64;
    for k in 0..dim {
        let y0 = s * src[k];
        out[k] -= 3.0 * y0;
        out[dim + k] += 4.0 * y0;
        out[2 * dim + k] -= y0;
        for j in 1..n {
            let y = s * src[j * dim + k];
            out[(j - 1) * dim + k] -= y;
            out[(j + 1) * dim + k] += y;
        }
        let yn = s * src[n * dim + k];
        out[(n - 2) * dim + k] += yn;
        out[(n - 1) * dim + k] -= 4.0 * yn;
        out[n * dim + k] += 3.0 * yn;
    }
}

/// Euclidean norm of node `j` of node-major samples.
#[inline]
pub(crate) fn node_norm(src: &[f64], dim: usize, j: usize) -> f64 {
    let p = &src[j * dim..(j + 1) * dim];
    if dim == 1 {
        p[0].abs()
    } else {
        p.iter().map(|x| x * x).sum::<f64>().sqrt()
    }
}
