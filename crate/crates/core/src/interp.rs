//! Shape-preserving (PCHIP) cubic interpolation of node-major samples on a
//! uniform grid.
//!
//! Slopes follow the Fritsch–Butland harmonic-mean rule in the interior and
//! the three-point, shape-limited rule at the ends, so each component of a
//! monotone data set stays monotone between nodes.

use crate::grid::Grid;

/// Points closer than this (in units of the grid spacing) to a node evaluate
/// to the node sample itself.
const SNAP: f64 = 1e-12;

#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    grid: Grid,
    dim: usize,
    values: Vec<f64>,
    slopes: Vec<f64>,
}

impl MonotoneCubic {
    pub fn new(grid: Grid, dim: usize, values: &[f64]) -> Self {
        assert_eq!(values.len(), grid.len() * dim, "sample count does not match grid");
        let n = grid.intervals();
        let h = grid.spacing();
        let mut slopes = vec![0.0; values.len()];
        let mut secant = vec![0.0; n];
        for k in 0..dim {
            for (i, s) in secant.iter_mut().enumerate() {
                *s = (values[(i + 1) * dim + k] - values[i * dim + k]) / h;
            }
            for j in 1..n {
                let (d0, d1) = (secant[j - 1], secant[j]);
                // uniform spacing: the weighted harmonic mean has equal weights
                slopes[j * dim + k] = if d0 * d1 <= 0.0 { 0.0 } else { 2.0 / (1.0 / d0 + 1.0 / d1) };
            }
            slopes[k] = end_slope(secant[0], secant[1]);
            slopes[n * dim + k] = end_slope(secant[n - 1], secant[n - 2]);
        }
        MonotoneCubic { grid, dim, values: values.to_vec(), slopes }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Locates `x` on the grid: either an exact node or an interval and the
    /// local coordinate in `[0, 1)`.
    fn locate(&self, x: f64) -> Locus {
        let n = self.grid.intervals();
        let u = x.clamp(0.0, 1.0) * n as f64;
        let r = u.round();
        if (u - r).abs() < SNAP {
            return Locus::Node(r as usize);
        }
        let i = (u.floor() as usize).min(n - 1);
        Locus::Inside(i, u - i as f64)
    }

    /// Writes the interpolant at `x` into `out` (length `dim`).
    pub fn eval_into(&self, x: f64, out: &mut [f64]) {
        let d = self.dim;
        match self.locate(x) {
            Locus::Node(j) => out.copy_from_slice(&self.values[j * d..(j + 1) * d]),
            Locus::Inside(i, s) => {
                let h = self.grid.spacing();
                let s2 = s * s;
                let s3 = s2 * s;
                let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
                let h10 = s3 - 2.0 * s2 + s;
                let h01 = -2.0 * s3 + 3.0 * s2;
                let h11 = s3 - s2;
                for k in 0..d {
                    let (y0, y1) = (self.values[i * d + k], self.values[(i + 1) * d + k]);
                    let (m0, m1) = (self.slopes[i * d + k], self.slopes[(i + 1) * d + k]);
                    out[k] = h00 * y0 + h * h10 * m0 + h01 * y1 + h * h11 * m1;
                }
            }
        }
    }

    /// Writes the derivative of the interpolant at `x` into `out`.
    pub fn derivative_into(&self, x: f64, out: &mut [f64]) {
        let d = self.dim;
        match self.locate(x) {
            Locus::Node(j) => out.copy_from_slice(&self.slopes[j * d..(j + 1) * d]),
            Locus::Inside(i, s) => {
                let h = self.grid.spacing();
                let s2 = s * s;
                let g00 = (6.0 * s2 - 6.0 * s) / h;
                let g10 = 3.0 * s2 - 4.0 * s + 1.0;
                let g01 = (-6.0 * s2 + 6.0 * s) / h;
                let g11 = 3.0 * s2 - 2.0 * s;
                for k in 0..d {
                    let (y0, y1) = (self.values[i * d + k], self.values[(i + 1) * d + k]);
                    let (m0, m1) = (self.slopes[i * d + k], self.slopes[(i + 1) * d + k]);
                    out[k] = g00 * y0 + g10 * m0 + g01 * y1 + g11 * m1;
                }
            }
        }
    }

    pub fn eval(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.eval_into(x, &mut out);
        out
    }

    pub fn derivative(&self, x: f64) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        self.derivative_into(x, &mut out);
        out
    }
}

enum Locus {
    Node(usize),
    Inside(usize, f64),
}

// Three-point end slope, limited so the end interval stays monotone.
fn end_slope(d0: f64, d1: f64) -> f64 {
    let m = 0.5 * (3.0 * d0 - d1);
    if m.signum() != d0.signum() || d0 == 0.0 {
        0.0
    } else if d0.signum() != d1.signum() && m.abs() > 3.0 * d0.abs() {
        3.0 * d0
    } else {
        m
    }
}
