//! Sobolev metrics on spaces of immersed open curves.
//!
//! Discrete curves on a uniform grid, the metric
//! `G_c(h,k) = Σ aᵢ ∫⟨∇ⁱ_s h, ∇ⁱ_s k⟩ ds`, canonical path families with
//! closed-form length certificates, bracketed geodesic-distance estimates,
//! and experiment drivers for the completion phenomena of these spaces.

// `!(x > 0.0)` is used on purpose: it rejects NaN along with the rest.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod cli;
pub mod curve;
pub mod diffeo;
pub mod error;
pub mod geodesic;
pub mod grid;
pub mod interp;
pub mod io;
pub mod lab;
pub mod metric;
pub mod path;
pub mod svg;

pub use curve::{
    arclength_derivative, constant_speed, curve_length, l2ds_norm, reparametrize, sobolev_sup_check, CircleArc,
    DiscreteCurve, FnCurve, Segment, SmoothCurve, TangentField,
};
pub use diffeo::{delta, DiscreteDiffeo, Orientation};
pub use error::{Error, Result};
pub use grid::{DerivativeScheme, Grid};
pub use metric::{metric_eval, metric_terms, tangent_norm, MetricCoefficients};
