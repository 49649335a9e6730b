//! Connect power shrink-shorten frames of the circle to the straight
//! line through the tangent, and to scaled copies of themselves.
//!
//!     cargo run --release --example limit_identification

use std::sync::Arc;

use sobolev_curves::lab::{default_schedule, run_limit_identification};
use sobolev_curves::*;

fn main() -> Result<()> {
    let grid = Grid::new(256)?;
    let circle = DiscreteCurve::sample(grid, Arc::new(CircleArc::full(1.0)))?;
    let r = run_limit_identification(&circle, &MetricCoefficients::default(), 0.5, &default_schedule(0.1, 6), 64)?;
    let (t, a, b) =
        (r.column("t").unwrap(), r.column("tangent_connection").unwrap(), r.column("scaling_connection").unwrap());
    println!("{:>10} {:>12} {:>12}", "t", "tangent", "scaling");
    for i in 0..t.len() {
        let f = |v: Option<f64>| v.map_or("-".to_string(), |x| format!("{x:.6}"));
        println!("{:10.6} {:>12} {:>12}", t[i].unwrap(), f(a[i]), f(b[i]));
    }
    for v in &r.verdicts {
        println!("{:10} {:18} {}", v.claim, v.verdict, v.detail);
    }
    Ok(())
}
