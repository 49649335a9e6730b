//! Cauchy diagnostics for sequences of shrinking curves.
//!
//!     cargo run --release --example cauchy_diagnostic

use std::sync::Arc;

use sobolev_curves::lab::{default_schedule, run_cauchy_diagnostic, ExperimentReport, SequenceSpec};
use sobolev_curves::*;

fn show(r: &ExperimentReport) {
    println!("\n== {} ({})", r.experiment, r.parameters["family"]);
    let (l, b) = (r.column("ell").unwrap(), r.column("consecutive_bound").unwrap());
    for (l, b) in l.iter().zip(&b) {
        println!("  ℓ = {:.5}  bound to next {}", l.unwrap_or(f64::NAN), b.map_or("-".into(), |x| format!("{x:.5}")));
    }
    for v in &r.verdicts {
        println!("  {:12} {:18} {}", v.claim, v.verdict, v.detail);
    }
}

fn main() -> Result<()> {
    let grid = Grid::new(128)?;
    let g = MetricCoefficients::default();
    let schedule = default_schedule(1.0, 6);

    // straight lines ℓ_m·φ with drifting translations and flipping rotations
    let phi = DiscreteDiffeo::exp_family(grid, 1.0)?;
    let m = schedule.len();
    let spec = SequenceSpec::straight_line(phi, 2, schedule.clone())
        .with_translations((1..=m).map(|k| vec![1.0 / (k * k) as f64, 0.0]).collect())
        .with_rotations((0..m).map(|k| (k % 2) as f64).collect());
    show(&run_cauchy_diagnostic(&spec, &g)?);

    let circle = DiscreteCurve::sample(grid, Arc::new(CircleArc::full(1.0)))?;
    show(&run_cauchy_diagnostic(&SequenceSpec::shortened_curve(circle, schedule.clone()), &g)?);

    let radii = (1..=6).map(|k| 1.0 / k as f64).collect();
    show(&run_cauchy_diagnostic(&SequenceSpec::vanishing_circles(grid, radii), &g)?);
    Ok(())
}
