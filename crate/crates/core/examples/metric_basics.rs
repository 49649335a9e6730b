//! Sample a few curves, evaluate the metric term by term and check the
//! Sobolev sup-norm inequality.
//!
//!     cargo run --example metric_basics

use std::f64::consts::PI;
use std::sync::Arc;

use sobolev_curves::*;

fn main() -> Result<()> {
    let grid = Grid::new(256)?;
    let g = MetricCoefficients::new(2, vec![1.0, 0.5, 0.25])?;
    println!("grid N = {}, scheme: {}", grid.intervals(), DerivativeScheme::default());

    let circle = DiscreteCurve::sample(grid, Arc::new(CircleArc::full(1.0)))?;
    let seg = DiscreteCurve::sample(grid, Arc::new(Segment::new(vec![0.0, 0.0], vec![2.0, 1.0])))?;
    let wave = DiscreteCurve::sample(
        grid,
        Arc::new(FnCurve::new(
            2,
            "wave",
            |t, o| {
                o[0] = t;
                o[1] = 0.2 * (2.0 * PI * t).sin();
            },
            |t, o| {
                o[0] = 1.0;
                o[1] = 0.4 * PI * (2.0 * PI * t).cos();
            },
        )),
    )?;

    for (name, c) in [("circle", &circle), ("segment", &seg), ("wave", &wave)] {
        let h = c.as_field();
        let terms = metric_terms(&g, c, &h, &h)?;
        println!(
            "{name:8} length {:.6}  G(c,c) = {:.6}  per order {:?}",
            curve_length(c),
            metric_eval(&g, c, &h, &h)?,
            terms.iter().map(|t| format!("{t:.5}")).collect::<Vec<_>>()
        );
    }
    // closed form for the unit circle: 2π(a₀ + a₁ + a₂)
    println!("circle oracle       {:.6}", 2.0 * PI * 1.75);

    // a constant field on a segment only sees a₀
    let v = TangentField::constant(grid, &[0.0, 1.0]);
    println!("|v|² on the segment: {:.6} (a₀·ℓ = {:.6})", metric_eval(&g, &seg, &v, &v)?, curve_length(&seg));

    let check = sobolev_sup_check(&circle, &wave)?;
    println!("‖c′ − d′‖∞ = {:.4} ≤ {:.4}: {}", check.lhs, check.rhs, check.holds);

    // arc-length derivatives are parametrization free
    let (cs, _) = constant_speed(&wave)?;
    println!("constant-speed wave: speed range {:.6}..{:.6}", min(&cs.speed()), max(&cs.speed()));
    Ok(())
}

fn min(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::INFINITY, f64::min)
}

fn max(v: &[f64]) -> f64 {
    v.iter().copied().fold(f64::NEG_INFINITY, f64::max)
}
