//! The canonical path families and their closed-form length certificates.
//!
//!     cargo run --release --example canonical_paths

use std::sync::Arc;

use sobolev_curves::bounds::{rotate_upper, shrink_upper, straight_shrink_length, translate_upper};
use sobolev_curves::path::*;
use sobolev_curves::*;

fn main() -> Result<()> {
    let grid = Grid::new(256)?;
    let g = MetricCoefficients::default();
    let seg = DiscreteCurve::sample(grid, Arc::new(Segment::unit(2)))?;
    let arc = DiscreteCurve::sample(grid, Arc::new(CircleArc::unit_speed()))?;
    let circle = DiscreteCurve::sample(grid, Arc::new(CircleArc::full(1.0)))?;

    let v0 = [0.6, -0.8];
    let t = path_length(&translate_path(&arc, &v0, 64)?, &g)?;
    println!("translate  {:.10}  certificate {:.10}", t.length, translate_upper(&g, arc.length(), 1.0)?.value);

    let r = path_length(&rotate_path(&arc, Rotation::Planar(2.0), 64)?, &g)?;
    println!("rotate     {:.10}  certificate {:.10}", r.length, rotate_upper(&g, &arc, 2.0)?.value);

    let s = path_length(&shrink_path(&seg, 1e-6, 64)?, &g)?;
    println!(
        "shrink     {:.6}  exact {:.6}  certificate {:.6}",
        s.length,
        straight_shrink_length(&g, &seg, 1e-6)?,
        shrink_upper(&g, 1.0)?.value
    );

    // only straight lines can be shrunk at finite cost
    println!("\nshrinking the unit circle down to ε:");
    let eps = [1e-1, 1e-2, 1e-3, 1e-4];
    let rep = path_length(&shrink_path_on(&circle, geometric_times_through(&eps, 40)?)?, &g)?;
    for e in eps {
        let i = rep.times.iter().position(|t| *t == e).unwrap();
        println!("  ε = {e:.0e}: length {:.3}", rep.length_from(i));
    }

    println!("\nshortening and power shrink-shorten of the circle down to t = 1e-3:");
    for alpha in [0.0, 0.5, 1.0] {
        let p = power_shrink_shorten(&circle, alpha, 1e-3, 128)?;
        println!(
            "  α = {alpha}: length {:.4}, frame length at t_min {:.2e}",
            path_length(&p, &g)?.length,
            p.first().length()
        );
    }
    let sh = shorten_path(&circle, 1e-3, 128)?;
    println!("  shorten: length {:.4}", path_length(&sh, &g)?.length);
    Ok(())
}
