//! Bracket a geodesic distance: optimized path length above, the Δ
//! certificate below.
//!
//!     cargo run --release --example geodesic_bracket

use sobolev_curves::geodesic::{chain_distance_bound, geodesic_estimate, OptimizerOptions};
use sobolev_curves::*;

fn main() -> Result<()> {
    let grid = Grid::new(128)?;
    let g = MetricCoefficients::default();
    let id = DiscreteDiffeo::identity(grid);
    let psi = DiscreteDiffeo::exp_family(grid, 1.0)?;
    let c0 = DiscreteCurve::from_diffeo(&id, 0.2)?;
    let c1 = DiscreteCurve::from_diffeo(&psi, 0.2)?;

    let opts = OptimizerOptions { max_iters: 1000, seeds: vec![16, 32], ..Default::default() };
    let est = geodesic_estimate(&c0, &c1, &g, &opts)?;
    let lower = est.lower.as_ref().map_or(f64::NAN, |l| l.value);
    println!("d(0.2·id, 0.2·exp(1)) ∈ [{lower:.5}, {:.5}]", est.upper);
    for c in &est.candidates {
        println!(
            "  M = {:3} ({}) length {:.6}, iterations {}, max frame length {:.4}",
            c.time_m, c.seed_kind, c.upper, c.trace.iterations, c.max_frame_length
        );
    }
    if let Some(l) = &est.lower {
        println!("certificate: {}", l.anchor);
    }

    // same curves, different parametrization: the chain of shrink and
    // translate moves bounds the distance between two straight lines
    let a = DiscreteCurve::from_diffeo(&psi, 0.1)?;
    let b = DiscreteCurve::from_diffeo(&psi, 0.05)?;
    let chain = chain_distance_bound(&a, &b, &g)?;
    println!("chain bound d(0.1·ψ, 0.05·ψ) ≤ {:.5} over {} legs", chain.value, chain.legs.len());

    // opposite orientations live in different components
    let down = DiscreteCurve::from_diffeo(&DiscreteDiffeo::reversal(grid), 0.2)?;
    if let Err(e) = geodesic_estimate(&c0, &down, &g, &opts) {
        println!("0.2·id vs 0.2·reversal: {}", e.tag());
    }
    Ok(())
}
