//! Two straight-line sequences with different parametrizations: both are
//! Cauchy, yet their distance stays above a fixed δ.
//!
//!     cargo run --release --example separation_table [grid-n]

use sobolev_curves::geodesic::OptimizerOptions;
use sobolev_curves::lab::{default_schedule, run_separation_experiment};
use sobolev_curves::*;

fn main() -> Result<()> {
    let n = std::env::args().nth(1).and_then(|s| s.parse().ok()).unwrap_or(64);
    let grid = Grid::new(n)?;
    let g = MetricCoefficients::default();
    let id = DiscreteDiffeo::identity(grid);
    let psi = DiscreteDiffeo::exp_family(grid, 1.0)?;
    let opts = OptimizerOptions { max_iters: 500, seeds: vec![16, 32], ..Default::default() };

    let r = run_separation_experiment(&id, &psi, &g, &default_schedule(0.1, 6), &opts)?;
    let names: Vec<&str> = r.columns.iter().map(|c| c.name.as_str()).collect();
    println!("{}", names.iter().map(|n| format!("{n:>17}")).collect::<String>());
    for row in &r.rows {
        println!(
            "{}",
            row.iter().map(|v| v.map_or(format!("{:>17}", "-"), |x| format!("{x:17.6e}"))).collect::<String>()
        );
    }
    for v in &r.verdicts {
        println!("{:10} {:14} {}", v.claim, v.verdict, v.detail);
    }
    Ok(())
}
