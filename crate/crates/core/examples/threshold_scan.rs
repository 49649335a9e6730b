//! Power shrink-shorten paths on the circle: finite length below the
//! threshold exponent, logarithmic growth at it.
//!
//!     cargo run --release --example threshold_scan [out-dir]

use std::sync::Arc;

use sobolev_curves::lab::{run_threshold_scan, threshold_exponent};
use sobolev_curves::*;

fn main() -> Result<()> {
    let grid = Grid::new(256)?;
    let g = MetricCoefficients::default();
    let circle = DiscreteCurve::sample(grid, Arc::new(CircleArc::full(1.0)))?;
    println!("threshold exponent for n = 2: {}", threshold_exponent(&g));

    let alphas = [0.0, 0.5, 0.9, 1.0, 1.2];
    let r = run_threshold_scan(&circle, &g, &alphas, &[1e-2, 1e-3, 1e-4, 1e-5])?;
    let (a, e, l) = (r.column("alpha").unwrap(), r.column("epsilon").unwrap(), r.column("length").unwrap());
    let requested = r.column("requested").unwrap();
    println!("{:>6} {:>8} {:>12}", "alpha", "epsilon", "length");
    for i in 0..r.rows.len() {
        if requested[i] == Some(1.0) {
            println!("{:6.2} {:8.0e} {:12.5}", a[i].unwrap(), e[i].unwrap(), l[i].unwrap());
        }
    }
    for v in &r.verdicts {
        println!("{:20} {:18} {}", v.claim, v.verdict, v.detail);
    }
    if let (Some(dir), Some(svg)) = (std::env::args().nth(1), r.plot()) {
        std::fs::create_dir_all(&dir)?;
        std::fs::write(format!("{dir}/threshold-scan.svg"), svg)?;
    }
    Ok(())
}
