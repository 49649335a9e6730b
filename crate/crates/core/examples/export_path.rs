//! Write a path to disk (one CSV per frame plus a JSON manifest), read it
//! back, and compare lengths.
//!
//!     cargo run --example export_path [out-dir]

use std::sync::Arc;

use serde_json::{json, Map};
use sobolev_curves::io::{export_path, import_path, write_length_report};
use sobolev_curves::path::{path_length, power_shrink_shorten};
use sobolev_curves::*;

fn main() -> Result<()> {
    let dir = std::env::args().nth(1).unwrap_or_else(|| "out/example-path".into());
    let grid = Grid::new(64)?;
    let g = MetricCoefficients::default();
    let arc = DiscreteCurve::sample(grid, Arc::new(CircleArc::unit_speed()))?;
    let path = power_shrink_shorten(&arc, 0.5, 0.05, 32)?;

    let mut extra = Map::new();
    extra.insert("lib_version".into(), json!(env!("CARGO_PKG_VERSION")));
    let manifest = export_path(&dir, &path, extra)?;
    let report = path_length(&path, &g)?;
    write_length_report(std::fs::File::create(format!("{dir}/length.csv"))?, &report)?;
    println!("wrote {} frames of '{}' to {dir}", manifest.frames.len(), manifest.constructor);

    let (back, _) = import_path(&dir)?;
    let again = path_length(&back, &g)?;
    println!("length with analytic velocity {:.6}, from frames alone {:.6}", report.length, again.length);
    Ok(())
}
