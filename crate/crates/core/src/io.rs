//! Exchange formats: node CSVs for curves and diffeos, path directories
//! with a JSON manifest, and integrand CSVs for length reports.

use std::fs;
use std::io::{Read, Write};
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

use crate::curve::DiscreteCurve;
use crate::diffeo::DiscreteDiffeo;
use crate::error::{Error, Result};
use crate::grid::Grid;
use crate::path::{CurvePath, PathLengthReport};

/// Largest accepted deviation of a `theta` column from the uniform grid.
const THETA_TOL: f64 = 1e-9;

fn fmt(x: f64) -> String {
    format!("{x:.16e}")
}

fn write_rows<W: Write>(w: W, header: &[String], rows: impl Iterator<Item = Vec<f64>>) -> Result<()> {
    let mut out = csv::Writer::from_writer(w);
    out.write_record(header)?;
    for r in rows {
        out.write_record(r.into_iter().map(fmt))?;
    }
    out.flush()?;
    Ok(())
}

/// Reads a node table: returns the header and the numeric rows, after
/// checking that the first column is the uniform grid.
fn read_rows<R: Read>(r: R, first: &str) -> Result<(Vec<String>, Grid, Vec<Vec<f64>>)> {
    let mut rdr = csv::Reader::from_reader(r);
    let header: Vec<String> = rdr.headers()?.iter().map(|s| s.trim().to_string()).collect();
    if header.first().map(String::as_str) != Some(first) || header.len() < 2 {
        return Err(Error::Format(format!("expected header starting with '{first}', got {header:?}")));
    }
    let mut rows = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let rec = rec?;
        if rec.len() != header.len() {
            return Err(Error::Format(format!("row {i} has {} fields, header has {}", rec.len(), header.len())));
        }
        let row = rec
            .iter()
            .map(|s| s.trim().parse::<f64>().map_err(|e| Error::Format(format!("row {i}: '{s}': {e}"))))
            .collect::<Result<Vec<f64>>>()?;
        if row.iter().any(|x| !x.is_finite()) {
            return Err(Error::Format(format!("row {i} has a non-finite value")));
        }
        rows.push(row);
    }
    if rows.is_empty() {
        return Err(Error::Format("no data rows".into()));
    }
    let grid = Grid::new(rows.len() - 1)?;
    for (j, row) in rows.iter().enumerate() {
        if (row[0] - grid.node(j)).abs() > THETA_TOL {
            return Err(Error::GridMismatch(format!(
                "{first} in row {j} is {}, expected {} on a uniform grid",
                row[0],
                grid.node(j)
            )));
        }
    }
    Ok((header, grid, rows))
}

/// Writes `theta,x0,x1,...`.
pub fn write_curve<W: Write>(w: W, c: &DiscreteCurve) -> Result<()> {
    let mut header = vec!["theta".to_string()];
    header.extend((0..c.dim()).map(|k| format!("x{k}")));
    let grid = c.grid();
    write_rows(
        w,
        &header,
        (0..grid.len()).map(|j| std::iter::once(grid.node(j)).chain(c.point(j).iter().copied()).collect()),
    )
}

pub fn read_curve<R: Read>(r: R) -> Result<DiscreteCurve> {
    let (header, grid, rows) = read_rows(r, "theta")?;
    for (k, h) in header[1..].iter().enumerate() {
        if *h != format!("x{k}") {
            return Err(Error::Format(format!("column {} should be 'x{k}', got '{h}'", k + 1)));
        }
    }
    let dim = header.len() - 1;
    DiscreteCurve::new(grid, dim, rows.into_iter().flat_map(|r| r.into_iter().skip(1)).collect())
}

pub fn write_curve_file(path: impl AsRef<Path>, c: &DiscreteCurve) -> Result<()> {
    write_curve(fs::File::create(path)?, c)
}

pub fn read_curve_file(path: impl AsRef<Path>) -> Result<DiscreteCurve> {
    let p = path.as_ref();
    let f = fs::File::open(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    read_curve(f)
}

/// Writes `theta,phi`.
pub fn write_diffeo<W: Write>(w: W, phi: &DiscreteDiffeo) -> Result<()> {
    let grid = phi.grid();
    write_rows(w, &["theta".into(), "phi".into()], (0..grid.len()).map(|j| vec![grid.node(j), phi.samples()[j]]))
}

pub fn read_diffeo<R: Read>(r: R) -> Result<DiscreteDiffeo> {
    let (header, grid, rows) = read_rows(r, "theta")?;
    if header != ["theta", "phi"] {
        return Err(Error::Format(format!("expected header theta,phi, got {header:?}")));
    }
    DiscreteDiffeo::new(grid, rows.into_iter().map(|r| r[1]).collect())
}

pub fn write_diffeo_file(path: impl AsRef<Path>, phi: &DiscreteDiffeo) -> Result<()> {
    write_diffeo(fs::File::create(path)?, phi)
}

pub fn read_diffeo_file(path: impl AsRef<Path>) -> Result<DiscreteDiffeo> {
    let p = path.as_ref();
    let f = fs::File::open(p).map_err(|e| Error::Io(format!("{}: {e}", p.display())))?;
    read_diffeo(f)
}

/// Writes `t,integrand`.
pub fn write_length_report<W: Write>(w: W, report: &PathLengthReport) -> Result<()> {
    write_rows(
        w,
        &["t".into(), "integrand".into()],
        report.times.iter().zip(&report.integrand).map(|(t, v)| vec![*t, *v]),
    )
}

/// Contents of `manifest.json` in an exported path directory.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PathManifest {
    pub constructor: String,
    pub parameters: Map<String, Value>,
    pub grid_n: usize,
    pub dim: usize,
    pub times: Vec<f64>,
    pub frames: Vec<String>,
    /// Free-form additions (config hash, library version, ...).
    #[serde(default, skip_serializing_if = "Map::is_empty")]
    pub extra: Map<String, Value>,
}

/// Writes one `frame_XXXX.csv` per time node and a `manifest.json`.
pub fn export_path(dir: impl AsRef<Path>, path: &CurvePath, extra: Map<String, Value>) -> Result<PathManifest> {
    let dir = dir.as_ref();
    fs::create_dir_all(dir)?;
    let width = path.times().len().to_string().len().max(4);
    let mut frames = Vec::with_capacity(path.times().len());
    for (i, f) in path.frames().iter().enumerate() {
        let name = format!("frame_{i:0width$}.csv");
        write_curve_file(dir.join(&name), f)?;
        frames.push(name);
    }
    let manifest = PathManifest {
        constructor: path.info().constructor.clone(),
        parameters: path.info().parameters.clone(),
        grid_n: path.grid().intervals(),
        dim: path.dim(),
        times: path.times().to_vec(),
        frames,
        extra,
    };
    fs::write(dir.join("manifest.json"), serde_json::to_string_pretty(&manifest)? + "\n")?;
    Ok(manifest)
}

/// Reads the frames listed in a manifest back into a path (without
/// velocity).
pub fn import_path(dir: impl AsRef<Path>) -> Result<(CurvePath, PathManifest)> {
    let dir = dir.as_ref();
    let manifest: PathManifest = serde_json::from_str(&fs::read_to_string(dir.join("manifest.json"))?)?;
    if manifest.frames.len() != manifest.times.len() {
        return Err(Error::Format("manifest lists a different number of frames and times".into()));
    }
    let frames = manifest.frames.iter().map(|f| read_curve_file(dir.join(f))).collect::<Result<Vec<_>>>()?;
    let info = crate::path::PathInfo::new(&manifest.constructor, Value::Object(manifest.parameters.clone()));
    Ok((CurvePath::new(manifest.times.clone(), frames, None, info)?, manifest))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::curve::CircleArc;
    use std::sync::Arc;

    #[test]
    fn curve_round_trip_is_exact() {
        let grid = Grid::new(16).unwrap();
        let c = DiscreteCurve::sample(grid, Arc::new(CircleArc::unit_speed())).unwrap();
        let mut buf = Vec::new();
        write_curve(&mut buf, &c).unwrap();
        let text = String::from_utf8(buf.clone()).unwrap();
        assert!(text.starts_with("theta,x0,x1\n"));
        assert_eq!(read_curve(buf.as_slice()).unwrap().samples(), c.samples());
    }

    #[test]
    fn rejects_non_uniform_theta() {
        let mut s = String::from("theta,phi\n");
        for j in 0..=8 {
            let t = if j == 3 { 0.4 } else { j as f64 / 8.0 };
            s += &format!("{t},{}\n", j as f64 / 8.0);
        }
        assert_eq!(read_diffeo(s.as_bytes()).unwrap_err().tag(), "grid-mismatch");
    }

    #[test]
    fn rejects_bad_header_and_garbage() {
        assert_eq!(read_curve("t,x0\n0,0\n".as_bytes()).unwrap_err().tag(), "format");
        assert_eq!(read_curve("theta,x0\n0,abc\n".as_bytes()).unwrap_err().tag(), "format");
    }
}
