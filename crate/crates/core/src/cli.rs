//! Command-line front end: `verify-bounds`, `geodesic` and `experiment`.
//!
//! Exit codes: 0 success, 1 configuration error, 2 violated claim,
//! 3 domain error.

use std::fs;
use std::path::{Path, PathBuf};
use std::sync::Arc;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::bounds::{
    delta_lower_with, rotate_upper, separation_delta_with, shrink_upper, straight_shrink_length, translate_upper,
};
use crate::curve::{CircleArc, DiscreteCurve, Segment};
use crate::diffeo::{delta, DiscreteDiffeo};
use crate::error::{Error, Result};
use crate::geodesic::{geodesic_estimate, minimize_path_energy, normalized_diffeo, OptimizerOptions};
use crate::grid::Grid;
use crate::io::{export_path, read_curve_file, read_diffeo_file, write_length_report};
use crate::lab::{
    default_schedule, run_cauchy_diagnostic, run_limit_identification, run_separation_experiment, run_threshold_scan,
    ExperimentReport, SequenceFamily, SequenceSpec,
};
use crate::metric::MetricCoefficients;
use crate::path::{linear_interpolation_path, path_length, rotate_path, shrink_path, translate_path, Rotation};

pub const LIB_VERSION: &str = env!("CARGO_PKG_VERSION");
const DEFAULT_GRID_N: usize = 256;
const DEFAULT_TIME_M: usize = 64;

#[derive(Debug, Parser)]
#[command(name = "sobolev-curves", version, about = "Sobolev metrics on immersed open curves")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Measure canonical paths against their closed-form certificates.
    VerifyBounds(CommonArgs),
    /// Bracket the distance between two curves.
    Geodesic(CommonArgs),
    /// Run an experiment described by a config file.
    Experiment(CommonArgs),
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// JSON config file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
    /// Grid intervals N (overrides the config).
    #[arg(long)]
    pub grid_n: Option<usize>,
    /// Time intervals M (overrides the config).
    #[arg(long)]
    pub time_m: Option<usize>,
    /// RNG seed (overrides the config).
    #[arg(long)]
    pub seed: Option<u64>,
}

/// A failure together with the exit code it maps to.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl Failure {
    fn config(e: impl std::fmt::Display) -> Self {
        Failure { code: 1, message: e.to_string() }
    }
}

/// Errors raised while running (after the config validated).
fn runtime(e: Error) -> Failure {
    let code = match e {
        Error::Config(_) | Error::InvalidCoefficients(_) | Error::InapplicableCertificate(_) => 1,
        Error::InvariantViolation(_) => 2,
        _ => 3,
    };
    Failure { code, message: e.to_string() }
}

/// Parses `args` (including the program name) and runs; returns the exit
/// code after printing diagnostics to stderr.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    match run(&cli) {
        Ok(summary) => {
            println!("{summary}");
            0
        }
        Err(f) => {
            eprintln!("error: {}", f.message);
            f.code
        }
    }
}

pub fn run(cli: &Cli) -> std::result::Result<String, Failure> {
    match &cli.command {
        Command::VerifyBounds(a) => cmd_verify_bounds(a),
        Command::Geodesic(a) => cmd_geodesic(a),
        Command::Experiment(a) => cmd_experiment(a),
    }
}

// ------------------------------------------------------------- plumbing

struct Loaded {
    text: String,
    base: PathBuf,
    hash: String,
}

fn load(args: &CommonArgs, required: bool) -> std::result::Result<Loaded, Failure> {
    let (text, base) = match &args.config {
        Some(p) => (
            fs::read_to_string(p).map_err(|e| Failure::config(format!("config {}: {e}", p.display())))?,
            p.parent().map(Path::to_path_buf).unwrap_or_default(),
        ),
        None if required => return Err(Failure::config("this command needs --config <path>")),
        None => ("{}".to_string(), PathBuf::new()),
    };
    let mut h = Sha256::new();
    h.update(text.as_bytes());
    h.update(format!("\ngrid_n={:?};time_m={:?};seed={:?}", args.grid_n, args.time_m, args.seed).as_bytes());
    let hash = h.finalize().iter().map(|b| format!("{b:02x}")).collect();
    Ok(Loaded { text, base, hash })
}

fn parse<T: for<'de> Deserialize<'de>>(text: &str) -> std::result::Result<T, Failure> {
    serde_json::from_str(text).map_err(|e| Failure::config(format!("config: {e}")))
}

fn timestamp() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn write(dir: &Path, name: &str, bytes: impl AsRef<[u8]>) -> std::result::Result<(), Failure> {
    fs::create_dir_all(dir).map_err(|e| runtime(e.into()))?;
    fs::write(dir.join(name), bytes).map_err(|e| runtime(e.into()))
}

fn stamp(hash: &str) -> Map<String, Value> {
    let mut m = Map::new();
    m.insert("config_hash".into(), json!(hash));
    m.insert("lib_version".into(), json!(LIB_VERSION));
    m
}

fn grid(n: usize) -> std::result::Result<Grid, Failure> {
    Grid::new(n).map_err(Failure::config)
}

// ------------------------------------------------------------ curve specs

fn one() -> f64 {
    1.0
}

/// A curve in a config: analytic constructions or a CSV file (relative to
/// the config's directory).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CurveSpec {
    Segment {
        #[serde(default)]
        start: Option<Vec<f64>>,
        direction: Vec<f64>,
    },
    CircleArc {
        #[serde(default)]
        center: [f64; 2],
        radius: f64,
        #[serde(default)]
        start_angle: f64,
        sweep: f64,
    },
    /// Full circle `r(cos 2πθ, sin 2πθ)`.
    Circle {
        #[serde(default = "one")]
        radius: f64,
    },
    /// Scalar curve `scale·φ`.
    Diffeo {
        diffeo: DiffeoSpec,
        #[serde(default = "one")]
        scale: f64,
    },
    Csv {
        path: PathBuf,
    },
}

impl Default for CurveSpec {
    fn default() -> Self {
        CurveSpec::Circle { radius: 1.0 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum DiffeoSpec {
    Identity,
    Reversal,
    Exp { a: f64 },
    Hermite { s0: f64, s1: f64 },
    Csv { path: PathBuf },
}

impl CurveSpec {
    fn csv_path(&self) -> Option<&Path> {
        match self {
            CurveSpec::Csv { path } => Some(path),
            _ => None,
        }
    }

    pub fn build(&self, grid: Grid, base: &Path) -> Result<DiscreteCurve> {
        match self {
            CurveSpec::Segment { start, direction } => {
                let start = start.clone().unwrap_or_else(|| vec![0.0; direction.len()]);
                if start.len() != direction.len() || direction.is_empty() {
                    return Err(Error::Config("segment start and direction differ in dimension".into()));
                }
                DiscreteCurve::sample(grid, Arc::new(Segment::new(start, direction.clone())))
            }
            CurveSpec::CircleArc { center, radius, start_angle, sweep } => DiscreteCurve::sample(
                grid,
                Arc::new(CircleArc { center: *center, radius: *radius, start_angle: *start_angle, sweep: *sweep }),
            ),
            CurveSpec::Circle { radius } => DiscreteCurve::sample(grid, Arc::new(CircleArc::full(*radius))),
            CurveSpec::Diffeo { diffeo, scale } => DiscreteCurve::from_diffeo(&diffeo.build(grid, base)?, *scale),
            CurveSpec::Csv { path } => {
                let c = read_curve_file(base.join(path))?;
                if c.grid() != grid {
                    return Err(Error::GridMismatch(format!(
                        "{} has N = {}, the run uses N = {}",
                        path.display(),
                        c.grid().intervals(),
                        grid.intervals()
                    )));
                }
                Ok(c)
            }
        }
    }
}

impl DiffeoSpec {
    pub fn build(&self, grid: Grid, base: &Path) -> Result<DiscreteDiffeo> {
        match self {
            DiffeoSpec::Identity => Ok(DiscreteDiffeo::identity(grid)),
            DiffeoSpec::Reversal => Ok(DiscreteDiffeo::reversal(grid)),
            DiffeoSpec::Exp { a } => DiscreteDiffeo::exp_family(grid, *a),
            DiffeoSpec::Hermite { s0, s1 } => DiscreteDiffeo::hermite(grid, *s0, *s1),
            DiffeoSpec::Csv { path } => {
                let d = read_diffeo_file(base.join(path))?;
                if d.grid() != grid {
                    return Err(Error::GridMismatch(format!("{} is on a different grid", path.display())));
                }
                Ok(d)
            }
        }
    }
}

/// Grid size: flag, then config, then the first CSV input, then 256.
fn resolve_grid(flag: Option<usize>, config: Option<usize>, csvs: &[&Path], base: &Path) -> Result<Grid> {
    if let Some(n) = flag.or(config) {
        return Grid::new(n);
    }
    match csvs.first() {
        Some(p) => Ok(read_curve_file(base.join(p))?.grid()),
        None => Grid::new(DEFAULT_GRID_N),
    }
}

// --------------------------------------------------------- verify-bounds

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Check {
    Shrink,
    Translate,
    Rotate,
    DeltaLower,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Tolerances {
    /// Relative, for identities that hold up to roundoff.
    pub exact: f64,
    /// Absolute, for comparisons against quadrature oracles.
    pub quadrature: f64,
    /// Absolute slack of lower bounds.
    pub lower: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances { exact: 1e-6, quadrature: 1e-2, lower: 1e-6 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyBoundsConfig {
    pub coefficients: MetricCoefficients,
    pub grid_n: Option<usize>,
    pub time_m: Option<usize>,
    pub seed: Option<u64>,
    /// Random cases per check.
    pub cases: usize,
    pub checks: Vec<Check>,
    pub tolerances: Tolerances,
    /// Lower end of the shrink paths.
    pub t_min: f64,
    /// Optimizer iterations for the delta-lower paths.
    pub optimizer_iters: usize,
}

impl Default for VerifyBoundsConfig {
    fn default() -> Self {
        VerifyBoundsConfig {
            coefficients: MetricCoefficients::default(),
            grid_n: None,
            time_m: None,
            seed: None,
            cases: 10,
            checks: vec![Check::Shrink, Check::Translate, Check::Rotate, Check::DeltaLower],
            tolerances: Tolerances::default(),
            t_min: 1e-6,
            optimizer_iters: 100,
        }
    }
}

/// One measured-versus-certified comparison.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundRow {
    pub check: String,
    pub case: usize,
    pub measured: f64,
    pub certificate: f64,
    /// Second reference value (the shrink oracle), if any.
    pub reference: Option<f64>,
    pub tolerance: f64,
    pub holds: bool,
}

fn unit_vector(rng: &mut ChaCha8Rng, dim: usize) -> Vec<f64> {
    loop {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let n = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if n > 0.1 {
            return v.iter().map(|x| x / n).collect();
        }
    }
}

fn random_arc(rng: &mut ChaCha8Rng, grid: Grid) -> Result<DiscreteCurve> {
    let arc = CircleArc {
        center: [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)],
        radius: rng.gen_range(0.3..2.0),
        start_angle: rng.gen_range(0.0..std::f64::consts::TAU),
        sweep: rng.gen_range(0.3..4.0) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 },
    };
    DiscreteCurve::sample(grid, Arc::new(arc))
}

pub fn verify_bounds(cfg: &VerifyBoundsConfig, grid: Grid, time_m: usize, seed: u64) -> Result<Vec<BoundRow>> {
    let g = &cfg.coefficients;
    let tol = &cfg.tolerances;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![];
    let rel = |a: f64, b: f64| (a - b).abs() <= tol.exact * b.abs().max(f64::MIN_POSITIVE);
    for check in &cfg.checks {
        for case in 0..cfg.cases {
            match check {
                Check::Shrink => {
                    let l = rng.gen_range(0.2..3.0);
                    let u = unit_vector(&mut rng, 2);
                    let phi = DiscreteDiffeo::exp_family(grid, rng.gen_range(-1.0..1.0))?;
                    let s: Vec<f64> = phi.samples().iter().flat_map(|p| [l * p * u[0], l * p * u[1]]).collect();
                    let c = DiscreteCurve::new(grid, 2, s)?;
                    let measured = path_length(&shrink_path(&c, cfg.t_min, time_m)?, g)?.length;
                    let cert = shrink_upper(g, l)?.value;
                    let oracle = straight_shrink_length(g, &c, 0.0)?;
                    rows.push(BoundRow {
                        check: "shrink".into(),
                        case,
                        measured,
                        certificate: cert,
                        reference: Some(oracle),
                        tolerance: tol.quadrature,
                        holds: measured <= cert && measured >= oracle - tol.quadrature,
                    });
                }
                Check::Translate => {
                    let c = random_arc(&mut rng, grid)?;
                    let v0: Vec<f64> = (0..2).map(|_| rng.gen_range(-2.0..2.0)).collect();
                    let measured = path_length(&translate_path(&c, &v0, time_m)?, g)?.length;
                    let n = v0.iter().map(|x| x * x).sum::<f64>().sqrt();
                    let cert = translate_upper(g, c.length(), n)?.value;
                    rows.push(BoundRow {
                        check: "translate".into(),
                        case,
                        measured,
                        certificate: cert,
                        reference: None,
                        tolerance: tol.exact,
                        holds: rel(measured, cert),
                    });
                }
                Check::Rotate => {
                    let c = random_arc(&mut rng, grid)?;
                    let angle = rng.gen_range(-std::f64::consts::PI..std::f64::consts::PI);
                    let measured = path_length(&rotate_path(&c, Rotation::Planar(angle), time_m)?, g)?.length;
                    let cert = rotate_upper(g, &c, angle)?.value;
                    rows.push(BoundRow {
                        check: "rotate".into(),
                        case,
                        measured,
                        certificate: cert,
                        reference: None,
                        tolerance: tol.exact,
                        holds: rel(measured, cert),
                    });
                }
                Check::DeltaLower => {
                    let l = rng.gen_range(0.05..1.0);
                    let a = rng.gen_range(0.2..1.5);
                    let c0 = DiscreteCurve::from_diffeo(&DiscreteDiffeo::identity(grid), l)?;
                    let c1 = DiscreteCurve::from_diffeo(&DiscreteDiffeo::exp_family(grid, a)?, l)?;
                    let big_delta = delta(&normalized_diffeo(&c0)?, &normalized_diffeo(&c1)?)?;
                    let seed_path = linear_interpolation_path(&c0, &c1, time_m.max(16))?;
                    let opts = OptimizerOptions { max_iters: cfg.optimizer_iters, ..Default::default() };
                    let (opt, _) = minimize_path_energy(&seed_path, g, &opts)?;
                    for (k, p) in [seed_path, opt].iter().enumerate() {
                        let measured = path_length(p, g)?.length;
                        let cert = delta_lower_with(big_delta, g, p.max_frame_length())?.value;
                        rows.push(BoundRow {
                            check: if k == 0 { "delta-lower/linear" } else { "delta-lower/optimized" }.into(),
                            case,
                            measured,
                            certificate: cert,
                            reference: None,
                            tolerance: tol.lower,
                            holds: measured >= cert - tol.lower,
                        });
                    }
                }
            }
        }
    }
    Ok(rows)
}

pub fn cmd_verify_bounds(args: &CommonArgs) -> std::result::Result<String, Failure> {
    let loaded = load(args, false)?;
    let cfg: VerifyBoundsConfig = parse(&loaded.text)?;
    let grid = grid(args.grid_n.or(cfg.grid_n).unwrap_or(DEFAULT_GRID_N))?;
    let time_m = args.time_m.or(cfg.time_m).unwrap_or(DEFAULT_TIME_M);
    let seed = args.seed.or(cfg.seed).unwrap_or(0);
    if !(cfg.t_min > 0.0 && cfg.t_min < 1.0) {
        return Err(Failure::config(format!("t_min = {} must lie in (0, 1)", cfg.t_min)));
    }
    if cfg.checks.contains(&Check::DeltaLower) {
        delta_lower_with(1.0, &cfg.coefficients, 1.0).map_err(Failure::config)?;
    }
    if cfg.checks.contains(&Check::Shrink) {
        shrink_upper(&cfg.coefficients, 1.0).map_err(Failure::config)?;
    }

    let rows = verify_bounds(&cfg, grid, time_m, seed).map_err(runtime)?;
    let mut w = csv::Writer::from_writer(vec![]);
    let csv_err = |e: csv::Error| runtime(e.into());
    w.write_record([
        "check",
        "case",
        "measured",
        "certificate",
        "reference",
        "tolerance",
        "holds",
        "config_hash",
        "lib_version",
    ])
    .map_err(csv_err)?;
    for r in &rows {
        w.write_record([
            r.check.clone(),
            r.case.to_string(),
            format!("{:.16e}", r.measured),
            format!("{:.16e}", r.certificate),
            r.reference.map(|x| format!("{x:.16e}")).unwrap_or_default(),
            format!("{:e}", r.tolerance),
            r.holds.to_string(),
            loaded.hash.clone(),
            LIB_VERSION.into(),
        ])
        .map_err(csv_err)?;
    }
    let bytes = w.into_inner().map_err(|e| runtime(Error::Io(e.to_string())))?;
    write(&args.out, "bounds.csv", bytes)?;

    let failed: Vec<String> =
        rows.iter().filter(|r| !r.holds).map(|r| format!("{} case {}", r.check, r.case)).collect();
    let mut doc = stamp(&loaded.hash);
    doc.insert("timestamp".into(), json!(timestamp()));
    doc.insert("all_hold".into(), json!(failed.is_empty()));
    doc.insert("failed".into(), json!(failed));
    doc.insert("grid_n".into(), json!(grid.intervals()));
    doc.insert("time_m".into(), json!(time_m));
    doc.insert("seed".into(), json!(seed));
    doc.insert("config".into(), serde_json::to_value(&cfg).map_err(|e| runtime(e.into()))?);
    doc.insert("rows".into(), serde_json::to_value(&rows).map_err(|e| runtime(e.into()))?);
    write(&args.out, "bounds.json", serde_json::to_string_pretty(&doc).unwrap() + "\n")?;

    if failed.is_empty() {
        Ok(format!("all {} bound checks hold", rows.len()))
    } else {
        Err(Failure { code: 2, message: format!("violated bound: {}", failed.join(", ")) })
    }
}

// -------------------------------------------------------------- geodesic

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicConfig {
    pub curve0: CurveSpec,
    pub curve1: CurveSpec,
    #[serde(default)]
    pub coefficients: MetricCoefficients,
    #[serde(default)]
    pub grid_n: Option<usize>,
    #[serde(default)]
    pub optimizer: OptimizerOptions,
}

pub fn cmd_geodesic(args: &CommonArgs) -> std::result::Result<String, Failure> {
    let loaded = load(args, true)?;
    let cfg: GeodesicConfig = parse(&loaded.text)?;
    let csvs: Vec<&Path> = [&cfg.curve0, &cfg.curve1].iter().filter_map(|c| c.csv_path()).collect();
    let grid = resolve_grid(args.grid_n, cfg.grid_n, &csvs, &loaded.base).map_err(Failure::config)?;
    let c0 = cfg.curve0.build(grid, &loaded.base).map_err(Failure::config)?;
    let c1 = cfg.curve1.build(grid, &loaded.base).map_err(Failure::config)?;
    let mut opts = cfg.optimizer.clone();
    if let Some(m) = args.time_m {
        opts.seeds = vec![m];
    }
    if let Some(s) = args.seed {
        opts.seed = s;
    }
    let g = &cfg.coefficients;

    let est = geodesic_estimate(&c0, &c1, g, &opts).map_err(runtime)?;
    let separation = match &est.lower {
        Some(l) => {
            Some(separation_delta_with(l.inputs.delta.unwrap_or(0.0), g, est.max_frame_length).map_err(runtime)?)
        }
        None => None,
    };
    let mut doc = stamp(&loaded.hash);
    doc.insert("timestamp".into(), json!(timestamp()));
    doc.insert("grid_n".into(), json!(grid.intervals()));
    doc.insert("estimate".into(), serde_json::to_value(&est).map_err(|e| runtime(e.into()))?);
    doc.insert("separation_delta".into(), serde_json::to_value(&separation).map_err(|e| runtime(e.into()))?);
    write(&args.out, "estimate.json", serde_json::to_string_pretty(&doc).unwrap() + "\n")?;

    let lower = est.lower.as_ref().map(|l| format!("{:.16e}", l.value)).unwrap_or_default();
    let gap = est.gap.map(|x| format!("{x:.16e}")).unwrap_or_default();
    let csv = format!(
        "upper,lower,gap,max_frame_length,best_time_m,config_hash,lib_version\n{:.16e},{lower},{gap},{:.16e},{},{},{}\n",
        est.upper, est.max_frame_length, est.candidates[est.best].time_m, loaded.hash, LIB_VERSION
    );
    write(&args.out, "estimate.csv", csv)?;
    let pdir = args.out.join("path");
    export_path(&pdir, &est.path, stamp(&loaded.hash)).map_err(runtime)?;
    let mut buf = vec![];
    write_length_report(&mut buf, &path_length(&est.path, g).map_err(runtime)?).map_err(runtime)?;
    write(&pdir, "length.csv", buf)?;

    Ok(match &est.lower {
        Some(l) => format!("distance in [{:.6e}, {:.6e}]", l.value, est.upper),
        None => format!("distance ≤ {:.6e}", est.upper),
    })
}

// ------------------------------------------------------------ experiment

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    ThresholdScan,
    Separation,
    Cauchy,
    LimitIdentification,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub family: Family,
    #[serde(default)]
    pub coefficients: MetricCoefficients,
    #[serde(default)]
    pub grid_n: Option<usize>,
    #[serde(default)]
    pub time_m: Option<usize>,
    #[serde(default)]
    pub seed: Option<u64>,
    /// Family-specific parameters.
    #[serde(default)]
    pub parameters: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ThresholdParams {
    pub curve: CurveSpec,
    pub alphas: Vec<f64>,
    pub epsilons: Vec<f64>,
}

impl Default for ThresholdParams {
    fn default() -> Self {
        ThresholdParams {
            curve: CurveSpec::default(),
            alphas: vec![0.0, 0.5, 0.9, 1.0],
            epsilons: vec![1e-2, 1e-3, 1e-4, 1e-5],
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SeparationParams {
    pub phi: DiffeoSpec,
    pub psi: DiffeoSpec,
    pub schedule: Vec<f64>,
    pub optimizer: OptimizerOptions,
}

impl Default for SeparationParams {
    fn default() -> Self {
        SeparationParams {
            phi: DiffeoSpec::Identity,
            psi: DiffeoSpec::Exp { a: 1.0 },
            schedule: default_schedule(0.1, 6),
            optimizer: OptimizerOptions::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CauchyParams {
    pub sequence: SequenceFamily,
    pub schedule: Vec<f64>,
    pub phi: DiffeoSpec,
    pub dim: usize,
    pub translations: Vec<Vec<f64>>,
    pub rotations: Vec<f64>,
    pub base: CurveSpec,
    pub alpha: f64,
}

impl Default for CauchyParams {
    fn default() -> Self {
        CauchyParams {
            sequence: SequenceFamily::StraightLine,
            schedule: default_schedule(1.0, 6),
            phi: DiffeoSpec::Identity,
            dim: 1,
            translations: vec![],
            rotations: vec![],
            base: CurveSpec::default(),
            alpha: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct LimitParams {
    pub curve: CurveSpec,
    pub alpha: f64,
    pub schedule: Vec<f64>,
}

impl Default for LimitParams {
    fn default() -> Self {
        LimitParams { curve: CurveSpec::default(), alpha: 0.5, schedule: default_schedule(0.1, 6) }
    }
}

fn params<T: for<'de> Deserialize<'de> + Default>(v: &Value) -> std::result::Result<T, Failure> {
    if v.is_null() {
        return Ok(T::default());
    }
    serde_json::from_value(v.clone()).map_err(|e| Failure::config(format!("parameters: {e}")))
}

enum Job {
    Threshold(DiscreteCurve, ThresholdParams),
    Separation(DiscreteDiffeo, DiscreteDiffeo, SeparationParams),
    Cauchy(SequenceSpec),
    Limit(DiscreteCurve, LimitParams, usize),
}

pub fn cmd_experiment(args: &CommonArgs) -> std::result::Result<String, Failure> {
    let loaded = load(args, true)?;
    let cfg: ExperimentConfig = parse(&loaded.text)?;
    let grid = grid(args.grid_n.or(cfg.grid_n).unwrap_or(DEFAULT_GRID_N))?;
    let time_m = args.time_m.or(cfg.time_m).unwrap_or(DEFAULT_TIME_M);
    let seed = args.seed.or(cfg.seed);
    let g = &cfg.coefficients;
    let base = &loaded.base;
    let cfg_err = Failure::config;

    // build and validate everything before running
    let job = match cfg.family {
        Family::ThresholdScan => {
            let p: ThresholdParams = params(&cfg.parameters)?;
            Job::Threshold(p.curve.build(grid, base).map_err(cfg_err)?, p)
        }
        Family::Separation => {
            let mut p: SeparationParams = params(&cfg.parameters)?;
            if let Some(s) = seed {
                p.optimizer.seed = s;
            }
            if let Some(m) = args.time_m {
                p.optimizer.seeds = vec![m];
            }
            if g.weight(2) <= 0.0 {
                return Err(cfg_err(Error::InapplicableCertificate("separation needs a₂ > 0".into())));
            }
            Job::Separation(p.phi.build(grid, base).map_err(cfg_err)?, p.psi.build(grid, base).map_err(cfg_err)?, p)
        }
        Family::Cauchy => {
            let p: CauchyParams = params(&cfg.parameters)?;
            let spec = match p.sequence {
                SequenceFamily::StraightLine => {
                    SequenceSpec::straight_line(p.phi.build(grid, base).map_err(cfg_err)?, p.dim, p.schedule)
                        .with_translations(p.translations)
                        .with_rotations(p.rotations)
                }
                SequenceFamily::ShortenedCurve => {
                    SequenceSpec::shortened_curve(p.base.build(grid, base).map_err(cfg_err)?, p.schedule)
                }
                SequenceFamily::PowerShrinkShorten => {
                    SequenceSpec::power_shrink_shorten(p.base.build(grid, base).map_err(cfg_err)?, p.alpha, p.schedule)
                }
                SequenceFamily::VanishingCircles => SequenceSpec::vanishing_circles(grid, p.schedule),
            };
            spec.validate().map_err(|e| match e {
                Error::DisconnectedComponents(_) => runtime(e),
                other => cfg_err(other),
            })?;
            Job::Cauchy(spec)
        }
        Family::LimitIdentification => {
            let p: LimitParams = params(&cfg.parameters)?;
            Job::Limit(p.curve.build(grid, base).map_err(cfg_err)?, p, time_m)
        }
    };

    let report: ExperimentReport = match &job {
        Job::Threshold(c, p) => run_threshold_scan(c, g, &p.alphas, &p.epsilons),
        Job::Separation(phi, psi, p) => run_separation_experiment(phi, psi, g, &p.schedule, &p.optimizer),
        Job::Cauchy(spec) => run_cauchy_diagnostic(spec, g),
        Job::Limit(c, p, m) => run_limit_identification(c, g, p.alpha, &p.schedule, *m),
    }
    .map_err(|e| match e {
        Error::InvalidParameter(_) | Error::InsufficientRegularity(_) => cfg_err(e),
        other => runtime(other),
    })?;

    let name = report.experiment.clone();
    let mut buf = vec![];
    report.write_csv(&mut buf, &[("config_hash", &loaded.hash), ("lib_version", LIB_VERSION)]).map_err(runtime)?;
    write(&args.out, &format!("{name}.csv"), buf)?;
    let mut doc = stamp(&loaded.hash);
    doc.insert("timestamp".into(), json!(timestamp()));
    doc.insert("config".into(), serde_json::to_value(&cfg).map_err(|e| runtime(e.into()))?);
    doc.insert("report".into(), serde_json::to_value(&report).map_err(|e| runtime(e.into()))?);
    write(&args.out, &format!("{name}.json"), serde_json::to_string_pretty(&doc).unwrap() + "\n")?;
    if let Some(svg) = report.plot() {
        let svg = svg.replacen('\n', &format!("\n<!-- config_hash={} lib_version={LIB_VERSION} -->\n", loaded.hash), 1);
        write(&args.out, &format!("{name}.svg"), svg)?;
    }
    let verdicts: Vec<String> = report.verdicts.iter().map(|v| format!("{}: {}", v.claim, v.verdict)).collect();
    Ok(format!("{name}: {}", verdicts.join("; ")))
}
