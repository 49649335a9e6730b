use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_sobolev-curves"))
}

fn configs() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("configs")
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn run_config(sub: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![sub, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    run(&args)
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

/// Writes `text` as a config next to the shipped ones (relative CSV paths
/// keep resolving) and returns its path.
fn temp_config(dir: &tempfile::TempDir, name: &str, text: &str) -> PathBuf {
    let p = dir.path().join(name);
    std::fs::write(&p, text.replace("../fixtures", configs().join("../fixtures").to_str().unwrap())).unwrap();
    p
}

#[test]
fn verify_bounds_runs_without_a_config() {
    let out = tempfile::tempdir().unwrap();
    let o = run(&["verify-bounds", "--out", out.path().to_str().unwrap(), "--grid-n", "32", "--time-m", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
}

#[test]
fn verify_bounds_default_config_holds() {
    let out = tempfile::tempdir().unwrap();
    let o = run_config(
        "verify-bounds",
        &configs().join("verify_bounds.json"),
        out.path(),
        &["--grid-n", "64", "--time-m", "32"],
    );
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&out.path().join("bounds.json"));
    assert!(doc["rows"].as_array().unwrap().iter().all(|r| r["holds"] == true));
    assert!(out.path().join("bounds.csv").exists());
}

#[test]
fn tampered_tolerance_is_an_invariant_violation() {
    let dir = tempfile::tempdir().unwrap();
    let text = std::fs::read_to_string(configs().join("verify_bounds.json"))
        .unwrap()
        .replace("\"quadrature\": 1e-2", "\"quadrature\": 1e-15")
        .replace("\"checks\": [\"shrink\", \"translate\", \"rotate\", \"delta-lower\"]", "\"checks\": [\"shrink\"]");
    let cfg = temp_config(&dir, "tampered.json", &text);
    let o = run_config("verify-bounds", &cfg, &dir.path().join("out"), &["--grid-n", "64", "--time-m", "32"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("shrink"));
}

#[test]
fn vanishing_top_weight_makes_the_certificate_inapplicable() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = temp_config(
        &dir,
        "a2zero.json",
        r#"{"coefficients": {"n": 3, "a": [1.0, 1.0, 0.0, 1.0]}, "checks": ["delta-lower"], "cases": 2}"#,
    );
    let o = run_config("verify-bounds", &cfg, &dir.path().join("out"), &["--grid-n", "32", "--time-m", "16"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("inapplicable-certificate"));
}

#[test]
fn unknown_keys_and_usage_errors_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = temp_config(&dir, "bad.json", r#"{"coefficients": {"n": 2, "a": [1.0, 1.0, 1.0]}, "bogus": 3}"#);
    assert_eq!(run_config("verify-bounds", &cfg, &dir.path().join("out"), &[]).status.code(), Some(1));
    assert_eq!(run(&["geodesic"]).status.code(), Some(1));
    assert_eq!(run(&["no-such-command"]).status.code(), Some(1));
    assert_eq!(run(&["--help"]).status.code(), Some(0));
}

#[test]
fn geodesic_between_identical_curves_is_zero() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = temp_config(
        &dir,
        "same.json",
        r#"{"curve0": {"kind": "csv", "path": "../fixtures/segment.csv"},
            "curve1": {"kind": "csv", "path": "../fixtures/segment.csv"},
            "optimizer": {"max_iters": 10, "seeds": [16]}}"#,
    );
    let out = dir.path().join("out");
    let o = run_config("geodesic", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(json(&out.join("estimate.json"))["estimate"]["upper"].as_f64().unwrap(), 0.0);
}

#[test]
fn geodesic_translate_fixture_recovers_the_translation_cost() {
    let out = tempfile::tempdir().unwrap();
    let o = run_config("geodesic", &configs().join("geodesic_translate.json"), out.path(), &[]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    // |v₀|·√(a₀ℓ) with |v₀| = 1, ℓ = 1
    let upper = json(&out.path().join("estimate.json"))["estimate"]["upper"].as_f64().unwrap();
    assert!((upper - 1.0).abs() < 1e-3, "{upper}");
    let manifest = json(&out.path().join("path/manifest.json"));
    assert_eq!(manifest["frames"].as_array().unwrap().len(), manifest["times"].as_array().unwrap().len());
    assert!(out.path().join("path/length.csv").exists());
}

#[test]
fn geodesic_separation_fixture_brackets_above_delta() {
    let out = tempfile::tempdir().unwrap();
    let o = run_config("geodesic", &configs().join("geodesic_separation.json"), out.path(), &["--time-m", "16"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&out.path().join("estimate.json"));
    let lower = doc["estimate"]["lower"]["value"].as_f64().unwrap();
    let upper = doc["estimate"]["upper"].as_f64().unwrap();
    let delta = doc["separation_delta"]["value"].as_f64().unwrap();
    assert!(lower >= delta && upper >= lower, "{delta} {lower} {upper}");
}

#[test]
fn reversed_scalar_curves_are_disconnected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = temp_config(
        &dir,
        "reversed.json",
        r#"{"curve0": {"kind": "csv", "path": "../fixtures/scaled_identity.csv"},
            "curve1": {"kind": "diffeo", "diffeo": {"kind": "reversal"}, "scale": 0.2}}"#,
    );
    let o = run_config("geodesic", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(3));
    assert!(String::from_utf8_lossy(&o.stderr).contains("disconnected-components"));
}

#[test]
fn threshold_scan_config_straddles() {
    let out = tempfile::tempdir().unwrap();
    let o = run_config("experiment", &configs().join("threshold_scan.json"), out.path(), &["--grid-n", "128"]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = json(&out.path().join("threshold-scan.json"));
    let v = doc["report"]["verdicts"].as_array().unwrap();
    let threshold = v.iter().find(|x| x["claim"] == "threshold").unwrap();
    assert_eq!(threshold["verdict"], "straddles");
    assert!(out.path().join("threshold-scan.svg").exists());
}

#[test]
fn separation_config_separates_and_reruns_identically() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let cfg = configs().join("separation.json");
    let fast = ["--grid-n", "32", "--time-m", "16"];
    assert_eq!(run_config("experiment", &cfg, a.path(), &fast).status.code(), Some(0));
    assert_eq!(run_config("experiment", &cfg, b.path(), &fast).status.code(), Some(0));
    let doc = json(&a.path().join("separation.json"));
    let sep =
        doc["report"]["verdicts"].as_array().unwrap().iter().find(|x| x["claim"] == "separation").unwrap().clone();
    assert_eq!(sep["verdict"], "separated");
    let read = |d: &tempfile::TempDir| std::fs::read(d.path().join("separation.csv")).unwrap();
    assert_eq!(read(&a), read(&b));
}
