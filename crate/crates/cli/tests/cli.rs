//! End-to-end runs of the weylkit binary: exit codes, error payloads,
//! provenance headers, file formats, and byte-level determinism.

use std::path::Path;
use std::process::{Command, Output};

use weylkit_core::{HeatKernelCoefficients, Spectrum};

fn weylkit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylkit"))
        .args(args)
        .output()
        .expect("binary should spawn")
}

fn weylkit_with_env(args: &[&str], key: &str, value: &str) -> Output {
    Command::new(env!("CARGO_BIN_EXE_weylkit"))
        .args(args)
        .env(key, value)
        .output()
        .expect("binary should spawn")
}

fn stderr_error_kind(output: &Output) -> String {
    let text = String::from_utf8_lossy(&output.stderr);
    let doc: serde_json::Value =
        serde_json::from_str(text.trim()).unwrap_or_else(|_| panic!("stderr not JSON: {text}"));
    doc["error"]["kind"]
        .as_str()
        .unwrap_or_else(|| panic!("no error.kind in {text}"))
        .to_owned()
}

#[test]
fn spectrum_writes_provenance_then_header_then_rows() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("levels.csv");
    let run = weylkit(&[
        "spectrum",
        "--shape",
        "box",
        "--D",
        "2",
        "--L",
        "1,1",
        "--lambda-max",
        "100",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let text = std::fs::read_to_string(&out).unwrap();
    let mut lines = text.lines();
    let first = lines.next().unwrap();
    assert!(
        first.starts_with("# tool=weylkit v"),
        "unexpected first line {first:?}"
    );
    assert!(lines.next().unwrap().starts_with("# config_hash="));
    let header = lines
        .clone()
        .find(|l| !l.starts_with('#'))
        .expect("a header row");
    assert_eq!(header, "lambda,multiplicity,cumulative");
    // Levels at or below 100: 2 pi^2, 5 pi^2 (x2), 8 pi^2, 10 pi^2 (x2).
    let data: Vec<&str> = lines.filter(|l| !l.starts_with('#')).skip(1).collect();
    assert_eq!(data.len(), 4);
    assert!(data.last().unwrap().ends_with(",6"));
}

#[test]
fn missing_required_flag_is_a_usage_error() {
    let run = weylkit(&[
        "count",
        "--shape",
        "box",
        "--D",
        "2",
        "--L",
        "1,1",
        "--lambda-max",
        "100",
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert_eq!(stderr_error_kind(&run), "InvalidInput");
}

#[test]
fn malformed_grid_is_a_usage_error() {
    let run = weylkit(&[
        "count",
        "--shape",
        "box",
        "--D",
        "2",
        "--L",
        "1,1",
        "--lambda-max",
        "100",
        "--lambda-grid",
        "10:20",
    ]);
    assert_eq!(run.status.code(), Some(2));
    assert_eq!(stderr_error_kind(&run), "InvalidInput");
}

#[test]
fn truncation_below_first_eigenvalue_is_a_numerical_error() {
    let run = weylkit(&[
        "spectrum",
        "--shape",
        "box",
        "--D",
        "2",
        "--L",
        "1,1",
        "--lambda-max",
        "10",
    ]);
    assert_eq!(run.status.code(), Some(3));
    assert_eq!(stderr_error_kind(&run), "EmptySpectrum");
}

#[test]
fn repeated_runs_are_byte_identical() {
    // The grid stays below half the truncation bound so the dropped
    // Fermi tail is certifiable at the widest scheduled beta.
    let args = [
        "count",
        "--shape",
        "ball3d",
        "--R",
        "1",
        "--lambda-max",
        "400",
        "--lambda-grid",
        "20:200:7",
        "--format",
        "json",
    ];
    let a = weylkit(&args);
    let b = weylkit(&args);
    assert!(a.status.success(), "{}", String::from_utf8_lossy(&a.stderr));
    assert_eq!(a.stdout, b.stdout);
    assert!(!a.stdout.is_empty());
}

#[test]
fn thread_count_never_changes_the_bytes() {
    let args = [
        "heat",
        "--shape",
        "box",
        "--D",
        "3",
        "--L",
        "1,1,1",
        "--lambda-max",
        "1500",
        "--t-grid",
        "0.01:0.05:5",
    ];
    let serial = weylkit_with_env(&args, "WEYLKIT_THREADS", "1");
    let parallel = weylkit_with_env(&args, "WEYLKIT_THREADS", "3");
    assert!(serial.status.success());
    assert_eq!(serial.stdout, parallel.stdout);
}

#[test]
fn bad_thread_env_is_rejected_before_any_work() {
    let run = weylkit_with_env(&["coeffs", "--shape", "disk"], "WEYLKIT_THREADS", "many");
    assert_eq!(run.status.code(), Some(2));
    assert_eq!(stderr_error_kind(&run), "InvalidInput");
}

#[test]
fn coeffs_artifact_reads_back_through_the_library() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("ball.hk.json");
    let run = weylkit(&[
        "coeffs",
        "--shape",
        "ball3d",
        "--R",
        "2",
        "--coeffs-out",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("table.csv").to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let hk = HeatKernelCoefficients::read_json(&path).unwrap();
    assert_eq!(hk.dimension(), 3);
    let volume = 4.0 / 3.0 * std::f64::consts::PI * 8.0;
    assert_eq!(hk.get(0), Some(volume));
}

#[test]
fn transform_and_solve_consume_a_coeffs_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("hk.json");
    let run = weylkit(&[
        "coeffs",
        "--shape",
        "box",
        "--D",
        "2",
        "--L",
        "1,1",
        "--coeffs-out",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("table.csv").to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let transform = weylkit(&["transform", "--coeffs-file", path.to_str().unwrap()]);
    assert!(transform.status.success());
    let text = String::from_utf8_lossy(&transform.stdout);
    assert!(text.contains("power,0,7.9577471545947673e-2"), "{text}");
    let solve = weylkit(&[
        "solve",
        "--coeffs-file",
        path.to_str().unwrap(),
        "--n-grid",
        "10:100:3",
    ]);
    assert!(solve.status.success(), "{}", String::from_utf8_lossy(&solve.stderr));
    let text = String::from_utf8_lossy(&solve.stdout);
    assert!(text.lines().any(|l| l.starts_with("10,")), "{text}");
}

#[test]
fn spectrum_artifact_feeds_count_and_density() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("square-levels.json");
    let run = weylkit(&[
        "spectrum",
        "--shape",
        "box",
        "--D",
        "2",
        "--L",
        "1,1",
        "--lambda-max",
        "2000",
        "--spectrum-out",
        path.to_str().unwrap(),
        "--out",
        dir.path().join("table.csv").to_str().unwrap(),
    ]);
    assert!(run.status.success());
    let reread = Spectrum::read_json(Path::new(path.to_str().unwrap())).unwrap();
    assert_eq!(reread.truncation_bound(), 2000.0);

    let count = weylkit(&[
        "count",
        "--spectrum-file",
        path.to_str().unwrap(),
        "--lambda-grid",
        "100:800:4",
    ]);
    assert!(count.status.success(), "{}", String::from_utf8_lossy(&count.stderr));
    let density = weylkit(&[
        "density",
        "--spectrum-file",
        path.to_str().unwrap(),
        "--lambda-grid",
        "100:800:4",
    ]);
    assert!(density.status.success(), "{}", String::from_utf8_lossy(&density.stderr));
    let text = String::from_utf8_lossy(&density.stdout);
    assert!(text.lines().any(|l| l.starts_with("lambda,")), "{text}");
}

#[test]
fn config_file_fills_gaps_and_flags_override() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    std::fs::write(
        &cfg,
        r#"{"shape": "box", "dimension": 2, "sides": [1.0, 1.0],
            "lambda_max": 500.0, "lambda_grid": "50:250:3"}"#,
    )
    .unwrap();
    let from_config = weylkit(&["count", "--config", cfg.to_str().unwrap()]);
    assert!(
        from_config.status.success(),
        "{}",
        String::from_utf8_lossy(&from_config.stderr)
    );
    let rows = String::from_utf8_lossy(&from_config.stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .count();
    assert_eq!(rows, 1 + 3);

    let overridden = weylkit(&[
        "count",
        "--config",
        cfg.to_str().unwrap(),
        "--lambda-grid",
        "50:250:5",
    ]);
    assert!(overridden.status.success());
    let rows = String::from_utf8_lossy(&overridden.stdout)
        .lines()
        .filter(|l| !l.starts_with('#'))
        .count();
    assert_eq!(rows, 1 + 5);

    std::fs::write(&cfg, r#"{"shape": "box", "lambda_maximum": 1.0}"#).unwrap();
    let bad = weylkit(&["count", "--config", cfg.to_str().unwrap()]);
    assert_eq!(bad.status.code(), Some(2));
}

#[test]
fn shape_and_file_sources_conflict() {
    let run = weylkit(&[
        "transform",
        "--shape",
        "disk",
        "--coeffs-file",
        "whatever.json",
    ]);
    assert_eq!(run.status.code(), Some(2));
}

#[test]
fn verify_reports_failed_checks_with_exit_3() {
    // Two betas a few ulps apart make the schedule converge while the
    // smoothing window is still far too wide, so the smoothed count
    // disagrees with the direct one and the check rows must say so.
    let run = weylkit(&[
        "verify",
        "--shape",
        "box",
        "--D",
        "2",
        "--L",
        "1,1",
        "--lambda-max",
        "2000",
        "--beta",
        "0.05,0.0500000000000005,900000",
    ]);
    assert_eq!(run.status.code(), Some(3));
    assert_eq!(stderr_error_kind(&run), "VerificationFailed");
    let text = String::from_utf8_lossy(&run.stdout);
    assert!(text.contains("smoothed_pre_round_dev_max"), "{text}");
    assert!(text.lines().any(|l| l.ends_with(",false")), "{text}");
}

#[test]
fn verify_writes_a_counts_companion_next_to_out() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("report.csv");
    let run = weylkit(&[
        "verify",
        "--shape",
        "box",
        "--D",
        "2",
        "--L",
        "1,1",
        "--lambda-max",
        "1000",
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    let counts = dir.path().join("report-counts.csv");
    let text = std::fs::read_to_string(&counts).unwrap();
    assert!(text.contains("# table=counts"));
    assert_eq!(
        text.lines().filter(|l| !l.starts_with('#')).count(),
        1 + 200
    );
}
