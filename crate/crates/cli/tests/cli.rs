use std::fs;
use std::path::Path;
use std::process::Command;

use tempfile::TempDir;

const BIN: &str = env!("CARGO_BIN_EXE_fpiter");

fn write_config(dir: &Path, body: &str) -> std::path::PathBuf {
    let p = dir.join("exp.toml");
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> std::process::Output {
    Command::new(BIN).args(args).output().unwrap()
}

const HALVING: &str = r#"
seed = 7
schemes = ["picard", "ky", "s", "normal_s"]
comparisons = [["ky", "s"], ["ky", "normal_s"]]

[stop]
residual_tol = 1e-12
max_iter = 200

[[problems]]
builtin = "halving"

[[schedules]]
name = "half"
alpha = 0.5
beta = 0.5
lambda = 0.5
"#;

#[test]
fn trace_csv_schema_and_values() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        &HALVING.replace("max_iter = 200", "max_iter = 3"),
    );
    let out = dir.path().join("out");
    let o = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("traces/halving__half__picard.csv")).unwrap();
    let rows: Vec<Vec<&str>> = csv.lines().map(|l| l.split(',').collect()).collect();
    assert_eq!(rows[0], ["n", "x0", "error", "residual", "dist_to_F"]);
    assert_eq!(rows.len(), 4);
    for (row, e) in rows[1..].iter().zip([1.0, 0.5, 0.25]) {
        assert_eq!(row[2].parse::<f64>().unwrap(), e);
        assert_eq!(row[3].parse::<f64>().unwrap(), e / 2.0);
        assert_eq!(row[4].parse::<f64>().unwrap(), e);
    }
    assert!(out.join("summary.json").exists());
    assert!(out.join("comparisons.csv").exists());
}

#[test]
fn empty_schemes_exit_one_with_line() {
    let dir = TempDir::new().unwrap();
    let body = HALVING
        .replace(
            r#"schemes = ["picard", "ky", "s", "normal_s"]"#,
            "schemes = []",
        )
        .replace(r#"comparisons = [["ky", "s"], ["ky", "normal_s"]]"#, "");
    let cfg = write_config(dir.path(), &body);
    let o = run(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("line 3: schemes: empty"), "{err}");
}

#[test]
fn unwritable_output_dir_exit_two() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), HALVING);
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let out = blocker.join("sub");
    let o = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert_eq!(
        o.status.code(),
        Some(2),
        "{}",
        String::from_utf8_lossy(&o.stderr)
    );
}

#[test]
fn summary_reports_ky_faster_than_s() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), HALVING);
    let out = dir.path().join("out");
    let o = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(v["schema_version"], "1");
    assert_eq!(v["seed"], 7);
    let cmp = v["comparisons"].as_array().unwrap();
    assert_eq!(cmp.len(), 2);
    assert!(cmp
        .iter()
        .any(|c| c["a"] == "ky" && c["b"] == "s" && c["classification"] == "A_faster"));
    let slope = cmp[1]["fitted_log_slope"].as_f64().unwrap();
    let predicted = cmp[1]["bound_log_slope"].as_f64().unwrap();
    assert!((slope - predicted).abs() < 1e-6);
    let runs = v["runs"].as_array().unwrap();
    assert_eq!(runs.len(), 4);
    assert!(runs
        .iter()
        .all(|r| r["stop_reason"] == "residual_below_tol"));
    let checks = v["checks"].as_array().unwrap();
    assert!(checks.iter().all(|c| c["status"] != "FAIL"), "{checks:?}");
}

#[test]
fn no_comparisons_gives_empty_array() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(
        dir.path(),
        &HALVING.replace(r#"comparisons = [["ky", "s"], ["ky", "normal_s"]]"#, ""),
    );
    let out = dir.path().join("out");
    assert!(run(&[
        "run",
        cfg.to_str().unwrap(),
        "--output-dir",
        out.to_str().unwrap()
    ])
    .status
    .success());
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(v["comparisons"], serde_json::json!([]));
}

#[test]
fn misdeclared_class_rejected_on_load() {
    let dir = TempDir::new().unwrap();
    let body = r#"
schemes = ["picard"]

[stop]
residual_tol = 1e-12
max_iter = 100

[[problems]]
name = "tripling"
kind = "affine"
matrix = [[3.0]]
offset = [0.0]
class = "nonexpansive"
"#;
    let cfg = write_config(dir.path(), body);
    let o = run(&["validate", cfg.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(
        err.contains("line 8:") && err.contains("observed ratio 3"),
        "{err}"
    );
}

#[test]
fn diverged_runs_have_not_applicable_checks() {
    let dir = TempDir::new().unwrap();
    let body = r#"
schemes = ["picard"]

[stop]
residual_tol = 1e-12
max_iter = 100
divergence_cap = 20.0

[[problems]]
name = "shift"
kind = "affine"
matrix = [[1.0]]
offset = [1.0]
class = "nonexpansive"
"#;
    let cfg = write_config(dir.path(), body);
    let out = dir.path().join("out");
    let o = run(&[
        "run",
        cfg.to_str().unwrap(),
        "--output-dir",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(v["runs"][0]["stop_reason"], "diverged");
    let checks = v["checks"].as_array().unwrap();
    assert_eq!(checks.len(), 5);
    assert!(checks.iter().all(|c| c["status"] == "NOT_APPLICABLE"));
    let csv = fs::read_to_string(out.join("traces/shift__none__picard.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "n,x0,error,residual,dist_to_F");
}

#[test]
fn seed_override_is_recorded_and_deterministic() {
    let dir = TempDir::new().unwrap();
    let cfg = write_config(dir.path(), HALVING);
    let a = dir.path().join("a");
    let b = dir.path().join("b");
    for out in [&a, &b] {
        let o = run(&[
            "run",
            cfg.to_str().unwrap(),
            "--output-dir",
            out.to_str().unwrap(),
            "--seed",
            "99",
        ]);
        assert!(o.status.success());
    }
    let ja = fs::read(a.join("summary.json")).unwrap();
    assert_eq!(ja, fs::read(b.join("summary.json")).unwrap());
    let v: serde_json::Value = serde_json::from_slice(&ja).unwrap();
    assert_eq!(v["seed"], 99);
}

#[test]
fn list_problems_names_the_suite() {
    let o = run(&["list-problems"]);
    assert!(o.status.success());
    let s = String::from_utf8_lossy(&o.stdout);
    for name in [
        "halving",
        "affine_3d",
        "swap",
        "rotation_quarter",
        "identity_2d",
    ] {
        assert!(s.contains(name), "{s}");
    }
}

#[test]
fn shipped_config_validates() {
    let cfg = concat!(
        env!("CARGO_MANIFEST_DIR"),
        "/../../configs/paper_repro.toml"
    );
    let o = run(&["validate", cfg]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(String::from_utf8_lossy(&o.stdout).contains("144 runs"));
}
