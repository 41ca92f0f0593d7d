//! Artifact writers: per-run trace CSVs, the comparison table and
//! `summary.json`.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use fpiter::IterationTrace;
use serde::Serialize;

pub const SCHEMA_VERSION: &str = "1";

/// Floats are written with 17 significant digits so they round-trip.
pub fn fmt_f64(v: f64) -> String {
    format!("{v:.16e}")
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map(fmt_f64).unwrap_or_default()
}

/// Renders a trace as CSV: `n,x0..x{d-1},error,residual,dist_to_F`.
/// Columns the trace does not carry are left empty.
pub fn trace_csv(trace: &IterationTrace) -> String {
    let dim = trace.dim().unwrap_or(0);
    let mut out = String::from("n");
    for i in 0..dim {
        let _ = write!(out, ",x{i}");
    }
    out.push_str(",error,residual,dist_to_F\n");
    let errors = trace.errors();
    let dists = trace.dist_to_fixed();
    for (i, x) in trace.iterates().iter().enumerate() {
        let _ = write!(out, "{}", i + 1);
        for c in x.coords() {
            let _ = write!(out, ",{}", fmt_f64(*c));
        }
        let _ = writeln!(
            out,
            ",{},{},{}",
            fmt_opt(errors.map(|e| e[i])),
            fmt_f64(trace.residuals()[i]),
            fmt_opt(dists.map(|d| d[i])),
        );
    }
    out
}

pub fn emit_trace_csv(trace: &IterationTrace, path: &Path) -> io::Result<()> {
    fs::write(path, trace_csv(trace))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationEntry {
    pub samples: usize,
    pub max_ratio: f64,
    pub exact_lipschitz: Option<f64>,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProblemEntry {
    pub name: String,
    pub dim: usize,
    pub class: String,
    pub lipschitz: Option<f64>,
    pub norm: String,
    pub degenerate: bool,
    pub domain: String,
    pub condition_a: Option<String>,
    pub validation: ValidationEntry,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunEntry {
    pub id: String,
    pub problem: String,
    pub schedule: String,
    pub scheme: String,
    pub iterations: usize,
    pub stop_reason: String,
    pub final_residual: Option<f64>,
    pub final_error: Option<f64>,
    pub final_dist_to_f: Option<f64>,
    pub trace_file: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonEntry {
    pub problem: String,
    pub schedule: String,
    pub a: String,
    pub b: String,
    pub classification: String,
    pub fitted_log_slope: Option<f64>,
    /// `ln(q_a / q_b)` from the per-step bound factors, when the mapping is
    /// a contraction.
    pub bound_log_slope: Option<f64>,
    /// `bound_a(n) / bound_b(n)` at the end of the window.
    pub bound_ratio_at_window_end: Option<f64>,
    pub window: Option<(usize, usize)>,
    pub usable_points: usize,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckEntry {
    pub run: String,
    pub name: String,
    pub status: String,
    pub margin: Option<f64>,
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Summary {
    pub schema_version: &'static str,
    pub seed: u64,
    pub residual_tol: f64,
    pub max_iter: usize,
    pub problems: Vec<ProblemEntry>,
    pub runs: Vec<RunEntry>,
    pub comparisons: Vec<ComparisonEntry>,
    pub checks: Vec<CheckEntry>,
}

impl Summary {
    pub fn failed_checks(&self) -> impl Iterator<Item = &CheckEntry> {
        self.checks.iter().filter(|c| c.status == "FAIL")
    }
}

pub fn summary_json(summary: &Summary) -> String {
    let mut s = serde_json::to_string_pretty(summary).expect("summary serializes");
    s.push('\n');
    s
}

pub fn emit_summary_json(summary: &Summary, path: &Path) -> io::Result<()> {
    fs::write(path, summary_json(summary))
}

pub fn comparisons_csv(rows: &[ComparisonEntry]) -> String {
    let mut out = String::from(
        "problem,schedule,a,b,classification,fitted_log_slope,bound_log_slope,window_start,window_end,usable_points\n",
    );
    for r in rows {
        let _ = writeln!(
            out,
            "{},{},{},{},{},{},{},{},{},{}",
            r.problem,
            r.schedule,
            r.a,
            r.b,
            r.classification,
            fmt_opt(r.fitted_log_slope),
            fmt_opt(r.bound_log_slope),
            r.window.map(|w| w.0.to_string()).unwrap_or_default(),
            r.window.map(|w| w.1.to_string()).unwrap_or_default(),
            r.usable_points,
        );
    }
    out
}

/// Layout of an output directory.
#[derive(Debug, Clone)]
pub struct OutputLayout {
    pub root: PathBuf,
}

impl OutputLayout {
    pub fn new(root: impl Into<PathBuf>) -> Self {
        Self { root: root.into() }
    }

    pub fn traces_dir(&self) -> PathBuf {
        self.root.join("traces")
    }

    pub fn trace_path(&self, run_id: &str) -> PathBuf {
        self.traces_dir().join(format!("{run_id}.csv"))
    }

    pub fn summary_path(&self) -> PathBuf {
        self.root.join("summary.json")
    }

    pub fn comparisons_path(&self) -> PathBuf {
        self.root.join("comparisons.csv")
    }

    /// Creates the directories and probes that they are writable.
    pub fn prepare(&self) -> io::Result<()> {
        fs::create_dir_all(self.traces_dir())?;
        let probe = self.root.join(".fpiter-write-probe");
        fs::write(&probe, b"")?;
        fs::remove_file(probe)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use fpiter::{builtin, run_iteration, NormKind, Schedule, SchemeId, StopRule};

    #[test]
    fn float_format_round_trips() {
        for v in [0.1, 1.0 / 3.0, 1e-300, 6.02e23, -2.5] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(0.5), "5.0000000000000000e-1");
    }

    #[test]
    fn csv_has_header_and_rows() {
        let p = builtin("halving").unwrap();
        let stop = StopRule::new(1e-300, 3).unwrap();
        let t = run_iteration(
            SchemeId::Picard,
            &p.mapping,
            &p.default_start,
            &Schedule::constant(0.5).unwrap(),
            &stop,
            NormKind::Euclidean,
        )
        .unwrap();
        let csv = trace_csv(&t);
        let lines: Vec<_> = csv.lines().collect();
        assert_eq!(lines[0], "n,x0,error,residual,dist_to_F");
        assert_eq!(lines.len(), 4);
        assert!(lines[3].starts_with("3,2.5000000000000000e-1,2.5000000000000000e-1,"));
    }

    #[test]
    fn csv_leaves_unknown_columns_empty() {
        use fpiter::{LipschitzClass, MappingKind, MappingSpec};
        let m = MappingSpec::new(
            MappingKind::affine(vec![vec![0.5]], vec![0.0]).unwrap(),
            LipschitzClass::Contraction(0.5),
            None,
        )
        .unwrap();
        let stop = StopRule::new(1e-300, 2).unwrap();
        let x = fpiter::Point::scalar(1.0).unwrap();
        let t = run_iteration(
            SchemeId::Picard,
            &m,
            &x,
            &Schedule::constant(0.5).unwrap(),
            &stop,
            NormKind::Euclidean,
        )
        .unwrap();
        let csv = trace_csv(&t);
        let row = csv.lines().nth(1).unwrap();
        assert!(
            row.starts_with("1,1.0000000000000000e0,,5.0000000000000000e-1,"),
            "{row}"
        );
        assert!(row.ends_with(','), "{row}");
    }
}
