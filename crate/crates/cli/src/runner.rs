//! Runs an experiment grid and collects the summary.

use std::path::PathBuf;

use fpiter::analysis::{
    berinde_compare, bound, check_bound_dominance, check_condition_a, dist_to_f_decay_check,
    error_monotonicity_check, residual_decay_check, step_factor, BoundParams, CheckReport,
    CheckStatus,
};
use fpiter::problems::VALIDATION_SAMPLES;
use fpiter::{
    run_iteration, validate_mapping_class, Error, FixedSet, IterationTrace, LipschitzClass,
    NormKind, ProblemSpec, SchemeId, StopReason,
};
use rayon::prelude::*;
use thiserror::Error;

use crate::config::{ExperimentConfig, NamedSchedule};
use crate::output::{
    comparisons_csv, emit_summary_json, emit_trace_csv, CheckEntry, ComparisonEntry, OutputLayout,
    ProblemEntry, RunEntry, Summary, ValidationEntry, SCHEMA_VERSION,
};

#[derive(Debug, Error)]
pub enum RunError {
    #[error("output directory {}: {source}", path.display())]
    Output {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("{0}")]
    Run(String),
}

impl RunError {
    fn output(path: impl Into<PathBuf>) -> impl FnOnce(std::io::Error) -> Self {
        let path = path.into();
        move |source| RunError::Output { path, source }
    }
}

pub fn run_id(problem: &str, schedule: &str, scheme: SchemeId) -> String {
    format!("{problem}__{schedule}__{scheme}")
}

pub fn norm_label(norm: NormKind) -> String {
    match norm {
        NormKind::Euclidean => "euclidean".into(),
        NormKind::Max => "max".into(),
        NormKind::P(p) => format!("p={p}"),
    }
}

struct Cell<'a> {
    problem: &'a ProblemSpec,
    schedule: &'a NamedSchedule,
    scheme: SchemeId,
}

pub struct RunOutcome {
    pub problem: String,
    pub schedule: String,
    pub trace: IterationTrace,
    pub checks: Vec<CheckReport>,
}

impl RunOutcome {
    pub fn id(&self) -> String {
        run_id(&self.problem, &self.schedule, self.trace.scheme())
    }
}

/// Runs every (problem, schedule, scheme) cell, in parallel, and returns
/// the outcomes in canonical order.
pub fn run_grid(config: &ExperimentConfig) -> Result<Vec<RunOutcome>, RunError> {
    let mut cells = Vec::with_capacity(config.run_count());
    for problem in &config.problems {
        for schedule in &config.schedules {
            for &scheme in &config.schemes {
                cells.push(Cell {
                    problem,
                    schedule,
                    scheme,
                });
            }
        }
    }
    let mut outcomes = cells
        .par_iter()
        .map(|c| run_cell(config, c))
        .collect::<Result<Vec<_>, _>>()?;
    outcomes.sort_by(|a, b| {
        (&a.problem, &a.schedule, a.trace.scheme()).cmp(&(
            &b.problem,
            &b.schedule,
            b.trace.scheme(),
        ))
    });
    Ok(outcomes)
}

fn run_cell(config: &ExperimentConfig, cell: &Cell) -> Result<RunOutcome, RunError> {
    let p = cell.problem;
    let trace = run_iteration(
        cell.scheme,
        &p.mapping,
        &p.default_start,
        &cell.schedule.schedule,
        &config.stop,
        p.recommended_norm,
    )
    .map_err(|e| {
        RunError::Run(format!(
            "{}: {e}",
            run_id(&p.name, &cell.schedule.name, cell.scheme)
        ))
    })?;
    let checks = run_checks(p, cell.schedule, &trace, config.tail_fraction).map_err(|e| {
        RunError::Run(format!(
            "{}: {e}",
            run_id(&p.name, &cell.schedule.name, cell.scheme)
        ))
    })?;
    Ok(RunOutcome {
        problem: p.name.clone(),
        schedule: cell.schedule.name.clone(),
        trace,
        checks,
    })
}

const CHECK_NAMES: [&str; 5] = [
    "bound_dominance",
    "residual_decay",
    "error_monotonicity",
    "condition_a",
    "dist_to_F_decay",
];

fn or_na(name: &'static str, r: fpiter::Result<CheckReport>) -> fpiter::Result<CheckReport> {
    match r {
        Err(Error::NotApplicable(note)) => Ok(CheckReport::not_applicable(name, note)),
        other => other,
    }
}

/// The standard check battery for one run. Diverged runs get
/// `NOT_APPLICABLE` everywhere.
pub fn run_checks(
    problem: &ProblemSpec,
    schedule: &NamedSchedule,
    trace: &IterationTrace,
    tail_fraction: f64,
) -> fpiter::Result<Vec<CheckReport>> {
    if trace.stop_reason() == StopReason::Diverged {
        return Ok(CHECK_NAMES
            .iter()
            .map(|n| CheckReport::not_applicable(n, "run diverged"))
            .collect());
    }
    let mut out = Vec::with_capacity(CHECK_NAMES.len());

    let dominance = match (problem.mapping.class(), trace.errors()) {
        (LipschitzClass::Contraction(l), Some(errors)) if !errors.is_empty() => {
            let params = BoundParams::new(l, schedule.schedule.lambda(), errors[0])?;
            check_bound_dominance(trace, &params)?.report
        }
        (LipschitzClass::Contraction(_), _) => {
            CheckReport::not_applicable("bound_dominance", "fixed point unknown")
        }
        (LipschitzClass::Nonexpansive, _) => {
            CheckReport::not_applicable("bound_dominance", "mapping is not a contraction")
        }
    };
    out.push(dominance);
    out.push(or_na(
        "residual_decay",
        residual_decay_check(trace, tail_fraction),
    )?);
    out.push(or_na(
        "error_monotonicity",
        error_monotonicity_check(trace),
    )?);
    out.push(match &problem.condition_a {
        Some(f) => or_na("condition_a", check_condition_a(trace, f).map(|r| r.report))?,
        None => CheckReport::not_applicable("condition_a", "no gauge declared"),
    });
    out.push(or_na("dist_to_F_decay", dist_to_f_decay_check(trace))?);
    Ok(out)
}

fn comparable(problem: &ProblemSpec) -> bool {
    !problem.is_degenerate()
        && matches!(problem.mapping.fixed_set(), Some(FixedSet::Points(ps)) if ps.len() == 1)
}

/// Pairwise rate comparisons for every problem with a unique known fixed
/// point. Degenerate problems and those with a fixed set larger than a
/// point are skipped.
pub fn run_comparisons(
    config: &ExperimentConfig,
    outcomes: &[RunOutcome],
) -> fpiter::Result<Vec<ComparisonEntry>> {
    let find = |problem: &str, schedule: &str, scheme: SchemeId| {
        outcomes
            .iter()
            .find(|o| o.problem == problem && o.schedule == schedule && o.trace.scheme() == scheme)
    };
    let mut out = Vec::new();
    for problem in config.problems.iter().filter(|p| comparable(p)) {
        for schedule in &config.schedules {
            for &(a, b) in &config.comparisons {
                let (Some(ta), Some(tb)) = (
                    find(&problem.name, &schedule.name, a),
                    find(&problem.name, &schedule.name, b),
                ) else {
                    continue;
                };
                let report = berinde_compare(&ta.trace, &tb.trace, &config.berinde)?;
                let (bound_log_slope, bound_ratio_at_window_end) = match problem.mapping.class() {
                    LipschitzClass::Contraction(l) => {
                        let lambda = schedule.schedule.lambda();
                        let slope = step_factor(a, l, lambda).ln() - step_factor(b, l, lambda).ln();
                        let params = BoundParams::new(l, lambda, 1.0)?;
                        let ratio = report.window.map(|(_, end)| {
                            let n = (end - 1) as u32;
                            bound(a, &params, n) / bound(b, &params, n)
                        });
                        (Some(slope), ratio)
                    }
                    LipschitzClass::Nonexpansive => (None, None),
                };
                out.push(ComparisonEntry {
                    problem: problem.name.clone(),
                    schedule: schedule.name.clone(),
                    a: a.to_string(),
                    b: b.to_string(),
                    classification: report.classification.as_str().to_string(),
                    fitted_log_slope: report.fitted_log_slope,
                    bound_log_slope,
                    bound_ratio_at_window_end,
                    window: report.window,
                    usable_points: report.indices.len(),
                    note: report.note,
                });
            }
        }
    }
    out.sort_by(|x, y| {
        (&x.problem, &x.schedule, &x.a, &x.b).cmp(&(&y.problem, &y.schedule, &y.a, &y.b))
    });
    Ok(out)
}

fn problem_entry(p: &ProblemSpec, seed: u64) -> fpiter::Result<ProblemEntry> {
    let v = validate_mapping_class(&p.mapping, p.recommended_norm, VALIDATION_SAMPLES, seed)?;
    let (class, lipschitz) = match p.mapping.class() {
        LipschitzClass::Contraction(l) => ("contraction", Some(l)),
        LipschitzClass::Nonexpansive => ("nonexpansive", None),
    };
    Ok(ProblemEntry {
        name: p.name.clone(),
        dim: p.mapping.dim(),
        class: class.into(),
        lipschitz,
        norm: norm_label(p.recommended_norm),
        degenerate: p.is_degenerate(),
        domain: p.domain_note.clone(),
        condition_a: p.condition_a_note.clone(),
        validation: ValidationEntry {
            samples: v.samples,
            max_ratio: v.max_ratio,
            exact_lipschitz: v.exact_lipschitz,
            passed: v.passed,
        },
    })
}

fn status_str(s: CheckStatus) -> &'static str {
    match s {
        CheckStatus::Pass => "PASS",
        CheckStatus::Fail => "FAIL",
        CheckStatus::NotApplicable => "NOT_APPLICABLE",
    }
}

/// Builds the summary from finished runs without touching the file system.
pub fn summarize(config: &ExperimentConfig, outcomes: &[RunOutcome]) -> Result<Summary, RunError> {
    let run_err = |e: Error| RunError::Run(e.to_string());
    let problems = {
        let mut v = config
            .problems
            .iter()
            .map(|p| problem_entry(p, config.seed))
            .collect::<fpiter::Result<Vec<_>>>()
            .map_err(run_err)?;
        v.sort_by(|a, b| a.name.cmp(&b.name));
        v
    };
    let mut runs = Vec::with_capacity(outcomes.len());
    let mut checks = Vec::new();
    for o in outcomes {
        let id = o.id();
        let t = &o.trace;
        runs.push(RunEntry {
            trace_file: format!("traces/{id}.csv"),
            id: id.clone(),
            problem: o.problem.clone(),
            schedule: o.schedule.clone(),
            scheme: t.scheme().to_string(),
            iterations: t.len(),
            stop_reason: t.stop_reason().as_str().to_string(),
            final_residual: t.residuals().last().copied(),
            final_error: t.errors().and_then(|e| e.last().copied()),
            final_dist_to_f: t.dist_to_fixed().and_then(|d| d.last().copied()),
        });
        for c in &o.checks {
            checks.push(CheckEntry {
                run: id.clone(),
                name: c.name.to_string(),
                status: status_str(c.status).to_string(),
                margin: c.margin,
                note: c.note.clone(),
            });
        }
    }
    let comparisons = run_comparisons(config, outcomes).map_err(run_err)?;
    Ok(Summary {
        schema_version: SCHEMA_VERSION,
        seed: config.seed,
        residual_tol: config.stop.residual_tol,
        max_iter: config.stop.max_iter,
        problems,
        runs,
        comparisons,
        checks,
    })
}

/// Runs the grid and writes every artifact under `config.output_dir`.
pub fn run_experiments(config: &ExperimentConfig) -> Result<Summary, RunError> {
    let layout = OutputLayout::new(&config.output_dir);
    layout.prepare().map_err(RunError::output(&layout.root))?;
    let outcomes = run_grid(config)?;
    outcomes
        .par_iter()
        .map(|o| {
            let path = layout.trace_path(&o.id());
            emit_trace_csv(&o.trace, &path).map_err(RunError::output(path))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let summary = summarize(config, &outcomes)?;
    let path = layout.comparisons_path();
    std::fs::write(&path, comparisons_csv(&summary.comparisons)).map_err(RunError::output(path))?;
    let path = layout.summary_path();
    emit_summary_json(&summary, &path).map_err(RunError::output(path))?;
    Ok(summary)
}
