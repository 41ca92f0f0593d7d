//! Pass/fail diagnostics over a single trace.

use serde::{Deserialize, Serialize};

use crate::analysis::bounds::{bound, BoundParams};
use crate::error::{Error, Result};
use crate::schemes::SchemeId;
use crate::trace::{IterationTrace, StopReason};

/// Per-step slack used by the monotonicity checks.
pub const MONOTONE_SLACK: f64 = 1e-12;
/// Relative slack used by the bound dominance check.
pub const BOUND_SLACK: f64 = 1e-9;
/// Absolute slack used by the Condition (A) check.
pub const CONDITION_A_SLACK: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "SCREAMING_SNAKE_CASE")]
pub enum CheckStatus {
    Pass,
    Fail,
    NotApplicable,
}

impl CheckStatus {
    fn from_bool(ok: bool) -> Self {
        if ok {
            CheckStatus::Pass
        } else {
            CheckStatus::Fail
        }
    }
}

/// Outcome of a single check. `margin` is positive when the tested
/// inequality holds with room to spare and negative when it is violated.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckReport {
    pub name: &'static str,
    pub status: CheckStatus,
    pub margin: Option<f64>,
    pub note: Option<String>,
}

impl CheckReport {
    pub fn passed(&self) -> bool {
        self.status == CheckStatus::Pass
    }

    pub fn not_applicable(name: &'static str, note: impl Into<String>) -> Self {
        Self {
            name,
            status: CheckStatus::NotApplicable,
            margin: None,
            note: Some(note.into()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DominanceRow {
    pub n: usize,
    pub observed: f64,
    pub bound: f64,
    pub slack: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundDominanceReport {
    pub bound_scheme: SchemeId,
    pub rows: Vec<DominanceRow>,
    pub report: CheckReport,
}

fn require_errors<'a>(trace: &'a IterationTrace, what: &str) -> Result<&'a [f64]> {
    trace.errors().ok_or_else(|| {
        Error::NotApplicable(format!("{what}: trace has no errors (fixed point unknown)"))
    })
}

/// Checks `‖x_n - p‖ <= q^{n-1} ‖x_1 - p‖` for the trace's own scheme.
pub fn check_bound_dominance(
    trace: &IterationTrace,
    params: &BoundParams,
) -> Result<BoundDominanceReport> {
    check_bound_dominance_against(trace, params, trace.scheme())
}

/// As [`check_bound_dominance`], but against the bound of `bound_scheme`.
pub fn check_bound_dominance_against(
    trace: &IterationTrace,
    params: &BoundParams,
    bound_scheme: SchemeId,
) -> Result<BoundDominanceReport> {
    let errors = require_errors(trace, "bound dominance")?;
    let mut rows = Vec::with_capacity(errors.len());
    let mut ok = true;
    let mut min_slack = f64::INFINITY;
    for (i, e) in errors.iter().enumerate() {
        let b = bound(bound_scheme, params, i as u32);
        let slack = b - e;
        ok &= *e <= b + BOUND_SLACK * (1.0 + b);
        min_slack = min_slack.min(slack);
        rows.push(DominanceRow {
            n: i + 1,
            observed: *e,
            bound: b,
            slack,
        });
    }
    Ok(BoundDominanceReport {
        bound_scheme,
        rows,
        report: CheckReport {
            name: "bound_dominance",
            status: CheckStatus::from_bool(ok),
            margin: min_slack.is_finite().then_some(min_slack),
            note: None,
        },
    })
}

/// Residuals vanish: the largest residual over the final `tail_fraction`
/// of the trace is below `max(10 · tol, 1e-8)` and does not exceed the
/// largest residual over the first half.
pub fn residual_decay_check(trace: &IterationTrace, tail_fraction: f64) -> Result<CheckReport> {
    if !(tail_fraction > 0.0 && tail_fraction < 1.0) {
        return Err(Error::InvalidParameter {
            name: "tail_fraction",
            value: tail_fraction,
            reason: "must lie in (0,1)",
        });
    }
    let r = trace.residuals();
    if r.is_empty() {
        return Err(Error::NotApplicable("residual decay: empty trace".into()));
    }
    let tail_len = ((r.len() as f64 * tail_fraction).ceil() as usize).clamp(1, r.len());
    let head_len = r.len().div_ceil(2);
    let tail_max = r[r.len() - tail_len..].iter().copied().fold(0.0, f64::max);
    let head_max = r[..head_len].iter().copied().fold(0.0, f64::max);
    let threshold = (10.0 * trace.residual_tol()).max(1e-8);
    let ok = tail_max < threshold && tail_max <= head_max;
    Ok(CheckReport {
        name: "residual_decay",
        status: CheckStatus::from_bool(ok),
        margin: Some(threshold - tail_max),
        note: Some(format!(
            "tail max {tail_max:e}, head max {head_max:e}, threshold {threshold:e}"
        )),
    })
}

fn non_increasing(name: &'static str, seq: &[f64]) -> CheckReport {
    let mut ok = true;
    let mut margin = f64::INFINITY;
    let mut worst = None;
    for (i, w) in seq.windows(2).enumerate() {
        let drop = w[0] - w[1];
        if w[1] > w[0] + MONOTONE_SLACK {
            ok = false;
            worst.get_or_insert(i + 2);
        }
        margin = margin.min(drop);
    }
    CheckReport {
        name,
        status: CheckStatus::from_bool(ok),
        margin: margin.is_finite().then_some(margin),
        note: worst.map(|n| format!("first increase at n = {n}")),
    }
}

/// `‖x_{n+1} - p‖ <= ‖x_n - p‖ + 1e-12` for every `n`.
pub fn error_monotonicity_check(trace: &IterationTrace) -> Result<CheckReport> {
    let errors = require_errors(trace, "error monotonicity")?;
    Ok(non_increasing("error_monotonicity", errors))
}

/// Gauge `f` of Condition (A): `f(0) = 0`, nondecreasing, positive on `r > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum ConditionAFunction {
    /// `f(r) = c · r`
    Linear { c: f64 },
    /// Piecewise-linear through `(r_i, f_i)` starting at `(0, 0)`, constant
    /// after the last knot.
    Table { r: Vec<f64>, f: Vec<f64> },
}

impl ConditionAFunction {
    pub fn linear(c: f64) -> Result<Self> {
        let f = ConditionAFunction::Linear { c };
        f.validate()?;
        Ok(f)
    }

    pub fn table(r: Vec<f64>, f: Vec<f64>) -> Result<Self> {
        let g = ConditionAFunction::Table { r, f };
        g.validate()?;
        Ok(g)
    }

    pub fn validate(&self) -> Result<()> {
        match self {
            ConditionAFunction::Linear { c } => {
                if !(*c > 0.0 && c.is_finite()) {
                    return Err(Error::InvalidParameter {
                        name: "c",
                        value: *c,
                        reason: "Condition (A) slope must be finite and > 0",
                    });
                }
            }
            ConditionAFunction::Table { r, f } => {
                if r.len() != f.len() || r.len() < 2 {
                    return Err(Error::Parse(
                        "Condition (A) table needs >= 2 matching knots".into(),
                    ));
                }
                if r[0] != 0.0 || f[0] != 0.0 {
                    return Err(Error::Parse(
                        "Condition (A) table must start at (0, 0)".into(),
                    ));
                }
                if r.windows(2).any(|w| !(w[1] > w[0])) {
                    return Err(Error::Parse("Condition (A) abscissae must increase".into()));
                }
                if f.windows(2).any(|w| w[1] < w[0]) || f[1..].iter().any(|v| !(*v > 0.0)) {
                    return Err(Error::Parse(
                        "Condition (A) values must be nondecreasing and > 0 away from 0".into(),
                    ));
                }
            }
        }
        Ok(())
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            ConditionAFunction::Linear { c } => c * r,
            ConditionAFunction::Table { r: rs, f } => {
                let last = rs.len() - 1;
                if r >= rs[last] {
                    return f[last];
                }
                if r <= 0.0 {
                    return 0.0;
                }
                let i = rs.partition_point(|k| *k <= r) - 1;
                let w = (r - rs[i]) / (rs[i + 1] - rs[i]);
                (1.0 - w) * f[i] + w * f[i + 1]
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ConditionAReport {
    /// `min_n (‖x_n - T x_n‖ - f(d(x_n, F)))`
    pub tightest_margin: f64,
    /// `max_n |‖x_n - T x_n‖ - f(d(x_n, F))|`; zero when the gauge is attained.
    pub max_gap: f64,
    pub report: CheckReport,
}

/// `‖x_n - T x_n‖ >= f(d(x_n, F(T))) - 1e-12` for every `n`.
pub fn check_condition_a(
    trace: &IterationTrace,
    f: &ConditionAFunction,
) -> Result<ConditionAReport> {
    f.validate()?;
    let dists = trace
        .dist_to_fixed()
        .ok_or_else(|| Error::NotApplicable("Condition (A): trace has no dist_to_F".into()))?;
    let mut tightest = f64::INFINITY;
    let mut max_gap = 0.0_f64;
    for (res, d) in trace.residuals().iter().zip(dists) {
        let m = res - f.eval(*d);
        tightest = tightest.min(m);
        max_gap = max_gap.max(m.abs());
    }
    if !tightest.is_finite() {
        return Err(Error::NotApplicable("Condition (A): empty trace".into()));
    }
    Ok(ConditionAReport {
        tightest_margin: tightest,
        max_gap,
        report: CheckReport {
            name: "condition_a",
            status: CheckStatus::from_bool(tightest >= -CONDITION_A_SLACK),
            margin: Some(tightest),
            note: None,
        },
    })
}

/// `d(x_n, F)` is non-increasing, and ends below `10 · tol` when the run
/// stopped on its residual.
pub fn dist_to_f_decay_check(trace: &IterationTrace) -> Result<CheckReport> {
    if trace.stop_reason() == StopReason::Diverged {
        return Err(Error::NotApplicable("distance decay: run diverged".into()));
    }
    let d = trace
        .dist_to_fixed()
        .ok_or_else(|| Error::NotApplicable("distance decay: trace has no dist_to_F".into()))?;
    let mut report = non_increasing("dist_to_F_decay", d);
    report.name = "dist_to_F_decay";
    if trace.stop_reason() == StopReason::ResidualBelowTol {
        let last = d.last().copied().unwrap_or(0.0);
        let limit = 10.0 * trace.residual_tol();
        if !(last < limit) {
            report.status = CheckStatus::Fail;
            report.note = Some(format!("final distance {last:e} not below {limit:e}"));
        }
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{NormKind, Point};

    fn trace_with(errors: Vec<f64>, residuals: Vec<f64>, stop: StopReason) -> IterationTrace {
        IterationTrace::from_parts(
            SchemeId::Ky,
            NormKind::Euclidean,
            1e-12,
            errors.iter().map(|e| Point::scalar(*e).unwrap()).collect(),
            Some(errors.clone()),
            residuals,
            Some(errors),
            stop,
        )
        .unwrap()
    }

    #[test]
    fn increasing_errors_fail_monotonicity() {
        let t = trace_with(vec![1.0, 2.0], vec![0.5, 1.0], StopReason::MaxIter);
        let r = error_monotonicity_check(&t).unwrap();
        assert_eq!(r.status, CheckStatus::Fail);
        assert_eq!(r.margin, Some(-1.0));
    }

    #[test]
    fn single_iterate_is_vacuously_monotone() {
        let t = trace_with(vec![1.0], vec![0.5], StopReason::MaxIter);
        assert!(error_monotonicity_check(&t).unwrap().passed());
        assert!(dist_to_f_decay_check(&t).unwrap().passed());
        let p = BoundParams::new(0.5, 0.5, 1.0).unwrap();
        let b = check_bound_dominance(&t, &p).unwrap();
        assert!(b.report.passed());
        assert_eq!(b.rows.len(), 1);
        assert_eq!(b.rows[0].bound, 1.0);
    }

    #[test]
    fn residual_decay_at_fixed_point() {
        let t = trace_with(vec![0.0; 10], vec![0.0; 10], StopReason::MaxIter);
        assert!(residual_decay_check(&t, 0.2).unwrap().passed());
    }

    #[test]
    fn flat_residuals_fail_decay() {
        let t = trace_with(vec![1.0; 50], vec![2.0_f64.sqrt(); 50], StopReason::MaxIter);
        assert_eq!(
            residual_decay_check(&t, 0.2).unwrap().status,
            CheckStatus::Fail
        );
        assert!(residual_decay_check(&t, 1.0).is_err());
    }

    #[test]
    fn dist_decay_requires_final_value_on_residual_stop() {
        let t = trace_with(
            vec![1.0, 0.5],
            vec![0.5, 1e-13],
            StopReason::ResidualBelowTol,
        );
        assert_eq!(dist_to_f_decay_check(&t).unwrap().status, CheckStatus::Fail);
        let t = trace_with(
            vec![1.0, 1e-12],
            vec![0.5, 1e-13],
            StopReason::ResidualBelowTol,
        );
        assert!(dist_to_f_decay_check(&t).unwrap().passed());
    }

    #[test]
    fn diverged_trace_not_applicable() {
        let t = trace_with(vec![1.0, 3.0], vec![2.0, 6.0], StopReason::Diverged);
        assert!(matches!(
            dist_to_f_decay_check(&t),
            Err(Error::NotApplicable(_))
        ));
    }

    #[test]
    fn condition_a_gauges() {
        assert!(ConditionAFunction::linear(0.0).is_err());
        let g = ConditionAFunction::table(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 0.5]).unwrap();
        assert_eq!(g.eval(0.0), 0.0);
        assert_eq!(g.eval(0.5), 0.25);
        assert_eq!(g.eval(7.0), 0.5);
        assert!(ConditionAFunction::table(vec![0.0, 1.0], vec![0.0, 0.0]).is_err());
        assert!(ConditionAFunction::table(vec![0.0, 1.0, 2.0], vec![0.0, 0.5, 0.4]).is_err());
        assert!(ConditionAFunction::table(vec![0.1, 1.0], vec![0.0, 0.5]).is_err());
    }

    #[test]
    fn condition_a_violation_detected() {
        // residual r_n = 0.1 d_n < f(d) = 0.5 d
        let t = trace_with(vec![1.0, 0.5], vec![0.1, 0.05], StopReason::MaxIter);
        let r = check_condition_a(&t, &ConditionAFunction::linear(0.5).unwrap()).unwrap();
        assert_eq!(r.report.status, CheckStatus::Fail);
        assert!((r.tightest_margin + 0.4).abs() < 1e-15);
    }

    #[test]
    fn missing_data_not_applicable() {
        let t = IterationTrace::from_parts(
            SchemeId::Mann,
            NormKind::Euclidean,
            1e-12,
            vec![Point::scalar(1.0).unwrap()],
            None,
            vec![0.5],
            None,
            StopReason::MaxIter,
        )
        .unwrap();
        assert!(matches!(
            error_monotonicity_check(&t),
            Err(Error::NotApplicable(_))
        ));
        let p = BoundParams::new(0.5, 0.5, 1.0).unwrap();
        assert!(matches!(
            check_bound_dominance(&t, &p),
            Err(Error::NotApplicable(_))
        ));
        let f = ConditionAFunction::linear(1.0).unwrap();
        assert!(matches!(
            check_condition_a(&t, &f),
            Err(Error::NotApplicable(_))
        ));
        assert!(matches!(
            dist_to_f_decay_check(&t),
            Err(Error::NotApplicable(_))
        ));
    }
}
