//! Relative convergence speed of two traces converging to the same point.
//!
//! `{a_n}` converges faster than `{b_n}` when `|a_n - a| / |b_n - b| → 0`,
//! and at the same rate when the ratio tends to a finite positive limit.
//! The limit is estimated from the least-squares slope of `ln r_n` against
//! `n`: a clearly negative slope means geometric decay of the ratio.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::schemes::SchemeId;
use crate::trace::IterationTrace;

/// Minimum number of usable indices for a classification.
pub const MIN_USABLE: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct BerindeConfig {
    /// Slopes within `±slope_tol` per iteration count as flat.
    pub slope_tol: f64,
    /// Flat ratios must also stay inside `[1/ratio_band, ratio_band]`.
    pub ratio_band: f64,
    /// Indices where either error is below this are discarded.
    pub noise_floor: f64,
    /// Number of leading iterates discarded.
    pub burn_in: usize,
}

impl Default for BerindeConfig {
    fn default() -> Self {
        Self {
            slope_tol: 1e-3,
            ratio_band: 10.0,
            noise_floor: 1e-13,
            burn_in: 5,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    #[serde(rename = "A_faster")]
    AFaster,
    #[serde(rename = "same_rate")]
    SameRate,
    #[serde(rename = "B_faster")]
    BFaster,
    #[serde(rename = "inconclusive")]
    Inconclusive,
}

impl Classification {
    pub fn as_str(self) -> &'static str {
        match self {
            Classification::AFaster => "A_faster",
            Classification::SameRate => "same_rate",
            Classification::BFaster => "B_faster",
            Classification::Inconclusive => "inconclusive",
        }
    }

    pub fn swapped(self) -> Self {
        match self {
            Classification::AFaster => Classification::BFaster,
            Classification::BFaster => Classification::AFaster,
            other => other,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComparisonReport {
    pub a: SchemeId,
    pub b: SchemeId,
    /// Iteration indices (1-based) of the usable window.
    pub indices: Vec<usize>,
    /// `e^A_n / e^B_n` at each usable index.
    pub ratio_series: Vec<f64>,
    /// Least-squares slope of `ln r_n` over the window; `None` when too few
    /// points survive filtering.
    pub fitted_log_slope: Option<f64>,
    pub classification: Classification,
    /// First and last index of the window.
    pub window: Option<(usize, usize)>,
    pub note: Option<String>,
}

/// Classifies how fast `trace_a` converges relative to `trace_b`.
pub fn berinde_compare(
    trace_a: &IterationTrace,
    trace_b: &IterationTrace,
    config: &BerindeConfig,
) -> Result<ComparisonReport> {
    let (ea, eb) = match (trace_a.errors(), trace_b.errors()) {
        (Some(a), Some(b)) => (a, b),
        _ => {
            return Err(Error::NotApplicable(
                "both traces need errors against a known fixed point".into(),
            ))
        }
    };
    let common = ea.len().min(eb.len());
    let mut indices = Vec::new();
    let mut ratios = Vec::new();
    let mut logs = Vec::new();
    for i in config.burn_in.min(common)..common {
        let (a, b) = (ea[i], eb[i]);
        if a < config.noise_floor || b < config.noise_floor || b == 0.0 {
            continue;
        }
        indices.push(i + 1);
        ratios.push(a / b);
        logs.push(a.ln() - b.ln());
    }
    let window = indices.first().zip(indices.last()).map(|(f, l)| (*f, *l));

    if indices.len() < MIN_USABLE {
        let note = format!(
            "only {} usable indices after burn-in {} and noise floor {:e} (need {MIN_USABLE})",
            indices.len(),
            config.burn_in,
            config.noise_floor
        );
        return Ok(ComparisonReport {
            a: trace_a.scheme(),
            b: trace_b.scheme(),
            indices,
            ratio_series: ratios,
            fitted_log_slope: None,
            classification: Classification::Inconclusive,
            window,
            note: Some(note),
        });
    }

    let slope = least_squares_slope(&indices, &logs);
    let in_band = ratios
        .iter()
        .all(|r| *r >= 1.0 / config.ratio_band && *r <= config.ratio_band);
    let (classification, note) = if slope < -config.slope_tol {
        (Classification::AFaster, None)
    } else if slope > config.slope_tol {
        (Classification::BFaster, None)
    } else if in_band {
        (Classification::SameRate, None)
    } else {
        (
            Classification::Inconclusive,
            Some(format!(
                "flat slope but ratios leave [1/{0}, {0}]",
                config.ratio_band
            )),
        )
    };
    Ok(ComparisonReport {
        a: trace_a.scheme(),
        b: trace_b.scheme(),
        indices,
        ratio_series: ratios,
        fitted_log_slope: Some(slope),
        classification,
        window,
        note,
    })
}

fn least_squares_slope(xs: &[usize], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().map(|x| *x as f64).sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let mut sxy = 0.0;
    let mut sxx = 0.0;
    for (x, y) in xs.iter().zip(ys) {
        let dx = *x as f64 - mx;
        sxy += dx * (y - my);
        sxx += dx * dx;
    }
    sxy / sxx
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::point::{NormKind, Point};
    use crate::trace::StopReason;

    fn synthetic(scheme: SchemeId, errors: Vec<f64>) -> IterationTrace {
        let n = errors.len();
        IterationTrace::from_parts(
            scheme,
            NormKind::Euclidean,
            1e-12,
            errors.iter().map(|e| Point::scalar(*e).unwrap()).collect(),
            Some(errors.clone()),
            errors.iter().map(|e| e * 0.5).collect(),
            Some(errors),
            if n > 0 {
                StopReason::MaxIter
            } else {
                StopReason::Diverged
            },
        )
        .unwrap()
    }

    fn geometric(q: f64, c: f64, n: usize) -> Vec<f64> {
        (0..n).map(|k| c * q.powi(k as i32)).collect()
    }

    #[test]
    fn recovers_log_ratio_of_multipliers() {
        let a = synthetic(SchemeId::Ky, geometric(0.3, 1.0, 25));
        let b = synthetic(SchemeId::S, geometric(0.5, 1.0, 25));
        let r = berinde_compare(&a, &b, &BerindeConfig::default()).unwrap();
        assert_eq!(r.classification, Classification::AFaster);
        assert!((r.fitted_log_slope.unwrap() - (0.6_f64).ln()).abs() < 1e-12);
        assert_eq!(r.window, Some((6, 25)));
    }

    #[test]
    fn constant_factor_is_same_rate() {
        let a = synthetic(SchemeId::Mann, geometric(0.5, 3.0, 30));
        let b = synthetic(SchemeId::Picard, geometric(0.5, 1.0, 30));
        let r = berinde_compare(&a, &b, &BerindeConfig::default()).unwrap();
        assert_eq!(r.classification, Classification::SameRate);
        assert!(r.fitted_log_slope.unwrap().abs() < 1e-12);
    }

    #[test]
    fn flat_but_out_of_band_is_inconclusive() {
        let a = synthetic(SchemeId::Mann, geometric(0.5, 100.0, 30));
        let b = synthetic(SchemeId::Picard, geometric(0.5, 1.0, 30));
        let r = berinde_compare(&a, &b, &BerindeConfig::default()).unwrap();
        assert_eq!(r.classification, Classification::Inconclusive);
    }

    #[test]
    fn too_few_points_is_inconclusive() {
        let a = synthetic(SchemeId::Ky, geometric(0.5, 1.0, 12));
        let b = synthetic(SchemeId::S, geometric(0.5, 1.0, 12));
        let r = berinde_compare(&a, &b, &BerindeConfig::default()).unwrap();
        assert_eq!(r.classification, Classification::Inconclusive);
        assert!(r.fitted_log_slope.is_none());
        assert!(r.note.unwrap().contains("usable"));
    }

    #[test]
    fn zero_errors_in_b_are_dropped() {
        let mut eb = geometric(0.5, 1.0, 30);
        eb[10] = 0.0;
        let a = synthetic(SchemeId::Ky, geometric(0.25, 1.0, 20));
        let b = synthetic(SchemeId::S, eb);
        let r = berinde_compare(&a, &b, &BerindeConfig::default()).unwrap();
        assert!(!r.indices.contains(&11));
        assert_eq!(r.classification, Classification::AFaster);
    }

    #[test]
    fn missing_errors_not_applicable() {
        let a = IterationTrace::from_parts(
            SchemeId::Ky,
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
            berinde_compare(&a, &a, &BerindeConfig::default()),
            Err(Error::NotApplicable(_))
        ));
    }
}
