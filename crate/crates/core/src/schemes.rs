//! One step function per iteration process, and a driver that runs a
//! process until a stop rule fires.
//!
//! Every averaged scheme is built from the Mann point
//! `M(x, w) = (1 - w) x + w T x`:
//!
//! | scheme     | next iterate                          |
//! |------------|---------------------------------------|
//! | `picard`   | `T x`                                 |
//! | `mann`     | `M(x, α)`                             |
//! | `ishikawa` | `(1 - α) x + α T M(x, β)`             |
//! | `s`        | `(1 - α) T x + α T M(x, β)`           |
//! | `normal_s` | `T M(x, α)`                           |
//! | `ky`       | `T M(M(x, β), α)` (three steps)       |
//!
//! `α`, `β` must lie strictly inside `(0, 1)`.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::analysis::distance_to_fixed_set;
use crate::error::{Error, Result};
use crate::mapping::MappingSpec;
use crate::point::{NormKind, Point};
use crate::schedule::Schedule;
use crate::trace::{IterationTrace, StopReason};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SchemeId {
    Picard,
    Mann,
    Ishikawa,
    S,
    NormalS,
    /// The three-step process `x_{n+1} = T y_n`, `y_n = M(z_n, α_n)`,
    /// `z_n = M(x_n, β_n)`.
    Ky,
}

impl SchemeId {
    pub const ALL: [SchemeId; 6] = [
        SchemeId::Picard,
        SchemeId::Mann,
        SchemeId::Ishikawa,
        SchemeId::S,
        SchemeId::NormalS,
        SchemeId::Ky,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SchemeId::Picard => "picard",
            SchemeId::Mann => "mann",
            SchemeId::Ishikawa => "ishikawa",
            SchemeId::S => "s",
            SchemeId::NormalS => "normal_s",
            SchemeId::Ky => "ky",
        }
    }

    pub fn uses_alpha(self) -> bool {
        !matches!(self, SchemeId::Picard)
    }

    pub fn uses_beta(self) -> bool {
        matches!(self, SchemeId::Ishikawa | SchemeId::S | SchemeId::Ky)
    }

    /// One step of the scheme. Parameters the scheme does not use are ignored.
    pub fn step(self, t: &MappingSpec, x: &Point, alpha: f64, beta: f64) -> Result<Point> {
        match self {
            SchemeId::Picard => picard_step(t, x),
            SchemeId::Mann => mann_step(t, x, alpha),
            SchemeId::Ishikawa => ishikawa_step(t, x, alpha, beta),
            SchemeId::S => s_step(t, x, alpha, beta),
            SchemeId::NormalS => normal_s_step(t, x, alpha),
            SchemeId::Ky => ky_step(t, x, alpha, beta),
        }
    }
}

impl fmt::Display for SchemeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SchemeId {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        SchemeId::ALL
            .into_iter()
            .find(|id| id.as_str() == s)
            .ok_or_else(|| Error::Parse(format!("unknown scheme '{s}'")))
    }
}

fn open_unit(name: &'static str, v: f64) -> Result<()> {
    if v > 0.0 && v < 1.0 {
        Ok(())
    } else {
        Err(Error::InvalidParameter {
            name,
            value: v,
            reason: "must lie strictly inside (0,1)",
        })
    }
}

fn finite(p: Point) -> Result<Point> {
    if p.is_finite() {
        Ok(p)
    } else {
        Err(Error::InvalidInput(
            "step produced a non-finite point".into(),
        ))
    }
}

fn mann_point(t: &MappingSpec, x: &Point, w: f64) -> Point {
    x.lerp(&t.eval(x), w)
}

pub fn picard_step(t: &MappingSpec, x: &Point) -> Result<Point> {
    x.check_dim(t.dim())?;
    finite(t.eval(x))
}

pub fn mann_step(t: &MappingSpec, x: &Point, alpha: f64) -> Result<Point> {
    open_unit("alpha", alpha)?;
    x.check_dim(t.dim())?;
    finite(mann_point(t, x, alpha))
}

pub fn ishikawa_step(t: &MappingSpec, x: &Point, alpha: f64, beta: f64) -> Result<Point> {
    open_unit("alpha", alpha)?;
    open_unit("beta", beta)?;
    x.check_dim(t.dim())?;
    let y = mann_point(t, x, beta);
    finite(x.lerp(&t.eval(&y), alpha))
}

pub fn s_step(t: &MappingSpec, a: &Point, alpha: f64, beta: f64) -> Result<Point> {
    open_unit("alpha", alpha)?;
    open_unit("beta", beta)?;
    a.check_dim(t.dim())?;
    let ta = t.eval(a);
    let b = a.lerp(&ta, beta);
    finite(ta.lerp(&t.eval(&b), alpha))
}

pub fn normal_s_step(t: &MappingSpec, x: &Point, alpha: f64) -> Result<Point> {
    open_unit("alpha", alpha)?;
    x.check_dim(t.dim())?;
    finite(t.eval(&mann_point(t, x, alpha)))
}

pub fn ky_step(t: &MappingSpec, x: &Point, alpha: f64, beta: f64) -> Result<Point> {
    open_unit("alpha", alpha)?;
    open_unit("beta", beta)?;
    x.check_dim(t.dim())?;
    let z = mann_point(t, x, beta);
    let y = mann_point(t, &z, alpha);
    finite(t.eval(&y))
}

/// When the driver stops.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StopRule {
    pub residual_tol: f64,
    pub max_iter: usize,
    /// Abort once `‖x_n‖` exceeds this; defaults to `1e12 * (1 + ‖x_1‖)`.
    #[serde(default)]
    pub divergence_cap: Option<f64>,
}

impl StopRule {
    pub fn new(residual_tol: f64, max_iter: usize) -> Result<Self> {
        let rule = Self {
            residual_tol,
            max_iter,
            divergence_cap: None,
        };
        rule.validate()?;
        Ok(rule)
    }

    pub fn with_divergence_cap(mut self, cap: f64) -> Result<Self> {
        self.divergence_cap = Some(cap);
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.residual_tol > 0.0) {
            return Err(Error::InvalidParameter {
                name: "residual_tol",
                value: self.residual_tol,
                reason: "must be > 0",
            });
        }
        if self.max_iter == 0 {
            return Err(Error::InvalidParameter {
                name: "max_iter",
                value: 0.0,
                reason: "must be >= 1",
            });
        }
        if let Some(cap) = self.divergence_cap {
            if !(cap > 0.0) {
                return Err(Error::InvalidParameter {
                    name: "divergence_cap",
                    value: cap,
                    reason: "must be > 0",
                });
            }
        }
        Ok(())
    }
}

/// Runs `scheme` from `x1` until `‖x_n - T x_n‖ < residual_tol`, `max_iter`
/// iterates have been recorded, or the iterate leaves the divergence cap.
///
/// Errors and distances to `F(T)` are recorded when the mapping declares
/// fixed points. Divergence is reported through the trace's stop reason.
pub fn run_iteration(
    scheme: SchemeId,
    t: &MappingSpec,
    x1: &Point,
    schedule: &Schedule,
    stop: &StopRule,
    norm: NormKind,
) -> Result<IterationTrace> {
    stop.validate()?;
    x1.check_dim(t.dim())?;
    let x1_norm = crate::norm(x1, norm)?;
    let cap = stop.divergence_cap.unwrap_or(1e12 * (1.0 + x1_norm));
    let fixed = t.fixed_set();
    let reference = fixed.and_then(|f| f.reference_point());

    let mut iterates = Vec::new();
    let mut residuals = Vec::new();
    let mut errors = reference.map(|_| Vec::new());
    let mut dists = fixed.map(|_| Vec::new());

    let mut x = x1.clone();
    let mut n = 1;
    let reason = loop {
        if !x.is_finite() || norm.eval(x.coords()) > cap {
            break StopReason::Diverged;
        }
        let residual = x.distance(&t.eval(&x), norm);
        if !residual.is_finite() {
            break StopReason::Diverged;
        }
        if let (Some(errs), Some(p)) = (errors.as_mut(), reference) {
            errs.push(x.distance(p, norm));
        }
        if let (Some(ds), Some(f)) = (dists.as_mut(), fixed) {
            ds.push(distance_to_fixed_set(&x, f, norm)?);
        }
        residuals.push(residual);
        iterates.push(x.clone());

        if residual < stop.residual_tol {
            break StopReason::ResidualBelowTol;
        }
        if n >= stop.max_iter {
            break StopReason::MaxIter;
        }
        let alpha = if scheme.uses_alpha() {
            schedule.alpha(n)?
        } else {
            0.5
        };
        let beta = if scheme.uses_beta() {
            schedule.beta(n)?
        } else {
            0.5
        };
        x = match scheme.step(t, &x, alpha, beta) {
            Ok(next) => next,
            Err(Error::InvalidInput(_)) => break StopReason::Diverged,
            Err(e) => return Err(e),
        };
        n += 1;
    };

    IterationTrace::from_parts(
        scheme,
        norm,
        stop.residual_tol,
        iterates,
        errors,
        residuals,
        dists,
        reason,
    )
}
