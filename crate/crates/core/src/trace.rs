use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{NormKind, Point};
use crate::schemes::SchemeId;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StopReason {
    ResidualBelowTol,
    MaxIter,
    Diverged,
}

impl StopReason {
    pub fn as_str(self) -> &'static str {
        match self {
            StopReason::ResidualBelowTol => "residual_below_tol",
            StopReason::MaxIter => "max_iter",
            StopReason::Diverged => "diverged",
        }
    }
}

/// Record of one run. Index `n` in the iteration corresponds to position
/// `n - 1` in every list.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IterationTrace {
    scheme: SchemeId,
    norm: NormKind,
    residual_tol: f64,
    iterates: Vec<Point>,
    errors: Option<Vec<f64>>,
    residuals: Vec<f64>,
    dist_to_fixed: Option<Vec<f64>>,
    stop_reason: StopReason,
}

impl IterationTrace {
    /// Assembles a trace from recorded sequences, enforcing length and
    /// sign invariants.
    #[allow(clippy::too_many_arguments)]
    pub fn from_parts(
        scheme: SchemeId,
        norm: NormKind,
        residual_tol: f64,
        iterates: Vec<Point>,
        errors: Option<Vec<f64>>,
        residuals: Vec<f64>,
        dist_to_fixed: Option<Vec<f64>>,
        stop_reason: StopReason,
    ) -> Result<Self> {
        let n = iterates.len();
        let check = |name: &str, v: &[f64]| -> Result<()> {
            if v.len() != n {
                return Err(Error::InvalidInput(format!(
                    "{name} has {} entries but trace has {n} iterates",
                    v.len()
                )));
            }
            if v.iter().any(|x| !x.is_finite() || *x < 0.0) {
                return Err(Error::InvalidInput(format!(
                    "{name} must be finite and >= 0"
                )));
            }
            Ok(())
        };
        check("residuals", &residuals)?;
        if let Some(e) = &errors {
            check("errors", e)?;
        }
        if let Some(d) = &dist_to_fixed {
            check("dist_to_F", d)?;
        }
        Ok(Self {
            scheme,
            norm,
            residual_tol,
            iterates,
            errors,
            residuals,
            dist_to_fixed,
            stop_reason,
        })
    }

    pub fn scheme(&self) -> SchemeId {
        self.scheme
    }

    pub fn norm(&self) -> NormKind {
        self.norm
    }

    /// Residual tolerance of the stop rule the trace was produced under.
    pub fn residual_tol(&self) -> f64 {
        self.residual_tol
    }

    pub fn len(&self) -> usize {
        self.iterates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.iterates.is_empty()
    }

    pub fn iterates(&self) -> &[Point] {
        &self.iterates
    }

    pub fn last(&self) -> Option<&Point> {
        self.iterates.last()
    }

    /// `‖x_n - p‖` against the mapping's reference fixed point.
    pub fn errors(&self) -> Option<&[f64]> {
        self.errors.as_deref()
    }

    /// `‖x_n - T x_n‖`.
    pub fn residuals(&self) -> &[f64] {
        &self.residuals
    }

    /// `d(x_n, F(T))`.
    pub fn dist_to_fixed(&self) -> Option<&[f64]> {
        self.dist_to_fixed.as_deref()
    }

    pub fn stop_reason(&self) -> StopReason {
        self.stop_reason
    }

    pub fn dim(&self) -> Option<usize> {
        self.iterates.first().map(Point::dim)
    }
}
