//! Points of a finite-dimensional real normed space and the norms on it.

use std::fmt;
use std::ops::Index;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A vector with finite coordinates. Dimension is at least one.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Point(Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Result<Self> {
        if coords.is_empty() {
            return Err(Error::InvalidInput("point must have dimension >= 1".into()));
        }
        if let Some(i) = coords.iter().position(|c| !c.is_finite()) {
            return Err(Error::InvalidInput(format!(
                "coordinate {i} is not finite ({})",
                coords[i]
            )));
        }
        Ok(Self(coords))
    }

    pub fn scalar(x: f64) -> Result<Self> {
        Self::new(vec![x])
    }

    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "zero-dimensional point");
        Self(vec![0.0; dim])
    }

    /// Wraps coordinates produced by arithmetic on finite points. The caller
    /// checks finiteness with [`Point::is_finite`] where overflow is possible.
    pub(crate) fn from_raw(coords: Vec<f64>) -> Self {
        debug_assert!(!coords.is_empty());
        Self(coords)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn into_vec(self) -> Vec<f64> {
        self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn check_dim(&self, expected: usize) -> Result<()> {
        if self.dim() == expected {
            Ok(())
        } else {
            Err(Error::DimensionMismatch {
                expected,
                found: self.dim(),
            })
        }
    }

    pub fn sub(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn add(&self, other: &Point) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|a| s * a).collect())
    }

    /// The convex combination `(1 - w) * self + w * other`, evaluated as
    /// `self + w * (other - self)` so that equal endpoints are reproduced
    /// exactly.
    pub fn lerp(&self, other: &Point, w: f64) -> Point {
        debug_assert_eq!(self.dim(), other.dim());
        Point(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| a + w * (b - a))
                .collect(),
        )
    }

    pub fn distance(&self, other: &Point, kind: NormKind) -> f64 {
        kind.eval(&self.sub(other).0)
    }
}

impl Index<usize> for Point {
    type Output = f64;

    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ", ")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

impl<'de> Deserialize<'de> for Point {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let coords = Vec::<f64>::deserialize(d)?;
        Point::new(coords).map_err(serde::de::Error::custom)
    }
}

/// Norm selector for the ambient space.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum NormKind {
    #[default]
    Euclidean,
    Max,
    /// `(sum |v_i|^p)^(1/p)` with finite `p >= 1`.
    P(f64),
}

impl NormKind {
    pub fn p(exponent: f64) -> Result<Self> {
        if exponent.is_finite() && exponent >= 1.0 {
            Ok(NormKind::P(exponent))
        } else {
            Err(Error::InvalidParameter {
                name: "p",
                value: exponent,
                reason: "p-norm exponent must be finite and >= 1",
            })
        }
    }

    /// Euclidean and p-norms with `1 < p < inf` are uniformly convex; the
    /// max norm and the 1-norm are not.
    pub fn is_uniformly_convex(self) -> bool {
        match self {
            NormKind::Euclidean => true,
            NormKind::Max => false,
            NormKind::P(p) => p > 1.0,
        }
    }

    pub(crate) fn eval(self, v: &[f64]) -> f64 {
        match self {
            NormKind::Euclidean => hypot_all(v),
            NormKind::Max => v.iter().fold(0.0, |m, c| m.max(c.abs())),
            NormKind::P(1.0) => v.iter().map(|c| c.abs()).sum(),
            NormKind::P(2.0) => hypot_all(v),
            NormKind::P(p) => {
                // scale by the max entry so large exponents do not overflow
                let m = v.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
                if m == 0.0 {
                    return 0.0;
                }
                let s: f64 = v.iter().map(|c| (c.abs() / m).powf(p)).sum();
                m * s.powf(1.0 / p)
            }
        }
    }
}

fn hypot_all(v: &[f64]) -> f64 {
    let m = v.iter().fold(0.0_f64, |m, c| m.max(c.abs()));
    if m == 0.0 {
        return 0.0;
    }
    if v.len() == 1 {
        return m;
    }
    let s: f64 = v.iter().map(|c| (c / m) * (c / m)).sum();
    m * s.sqrt()
}

/// Norm of a point under the selected [`NormKind`].
pub fn norm(v: &Point, kind: NormKind) -> Result<f64> {
    if !v.is_finite() {
        return Err(Error::InvalidInput("norm of non-finite vector".into()));
    }
    if let NormKind::P(p) = kind {
        NormKind::p(p)?;
    }
    Ok(kind.eval(v.coords()))
}
