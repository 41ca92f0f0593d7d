//! Closed-form error bounds for contractions under schedules with
//! `α_n, β_n >= λ`.
//!
//! Each scheme satisfies `‖x_{n+1} - p‖ <= q ‖x_n - p‖` for a per-step
//! factor `q(L, λ)`, so `‖x_{n+1} - p‖ <= q^n ‖x_1 - p‖`:
//!
//! | scheme     | `q(L, λ)`                          |
//! |------------|------------------------------------|
//! | `picard`   | `L`                                |
//! | `mann`     | `1 - (1 - L) λ`                    |
//! | `ishikawa` | `1 - λ (1 - L (1 - (1 - L) λ))`    |
//! | `s`        | `L (1 - (1 - L) λ²)`               |
//! | `normal_s` | `L (1 - (1 - L) λ)`                |
//! | `ky`       | `L (1 - (1 - L) λ)²`               |
//!
//! The `s` factor is also commonly written `L (1 - λ²(1 - L))`; only the
//! form above is implemented.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::schemes::SchemeId;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BoundParams {
    l: f64,
    lambda: f64,
    initial_error: f64,
}

impl BoundParams {
    pub fn new(l: f64, lambda: f64, initial_error: f64) -> Result<Self> {
        if !(l > 0.0 && l < 1.0) {
            return Err(Error::InvalidParameter {
                name: "L",
                value: l,
                reason: "must lie in (0,1)",
            });
        }
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "must lie in (0,1)",
            });
        }
        if !(initial_error >= 0.0 && initial_error.is_finite()) {
            return Err(Error::InvalidParameter {
                name: "initial_error",
                value: initial_error,
                reason: "must be finite and >= 0",
            });
        }
        Ok(Self {
            l,
            lambda,
            initial_error,
        })
    }

    pub fn l(&self) -> f64 {
        self.l
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn initial_error(&self) -> f64 {
        self.initial_error
    }

    pub fn with_initial_error(self, initial_error: f64) -> Result<Self> {
        Self::new(self.l, self.lambda, initial_error)
    }
}

/// Per-step contraction factor of `scheme`'s error bound.
pub fn step_factor(scheme: SchemeId, l: f64, lambda: f64) -> f64 {
    let gap = 1.0 - l;
    match scheme {
        SchemeId::Picard => l,
        SchemeId::Mann => 1.0 - gap * lambda,
        SchemeId::Ishikawa => 1.0 - lambda * (1.0 - l * (1.0 - gap * lambda)),
        SchemeId::S => l * (1.0 - gap * lambda * lambda),
        SchemeId::NormalS => l * (1.0 - gap * lambda),
        SchemeId::Ky => {
            let m = 1.0 - gap * lambda;
            l * m * m
        }
    }
}

/// `q^n · e_1` for `scheme`.
pub fn bound(scheme: SchemeId, params: &BoundParams, n: u32) -> f64 {
    powu(step_factor(scheme, params.l, params.lambda), n) * params.initial_error
}

/// `[L(1 - (1 - L)λ²)]^n · e_1`
pub fn bound_s(params: &BoundParams, n: u32) -> f64 {
    bound(SchemeId::S, params, n)
}

/// `[L(1 - (1 - L)λ)]^n · e_1`
pub fn bound_normal_s(params: &BoundParams, n: u32) -> f64 {
    bound(SchemeId::NormalS, params, n)
}

/// `[L(1 - (1 - L)λ)²]^n · e_1`
pub fn bound_ky(params: &BoundParams, n: u32) -> f64 {
    bound(SchemeId::Ky, params, n)
}

/// Ratio of the `ky` bound to the `s` bound with equal initial errors,
/// `[(1 - (1 - L)λ)² / (1 - (1 - L)λ²)]^n`.
pub fn bound_ratio_mk(params: &BoundParams, n: u32) -> f64 {
    let m = 1.0 - (1.0 - params.l) * params.lambda;
    let k = 1.0 - (1.0 - params.l) * params.lambda * params.lambda;
    powu(m * m / k, n)
}

/// `(1 - (1 - L)λ)^{2n}`, the square of the quotient of the `ky` and
/// `normal_s` bounds with equal initial errors (that quotient is
/// `(1 - (1 - L)λ)^n`). Both vanish as `n → ∞`.
pub fn bound_ratio_ml(params: &BoundParams, n: u32) -> f64 {
    let m = 1.0 - (1.0 - params.l) * params.lambda;
    powu(m, 2 * n)
}

fn powu(base: f64, n: u32) -> f64 {
    match i32::try_from(n) {
        Ok(k) => base.powi(k),
        Err(_) => base.powf(f64::from(n)),
    }
}
