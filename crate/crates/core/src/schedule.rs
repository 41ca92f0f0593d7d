//! Parameter sequences `{α_n}`, `{β_n}` and their declared lower bound `λ`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A closed-form rule producing the n-th parameter, `n >= 1`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Rule {
    Constant(f64),
    Shaped(ShapedRule),
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum ShapedRule {
    /// `floor + amplitude / n^exponent`
    Decay {
        floor: f64,
        amplitude: f64,
        exponent: f64,
    },
    /// `odd` at odd `n`, `even` at even `n`
    Alternating { odd: f64, even: f64 },
}

impl Rule {
    pub fn eval(&self, n: usize) -> f64 {
        debug_assert!(n >= 1);
        match *self {
            Rule::Constant(v) => v,
            Rule::Shaped(ShapedRule::Decay {
                floor,
                amplitude,
                exponent,
            }) => floor + amplitude / (n as f64).powf(exponent),
            Rule::Shaped(ShapedRule::Alternating { odd, even }) => {
                if n % 2 == 1 {
                    odd
                } else {
                    even
                }
            }
        }
    }
}

/// `{α_n}`, `{β_n}` with `0 < λ <= α_n, β_n < 1`.
///
/// Bounds are checked on every value actually generated, so a rule that
/// wanders outside `[λ, 1)` at some large `n` is reported at that `n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Schedule {
    alpha: Rule,
    beta: Rule,
    lambda: f64,
}

impl Schedule {
    pub fn new(alpha: Rule, beta: Rule, lambda: f64) -> Result<Self> {
        if !(lambda > 0.0 && lambda < 1.0) {
            return Err(Error::InvalidParameter {
                name: "lambda",
                value: lambda,
                reason: "lower bound must lie in (0,1)",
            });
        }
        let s = Self {
            alpha,
            beta,
            lambda,
        };
        // the first term is cheap to check eagerly
        s.alpha(1)?;
        s.beta(1)?;
        Ok(s)
    }

    /// `α_n = β_n = λ` for all `n`.
    pub fn constant(value: f64) -> Result<Self> {
        Self::new(Rule::Constant(value), Rule::Constant(value), value)
    }

    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    pub fn alpha_rule(&self) -> Rule {
        self.alpha
    }

    pub fn beta_rule(&self) -> Rule {
        self.beta
    }

    pub fn alpha(&self, n: usize) -> Result<f64> {
        self.checked("alpha", self.alpha.eval(n))
    }

    pub fn beta(&self, n: usize) -> Result<f64> {
        self.checked("beta", self.beta.eval(n))
    }

    fn checked(&self, name: &'static str, v: f64) -> Result<f64> {
        if !(v < 1.0) {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                reason: "must be < 1",
            });
        }
        if !(v >= self.lambda) {
            return Err(Error::InvalidParameter {
                name,
                value: v,
                reason: "must be >= the schedule's lambda",
            });
        }
        Ok(v)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_schedule() {
        let s = Schedule::constant(0.5).unwrap();
        assert_eq!(s.alpha(1).unwrap(), 0.5);
        assert_eq!(s.beta(1000).unwrap(), 0.5);
        assert_eq!(s.lambda(), 0.5);
    }

    #[test]
    fn decay_rule_values() {
        let r = Rule::Shaped(ShapedRule::Decay {
            floor: 0.3,
            amplitude: 0.4,
            exponent: 1.0,
        });
        assert!((r.eval(1) - 0.7).abs() < 1e-15);
        assert!((r.eval(4) - 0.4).abs() < 1e-15);
        let s = Schedule::new(r, Rule::Constant(0.5), 0.3).unwrap();
        assert!(s.alpha(1_000_000).unwrap() >= 0.3);
    }

    #[test]
    fn endpoints_rejected() {
        assert!(Schedule::constant(0.0).is_err());
        assert!(Schedule::constant(1.0).is_err());
        assert!(Schedule::new(Rule::Constant(0.5), Rule::Constant(0.5), 0.6).is_err());
    }

    #[test]
    fn violation_found_at_generated_index() {
        let r = Rule::Shaped(ShapedRule::Alternating {
            odd: 0.5,
            even: 0.1,
        });
        let s = Schedule::new(r, Rule::Constant(0.5), 0.2).unwrap();
        assert!(s.alpha(1).is_ok());
        assert!(matches!(
            s.alpha(2),
            Err(Error::InvalidParameter { name: "alpha", .. })
        ));
    }

    #[test]
    fn rules_deserialize_from_config() {
        #[derive(Deserialize)]
        struct W {
            a: Rule,
            b: Rule,
        }
        let w: W = toml::from_str(
            "a = 0.25\nb = { rule = \"decay\", floor = 0.2, amplitude = 0.5, exponent = 2.0 }",
        )
        .unwrap();
        assert_eq!(w.a, Rule::Constant(0.25));
        assert_eq!(
            w.b,
            Rule::Shaped(ShapedRule::Decay {
                floor: 0.2,
                amplitude: 0.5,
                exponent: 2.0
            })
        );
    }
}
