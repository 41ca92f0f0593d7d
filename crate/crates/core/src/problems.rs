//! Built-in test problems and loading of user-defined problems.
//!
//! Every problem is a self-map of the whole space, so the convex set `C`
//! is the ambient space itself.

use std::f64::consts::FRAC_PI_2;

use nalgebra::DMatrix;
use serde::{Deserialize, Serialize};

use crate::analysis::ConditionAFunction;
use crate::error::{Error, Result};
use crate::mapping::{
    validate_mapping_class, AffineSubspace, FixedSet, LipschitzClass, MappingKind, MappingSpec,
    ScalarFn, ValidationReport,
};
use crate::point::{NormKind, Point};

/// Random pairs drawn when validating a problem's declared class.
pub const VALIDATION_SAMPLES: usize = 256;
pub const VALIDATION_SEED: u64 = 0x5eed;

#[derive(Debug, Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub mapping: MappingSpec,
    pub domain_note: String,
    pub default_start: Point,
    pub recommended_norm: NormKind,
    pub condition_a: Option<ConditionAFunction>,
    /// How the Condition (A) gauge follows from the mapping.
    pub condition_a_note: Option<String>,
    pub validation: ValidationReport,
}

impl ProblemSpec {
    /// Validates the mapping's declared class under the recommended norm
    /// and checks the start point.
    pub fn new(
        name: impl Into<String>,
        mapping: MappingSpec,
        default_start: Point,
        recommended_norm: NormKind,
    ) -> Result<Self> {
        let name = name.into();
        default_start.check_dim(mapping.dim())?;
        let validation = validate_mapping_class(
            &mapping,
            recommended_norm,
            VALIDATION_SAMPLES,
            VALIDATION_SEED,
        )?;
        if !validation.passed {
            let declared = match mapping.class() {
                LipschitzClass::Contraction(l) => format!("contraction L={l}"),
                LipschitzClass::Nonexpansive => "nonexpansive".to_string(),
            };
            let ratio = match validation.exact_lipschitz {
                Some(e) if e > validation.max_ratio => e,
                _ => validation.max_ratio,
            };
            return Err(Error::Load(format!(
                "problem '{name}': declared {declared} violated, observed ratio {ratio}"
            )));
        }
        Ok(Self {
            name,
            mapping,
            domain_note: "whole space".into(),
            default_start,
            recommended_norm,
            condition_a: None,
            condition_a_note: None,
            validation,
        })
    }

    pub fn with_condition_a(mut self, f: ConditionAFunction, note: impl Into<String>) -> Self {
        self.condition_a = Some(f);
        self.condition_a_note = Some(note.into());
        self
    }

    pub fn with_domain_note(mut self, note: impl Into<String>) -> Self {
        self.domain_note = note.into();
        self
    }

    /// Every point is fixed; rate comparisons are meaningless.
    pub fn is_degenerate(&self) -> bool {
        self.mapping.is_degenerate_identity()
    }

    pub fn is_contraction(&self) -> bool {
        self.mapping.class().is_contraction()
    }
}

fn pt(c: &[f64]) -> Point {
    Point::new(c.to_vec()).expect("finite literal")
}

/// Smallest singular value of `I - A`; for affine `T`,
/// `‖x - Tx‖ = ‖(I - A)(x - p)‖ >= σ_min(I - A) ‖x - p‖`.
fn min_singular_of_identity_minus(a: &DMatrix<f64>) -> f64 {
    let n = a.nrows();
    (DMatrix::identity(n, n) - a)
        .singular_values()
        .iter()
        .copied()
        .fold(f64::INFINITY, f64::min)
}

fn affine_3d() -> Result<ProblemSpec> {
    let (s, c) = 0.3_f64.sin_cos();
    let rows = vec![
        vec![0.9 * c, -0.9 * s, 0.0],
        vec![0.9 * s, 0.9 * c, 0.0],
        vec![0.0, 0.0, 0.5],
    ];
    let p = [1.0, -2.0, 0.5];
    let offset: Vec<f64> = rows
        .iter()
        .zip(&p)
        .map(|(row, pi)| pi - row.iter().zip(&p).map(|(a, x)| a * x).sum::<f64>())
        .collect();
    let kind = MappingKind::affine(rows, offset)?;
    let sigma = min_singular_of_identity_minus(&kind.linear_part().expect("affine"));
    let mapping = MappingSpec::new(
        kind,
        LipschitzClass::Contraction(0.9),
        Some(FixedSet::singleton(pt(&p))),
    )?;
    Ok(ProblemSpec::new(
        "affine_3d",
        mapping,
        pt(&[6.0, 4.0, -3.0]),
        NormKind::Euclidean,
    )?
    .with_condition_a(
        ConditionAFunction::linear(sigma)?,
        "affine: ‖x - Tx‖ = ‖(I - A)(x - p)‖ >= σ_min(I - A)·d(x, F)",
    ))
}

/// The built-in suite:
///
/// * `halving`: `x ↦ x/2`, contraction `L = 1/2`, `F = {0}`
/// * `third_plus`: `x ↦ (x + 4)/3`, contraction `L = 1/3`, `F = {2}`
/// * `scale_0_9`: `x ↦ 0.9 x`, contraction `L = 0.9`, `F = {0}`
/// * `affine_3d`: `x ↦ A x + c` in 3-d with `‖A‖₂ = 0.9` (scaled rotation
///   block plus a `0.5` axis), `F = {(1, -2, 0.5)}`
/// * `rotation_1`: rotation by 1 rad, nonexpansive isometry, `F = {0}`
/// * `swap`: `(x, y) ↦ (y, x)`, nonexpansive, `F` = the diagonal
/// * `rotation_quarter`: rotation by π/2, on which Picard cycles
/// * `identity_2d`: rotation by 0, every point fixed (degenerate)
pub fn builtin_suite() -> Vec<ProblemSpec> {
    builtin_suite_checked().expect("built-in problems are valid")
}

fn builtin_suite_checked() -> Result<Vec<ProblemSpec>> {
    let scalar_affine = |name: &str, l: f64, c: f64, p: f64, start: f64| -> Result<ProblemSpec> {
        let mapping = MappingSpec::new(
            MappingKind::affine(vec![vec![l]], vec![c])?,
            LipschitzClass::Contraction(l),
            Some(FixedSet::singleton(pt(&[p]))),
        )?;
        Ok(
            ProblemSpec::new(name, mapping, pt(&[start]), NormKind::Euclidean)?.with_condition_a(
                ConditionAFunction::linear(1.0 - l)?,
                "1-d affine: |x - Tx| = (1 - L)|x - p|",
            ),
        )
    };
    let rotation = |name: &str, angle: f64, start: [f64; 2]| -> Result<ProblemSpec> {
        let mapping = MappingSpec::new(
            MappingKind::Rotation2d { angle },
            LipschitzClass::Nonexpansive,
            Some(FixedSet::singleton(Point::zeros(2))),
        )?;
        Ok(
            ProblemSpec::new(name, mapping, pt(&start), NormKind::Euclidean)?.with_condition_a(
                ConditionAFunction::linear(2.0 * (angle / 2.0).sin())?,
                "rotation: ‖x - Tx‖ is the chord 2 sin(θ/2)‖x‖",
            ),
        )
    };

    let swap = {
        let mapping = MappingSpec::new(
            MappingKind::CoordinateSwap,
            LipschitzClass::Nonexpansive,
            Some(FixedSet::Affine(AffineSubspace {
                origin: Point::zeros(2),
                directions: vec![pt(&[1.0, 1.0])],
            })),
        )?;
        ProblemSpec::new("swap", mapping, pt(&[3.0, -1.0]), NormKind::Euclidean)?.with_condition_a(
            ConditionAFunction::linear(2.0)?,
            "reflection in the diagonal: ‖x - Tx‖ = √2|x0 - x1| = 2·d(x, diagonal)",
        )
    };

    let identity = {
        let mapping = MappingSpec::new(
            MappingKind::Rotation2d { angle: 0.0 },
            LipschitzClass::Nonexpansive,
            Some(whole_space(2)),
        )?;
        ProblemSpec::new("identity_2d", mapping, pt(&[1.0, 1.0]), NormKind::Euclidean)?
            .with_domain_note("whole plane; every point fixed")
    };

    Ok(vec![
        scalar_affine("halving", 0.5, 0.0, 0.0, 1.0)?,
        scalar_affine("third_plus", 1.0 / 3.0, 4.0 / 3.0, 2.0, 50.0)?,
        scalar_affine("scale_0_9", 0.9, 0.0, 0.0, 1.0)?,
        affine_3d()?,
        rotation("rotation_1", 1.0, [3.0, -2.0])?,
        swap,
        rotation("rotation_quarter", FRAC_PI_2, [1.0, 0.0])?,
        identity,
    ])
}

fn whole_space(dim: usize) -> FixedSet {
    FixedSet::Affine(AffineSubspace {
        origin: Point::zeros(dim),
        directions: (0..dim)
            .map(|i| {
                let mut e = vec![0.0; dim];
                e[i] = 1.0;
                Point::from_raw(e)
            })
            .collect(),
    })
}

pub fn builtin(name: &str) -> Option<ProblemSpec> {
    builtin_suite().into_iter().find(|p| p.name == name)
}

/// Mapping part of a problem definition.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum KindConfig {
    Affine {
        matrix: Vec<Vec<f64>>,
        offset: Vec<f64>,
    },
    Rotation2d {
        angle: f64,
    },
    CoordinateSwap,
    /// Piecewise-linear scalar map through `(xs[i], ys[i])`.
    Table {
        xs: Vec<f64>,
        ys: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SubspaceConfig {
    pub origin: Point,
    #[serde(default)]
    pub directions: Vec<Point>,
}

/// A user-defined problem as written in an experiment config.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ProblemConfig {
    pub name: String,
    #[serde(flatten)]
    pub kind: KindConfig,
    pub class: LipschitzClass,
    #[serde(default)]
    pub fixed_points: Option<Vec<Point>>,
    #[serde(default)]
    pub fixed_subspace: Option<SubspaceConfig>,
    #[serde(default)]
    pub start: Option<Point>,
    #[serde(default)]
    pub norm: NormKind,
    #[serde(default)]
    pub condition_a: Option<ConditionAFunction>,
    #[serde(default)]
    pub domain_note: Option<String>,
}

/// Builds and validates a problem from its config form.
///
/// Identity mappings without a declared fixed set get the whole space as
/// `F(T)`.
pub fn load_problem(config: &ProblemConfig) -> Result<ProblemSpec> {
    let kind = match &config.kind {
        KindConfig::Affine { matrix, offset } => {
            MappingKind::affine(matrix.clone(), offset.clone())?
        }
        KindConfig::Rotation2d { angle } => MappingKind::Rotation2d { angle: *angle },
        KindConfig::CoordinateSwap => MappingKind::CoordinateSwap,
        KindConfig::Table { xs, ys } => {
            MappingKind::Scalar(ScalarFn::table(xs.clone(), ys.clone())?)
        }
    };
    let dim = kind.dim();
    let fixed = match (&config.fixed_points, &config.fixed_subspace) {
        (Some(_), Some(_)) => {
            return Err(Error::Parse(format!(
                "problem '{}': give fixed_points or fixed_subspace, not both",
                config.name
            )))
        }
        (Some(ps), None) => Some(FixedSet::Points(ps.clone())),
        (None, Some(s)) => Some(FixedSet::Affine(AffineSubspace {
            origin: s.origin.clone(),
            directions: s.directions.clone(),
        })),
        (None, None) => None,
    };
    let mut mapping = MappingSpec::new(kind.clone(), config.class, fixed)
        .map_err(|e| Error::Load(format!("problem '{}': {e}", config.name)))?;
    if mapping.is_degenerate_identity() && mapping.fixed_set().is_none() {
        mapping = MappingSpec::new(kind, config.class, Some(whole_space(dim)))?;
    }
    let start = match &config.start {
        Some(s) => s.clone(),
        None => Point::from_raw(vec![1.0; dim]),
    };
    if start.dim() != dim {
        return Err(Error::Load(format!(
            "problem '{}': start has dimension {}, mapping has {dim}",
            config.name,
            start.dim()
        )));
    }
    let mut spec = ProblemSpec::new(config.name.clone(), mapping, start, config.norm)?;
    if let Some(f) = &config.condition_a {
        f.validate()?;
        spec = spec.with_condition_a(f.clone(), "user supplied");
    }
    if let Some(note) = &config.domain_note {
        spec = spec.with_domain_note(note.clone());
    }
    Ok(spec)
}
