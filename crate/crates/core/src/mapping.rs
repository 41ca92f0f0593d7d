//! Self-maps `T` of the ambient space, their declared Lipschitz class and
//! known fixed points.

use std::fmt;
use std::sync::Arc;

use nalgebra::DMatrix;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::point::{NormKind, Point};

/// Tolerance for `‖Tp - p‖` when accepting a declared fixed point.
pub const FIXED_POINT_TOL: f64 = 1e-12;
/// Slack allowed on sampled Lipschitz ratios.
pub const LIPSCHITZ_SLACK: f64 = 1e-9;
/// Half-width of the box that validation pairs are drawn from.
pub const SAMPLE_BOX: f64 = 10.0;

/// A one-dimensional map given by a callback.
#[derive(Clone)]
pub struct ScalarFn {
    label: String,
    f: Arc<dyn Fn(f64) -> f64 + Send + Sync>,
    lipschitz: Option<f64>,
}

impl ScalarFn {
    pub fn new(label: impl Into<String>, f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            label: label.into(),
            f: Arc::new(f),
            lipschitz: None,
        }
    }

    /// Piecewise-linear interpolation of a table of knots, held constant
    /// outside the first and last knot. Its exact Lipschitz constant is the
    /// steepest segment slope.
    pub fn table(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        if xs.len() != ys.len() || xs.len() < 2 {
            return Err(Error::Parse(format!(
                "table needs matching knot lists of length >= 2 (got {} and {})",
                xs.len(),
                ys.len()
            )));
        }
        if xs.iter().chain(&ys).any(|v| !v.is_finite()) {
            return Err(Error::Parse("table knots must be finite".into()));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::Parse(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        let slope = xs
            .windows(2)
            .zip(ys.windows(2))
            .map(|(x, y)| ((y[1] - y[0]) / (x[1] - x[0])).abs())
            .fold(0.0, f64::max);
        let label = format!("table[{} knots]", xs.len());
        let f = move |x: f64| {
            if x <= xs[0] {
                return ys[0];
            }
            let last = xs.len() - 1;
            if x >= xs[last] {
                return ys[last];
            }
            let i = xs.partition_point(|k| *k <= x) - 1;
            let w = (x - xs[i]) / (xs[i + 1] - xs[i]);
            (1.0 - w) * ys[i] + w * ys[i + 1]
        };
        Ok(Self {
            label,
            f: Arc::new(f),
            lipschitz: Some(slope),
        })
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.f)(x)
    }
}

impl fmt::Debug for ScalarFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ScalarFn")
            .field("label", &self.label)
            .field("lipschitz", &self.lipschitz)
            .finish_non_exhaustive()
    }
}

#[derive(Debug, Clone)]
pub enum MappingKind {
    /// `x ↦ A x + c` with square `A`.
    Affine {
        matrix: DMatrix<f64>,
        offset: Vec<f64>,
    },
    /// Counter-clockwise rotation of the plane by `angle` radians.
    Rotation2d {
        angle: f64,
    },
    /// `(x0, x1) ↦ (x1, x0)`.
    CoordinateSwap,
    Scalar(ScalarFn),
}

impl MappingKind {
    pub fn affine(rows: Vec<Vec<f64>>, offset: Vec<f64>) -> Result<Self> {
        let n = rows.len();
        if n == 0 {
            return Err(Error::Parse("affine matrix has no rows".into()));
        }
        if let Some((i, r)) = rows.iter().enumerate().find(|(_, r)| r.len() != n) {
            return Err(Error::Parse(format!(
                "affine matrix must be square: row {i} has {} entries, expected {n}",
                r.len()
            )));
        }
        if offset.len() != n {
            return Err(Error::Parse(format!(
                "affine offset has {} entries, matrix is {n}x{n}",
                offset.len()
            )));
        }
        if rows.iter().flatten().chain(&offset).any(|v| !v.is_finite()) {
            return Err(Error::Parse("affine entries must be finite".into()));
        }
        let matrix = DMatrix::from_row_iterator(n, n, rows.into_iter().flatten());
        Ok(MappingKind::Affine { matrix, offset })
    }

    pub fn dim(&self) -> usize {
        match self {
            MappingKind::Affine { matrix, .. } => matrix.nrows(),
            MappingKind::Rotation2d { .. } | MappingKind::CoordinateSwap => 2,
            MappingKind::Scalar(_) => 1,
        }
    }

    /// Linear part as a matrix, when the map is affine.
    pub fn linear_part(&self) -> Option<DMatrix<f64>> {
        match self {
            MappingKind::Affine { matrix, .. } => Some(matrix.clone()),
            MappingKind::Rotation2d { angle } => {
                let (s, c) = angle.sin_cos();
                Some(DMatrix::from_row_slice(2, 2, &[c, -s, s, c]))
            }
            MappingKind::CoordinateSwap => {
                Some(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]))
            }
            MappingKind::Scalar(_) => None,
        }
    }

    fn eval(&self, x: &[f64]) -> Vec<f64> {
        match self {
            MappingKind::Affine { matrix, offset } => {
                let n = matrix.nrows();
                (0..n)
                    .map(|i| {
                        let mut acc = 0.0;
                        for (j, xj) in x.iter().enumerate() {
                            acc += matrix[(i, j)] * xj;
                        }
                        acc + offset[i]
                    })
                    .collect()
            }
            MappingKind::Rotation2d { angle } => {
                let (s, c) = angle.sin_cos();
                vec![c * x[0] - s * x[1], s * x[0] + c * x[1]]
            }
            MappingKind::CoordinateSwap => vec![x[1], x[0]],
            MappingKind::Scalar(f) => vec![f.eval(x[0])],
        }
    }
}

/// Declared Lipschitz class of a mapping.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LipschitzClass {
    /// `‖Tx - Ty‖ <= L ‖x - y‖` with `0 < L < 1`.
    Contraction(f64),
    Nonexpansive,
}

impl LipschitzClass {
    pub fn constant(self) -> f64 {
        match self {
            LipschitzClass::Contraction(l) => l,
            LipschitzClass::Nonexpansive => 1.0,
        }
    }

    pub fn is_contraction(self) -> bool {
        matches!(self, LipschitzClass::Contraction(_))
    }
}

/// `origin + span(directions)`.
#[derive(Debug, Clone, PartialEq)]
pub struct AffineSubspace {
    pub origin: Point,
    pub directions: Vec<Point>,
}

/// Known part of `F(T)`.
#[derive(Debug, Clone, PartialEq)]
pub enum FixedSet {
    Points(Vec<Point>),
    Affine(AffineSubspace),
}

impl FixedSet {
    pub fn singleton(p: Point) -> Self {
        FixedSet::Points(vec![p])
    }

    /// The point errors `‖x_n - p‖` are measured against.
    pub fn reference_point(&self) -> Option<&Point> {
        match self {
            FixedSet::Points(ps) => ps.first(),
            FixedSet::Affine(s) => Some(&s.origin),
        }
    }

    fn dim(&self) -> Option<usize> {
        match self {
            FixedSet::Points(ps) => ps.first().map(Point::dim),
            FixedSet::Affine(s) => Some(s.origin.dim()),
        }
    }
}

/// A self-map `T` with its declared class and (optionally) its fixed points.
#[derive(Debug, Clone)]
pub struct MappingSpec {
    kind: MappingKind,
    class: LipschitzClass,
    fixed: Option<FixedSet>,
}

impl MappingSpec {
    /// Checks structural consistency and that every declared fixed point is
    /// fixed to within [`FIXED_POINT_TOL`]. The Lipschitz class is checked
    /// separately by [`validate_mapping_class`].
    pub fn new(kind: MappingKind, class: LipschitzClass, fixed: Option<FixedSet>) -> Result<Self> {
        if let LipschitzClass::Contraction(l) = class {
            if !(l > 0.0 && l < 1.0) {
                return Err(Error::InvalidParameter {
                    name: "L",
                    value: l,
                    reason: "contraction constant must lie in (0,1)",
                });
            }
        }
        if let MappingKind::Rotation2d { angle } = kind {
            if !angle.is_finite() {
                return Err(Error::Parse("rotation angle must be finite".into()));
            }
        }
        let spec = Self { kind, class, fixed };
        let dim = spec.dim();
        if let Some(fixed) = &spec.fixed {
            if let Some(d) = fixed.dim() {
                if d != dim {
                    return Err(Error::DimensionMismatch {
                        expected: dim,
                        found: d,
                    });
                }
            }
            match fixed {
                FixedSet::Points(ps) => {
                    for p in ps {
                        p.check_dim(dim)?;
                        spec.check_fixed(p, 1.0)?;
                    }
                }
                FixedSet::Affine(s) => {
                    spec.check_fixed(&s.origin, 1.0)?;
                    for d in &s.directions {
                        d.check_dim(dim)?;
                        let q = s.origin.add(d);
                        let scale = 1.0 + crate::norm(&q, NormKind::Euclidean)?;
                        spec.check_fixed(&q, scale)?;
                    }
                }
            }
        }
        Ok(spec)
    }

    fn check_fixed(&self, p: &Point, scale: f64) -> Result<()> {
        let gap = self.eval(p).distance(p, NormKind::Euclidean);
        if gap > FIXED_POINT_TOL * scale {
            return Err(Error::Load(format!(
                "declared fixed point {p} is not fixed: ‖Tp - p‖ = {gap:e}"
            )));
        }
        Ok(())
    }

    pub fn kind(&self) -> &MappingKind {
        &self.kind
    }

    pub fn class(&self) -> LipschitzClass {
        self.class
    }

    pub fn fixed_set(&self) -> Option<&FixedSet> {
        self.fixed.as_ref()
    }

    pub fn dim(&self) -> usize {
        self.kind.dim()
    }

    /// True when every point is fixed, so error ratios are undefined.
    pub fn is_degenerate_identity(&self) -> bool {
        match &self.kind {
            MappingKind::Affine { matrix, offset } => {
                offset.iter().all(|c| *c == 0.0)
                    && matrix == &DMatrix::identity(matrix.nrows(), matrix.ncols())
            }
            MappingKind::Rotation2d { angle } => angle.rem_euclid(std::f64::consts::TAU) == 0.0,
            _ => false,
        }
    }

    /// `Tx` without a dimension check.
    pub(crate) fn eval(&self, x: &Point) -> Point {
        Point::from_raw(self.kind.eval(x.coords()))
    }

    /// Exact Lipschitz constant under `norm`, where one is available in
    /// closed form.
    pub fn exact_lipschitz(&self, norm: NormKind) -> Option<f64> {
        match &self.kind {
            MappingKind::CoordinateSwap => Some(1.0),
            MappingKind::Scalar(f) => f.lipschitz,
            kind => kind.linear_part().and_then(|a| operator_norm(&a, norm)),
        }
    }
}

/// Induced operator norm of a square matrix for the norms where it has a
/// closed form.
pub fn operator_norm(a: &DMatrix<f64>, norm: NormKind) -> Option<f64> {
    let row_sum = || {
        a.row_iter()
            .map(|r| r.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    let col_sum = || {
        a.column_iter()
            .map(|c| c.iter().map(|v| v.abs()).sum::<f64>())
            .fold(0.0, f64::max)
    };
    match norm {
        NormKind::Euclidean => Some(largest_singular_value(a)),
        NormKind::P(2.0) => Some(largest_singular_value(a)),
        NormKind::Max => Some(row_sum()),
        NormKind::P(1.0) => Some(col_sum()),
        NormKind::P(_) => None,
    }
}

fn largest_singular_value(a: &DMatrix<f64>) -> f64 {
    a.singular_values().iter().copied().fold(0.0, f64::max)
}

/// Evaluates `Tx`.
pub fn apply_mapping(t: &MappingSpec, x: &Point) -> Result<Point> {
    x.check_dim(t.dim())?;
    Ok(t.eval(x))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub declared: LipschitzClass,
    pub samples: usize,
    /// Largest `‖Tx - Ty‖ / ‖x - y‖` over the sampled pairs.
    pub max_ratio: f64,
    pub exact_lipschitz: Option<f64>,
    pub passed: bool,
}

/// Samples `samples` random pairs from the box `[-10, 10]^d` and compares
/// the largest observed difference ratio with the declared constant. When
/// an exact Lipschitz constant is available it must also respect the
/// declaration.
pub fn validate_mapping_class(
    t: &MappingSpec,
    norm: NormKind,
    samples: usize,
    seed: u64,
) -> Result<ValidationReport> {
    if samples < 2 {
        return Err(Error::InvalidParameter {
            name: "samples",
            value: samples as f64,
            reason: "at least two sample pairs required",
        });
    }
    let dim = t.dim();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let draw = |rng: &mut ChaCha8Rng| {
        Point::from_raw(
            (0..dim)
                .map(|_| rng.random_range(-SAMPLE_BOX..=SAMPLE_BOX))
                .collect(),
        )
    };
    let mut max_ratio = 0.0_f64;
    for _ in 0..samples {
        let x = draw(&mut rng);
        let y = draw(&mut rng);
        let gap = norm.eval(x.sub(&y).coords());
        if gap == 0.0 {
            continue;
        }
        let image_gap = norm.eval(t.eval(&x).sub(&t.eval(&y)).coords());
        max_ratio = max_ratio.max(image_gap / gap);
    }
    let limit = t.class.constant() + LIPSCHITZ_SLACK;
    let exact = t.exact_lipschitz(norm);
    let passed = max_ratio <= limit && exact.is_none_or(|e| e <= limit);
    Ok(ValidationReport {
        declared: t.class,
        samples,
        max_ratio,
        exact_lipschitz: exact,
        passed,
    })
}
