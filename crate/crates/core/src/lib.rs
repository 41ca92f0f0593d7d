//! Fixed-point iteration processes for contraction and nonexpansive
//! mappings on finite-dimensional normed spaces.
//!
//! The crate provides six processes (Picard, Mann, Ishikawa, S, normal S
//! and the three-step `ky` process), a driver with residual-based stopping,
//! closed-form rate bounds, relative-speed classification of two runs, and
//! diagnostics for error monotonicity, residual decay, distance to the
//! fixed-point set and Condition (A).
//!
//! ```
//! use fpiter::{builtin, run_iteration, NormKind, Schedule, SchemeId, StopRule};
//!
//! let p = builtin("halving").unwrap();
//! let trace = run_iteration(
//!     SchemeId::Ky,
//!     &p.mapping,
//!     &p.default_start,
//!     &Schedule::constant(0.5).unwrap(),
//!     &StopRule::new(1e-12, 100).unwrap(),
//!     NormKind::Euclidean,
//! )
//! .unwrap();
//! assert_eq!(trace.errors().unwrap()[1], 9.0 / 32.0);
//! ```

// NaN-rejecting guards are written as `!(a < b)` throughout.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod analysis;
pub mod error;
pub mod mapping;
pub mod point;
pub mod problems;
pub mod schedule;
pub mod schemes;
pub mod trace;

pub use error::{Error, Result};
pub use mapping::{
    apply_mapping, operator_norm, validate_mapping_class, AffineSubspace, FixedSet, LipschitzClass,
    MappingKind, MappingSpec, ScalarFn, ValidationReport,
};
pub use point::{norm, NormKind, Point};
pub use problems::{builtin, builtin_suite, load_problem, KindConfig, ProblemConfig, ProblemSpec};
pub use schedule::{Rule, Schedule, ShapedRule};
pub use schemes::{
    ishikawa_step, ky_step, mann_step, normal_s_step, picard_step, run_iteration, s_step, SchemeId,
    StopRule,
};
pub use trace::{IterationTrace, StopReason};
