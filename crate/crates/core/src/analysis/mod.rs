//! Rate bounds, relative-speed classification and trace diagnostics.

pub mod bounds;
pub mod checks;
pub mod compare;
pub mod distance;

pub use bounds::{
    bound, bound_ky, bound_normal_s, bound_ratio_mk, bound_ratio_ml, bound_s, step_factor,
    BoundParams,
};
pub use checks::{
    check_bound_dominance, check_bound_dominance_against, check_condition_a, dist_to_f_decay_check,
    error_monotonicity_check, residual_decay_check, BoundDominanceReport, CheckReport, CheckStatus,
    ConditionAFunction, ConditionAReport, DominanceRow,
};
pub use compare::{berinde_compare, BerindeConfig, Classification, ComparisonReport};
pub use distance::distance_to_fixed_set;
