//! Shared fixtures for the criterion benches.

use fpiter::{builtin, ProblemSpec, Schedule, StopRule};

/// Problems benchmarked: a scalar contraction, a 3-d affine contraction and
/// a planar rotation.
pub const PROBLEMS: [&str; 3] = ["scale_0_9", "affine_3d", "rotation_1"];

pub fn problem(name: &str) -> ProblemSpec {
    builtin(name).unwrap_or_else(|| panic!("unknown builtin {name}"))
}

pub fn schedule() -> Schedule {
    Schedule::constant(0.5).expect("0.5 is a valid constant schedule")
}

pub fn stop() -> StopRule {
    StopRule::new(1e-12, 2000).expect("valid stop rule")
}
