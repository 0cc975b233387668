//! Single-sensor oracles: value iteration on the charged subproblem,
//! closed-form threshold costs, and kernel-evaluated indices.

mod closed_form;
mod kernel;
mod mdp;

pub use closed_form::{expected_age_csi, expected_age_no_csi, numeric_whittle, threshold_avg_cost};
pub use kernel::{kernel_whittle, threshold_rates, KernelIndexTable, ThresholdRates};
pub use mdp::{
    indexability_scan, value_iterate, IdleSet, SingleArmMdp, ValueFunction, DEFAULT_DISCOUNT,
    DEFAULT_TOL, MAX_ITERATIONS,
};
