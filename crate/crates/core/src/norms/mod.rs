//! Grid norms and seminorms, directional derivatives, the rotation map and
//! reports of measured estimate ratios.

mod basic;
mod derivative;
mod direction;
mod holder;
mod report;

pub use basic::{cell_volume, lp_norm, sup_norm};
pub use derivative::{
    directional_second_derivative, hessian, line_holder_seminorm, second_derivative_x, Hessian,
};
pub use direction::{rotation_map, Direction, RotationMap};
pub use holder::{
    holder_scan, holder_seminorm, holder_seminorm_samples, sup_time_holder, HolderScan,
    MAX_EXHAUSTIVE_PAIRS,
};
pub use report::{
    directional_holder_report, directional_sides, estimate_report, refinement_drift,
    rotation_check, sample_source, DirectionalReport, EstimateId, EstimateReport, RotationCheck,
    BOUND_REL_TOL, LINE_OFFSETS, SUP_ABS_TOL,
};
