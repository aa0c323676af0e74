//! Lifting the 1D equation to the plane with a Poisson-driven shift in `y`.

pub mod config;
pub(crate) mod evaluator;
pub mod expectation;
pub mod lattice;
pub mod limit;
pub mod moments;
pub mod randomized;
pub mod signed;

pub use config::{Coupling, LiftConfig};
pub use expectation::{
    dyadic_study, lift_expectation_v, lift_expectation_w, verify_jump_identity, DyadicReport,
    JumpIdentityReport, MonteCarloField,
};
pub use lattice::{solve_lattice_v, solve_lattice_w};
pub use limit::{dimension_lift_limit, log_log_slope, ConvergenceRow, LiftLimitReport};
pub use randomized::{
    dyadic_jump_integral, jump_integral, jump_integral_until, solve_randomized_1d,
    RandomizedSolution,
};
pub use signed::SignedPath;
