//! Kernel solvers for the one-dimensional equation with time-dependent
//! diffusivity and for its planar counterpart.

pub mod diffusivity;
pub mod duhamel;
pub mod grid;
pub mod kernel;
pub mod residual;
pub mod source;

pub use diffusivity::{cumulative_diffusivity, DiffusivityProfile};
pub use duhamel::{
    duhamel_1d_point, duhamel_2d_slice, solve_heat_1d, solve_heat_2d_reference, WINDOW_SIGMAS,
};
pub use grid::{ScalarField, SpaceTimeGrid};
pub use kernel::gaussian_kernel;
pub use residual::{pde_residual, Equation};
pub use source::{Profile1d, SourceComponent, SourceTerm, Spatial};
