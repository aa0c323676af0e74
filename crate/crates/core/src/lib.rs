//! Heat equation with time-dependent diffusivity, lifted one dimension up
//! by a Poisson-driven random shift.
//!
//! * [`heat_core`]: kernel solvers for the 1D and planar equations.
//! * [`poisson`]: rate profiles, exact increment laws, samplers.
//! * [`lifting`]: randomized solves, jump integrals, lattice equations and
//!   the vanishing-step limit.
//! * [`norms`]: discrete norms, seminorms and estimate reports.
//! * [`cli`]: JSON-configured experiment runner.

pub mod cli;
pub mod error;
pub mod heat_core;
pub mod law;
pub mod lifting;
pub mod norms;
pub mod poisson;
pub mod quadrature;

pub use error::{Error, Result};
pub use law::TimeLaw;
