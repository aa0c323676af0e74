use thiserror::Error;

/// Errors raised by the solvers, samplers and estimators in this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A grid, profile or experiment is configured inconsistently.
    #[error("configuration error in `{field}`: {reason}")]
    Config { field: String, reason: String },

    /// Array shapes do not match the grid they claim to live on.
    #[error("shape error: {0}")]
    Shape(String),

    /// The y-lattice is too narrow for the forcing and jump spread.
    #[error("boundary contamination: {0}")]
    BoundaryContamination(String),

    /// A norm ratio is undefined because the right-hand side vanishes.
    #[error("undefined ratio for {estimate}: left side {lhs:e} over zero right side")]
    UndefinedRatio { estimate: String, lhs: f64 },
}

impl Error {
    pub fn config(field: impl Into<String>, reason: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            reason: reason.into(),
        }
    }

    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
