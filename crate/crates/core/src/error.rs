//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by model construction, validation, solvers, and estimators.
#[derive(Debug, Clone, Error)]
pub enum Error {
    /// A parameter is outside its admissible range.
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    /// A standing assumption of the model fails for the given parameters.
    #[error("assumption violated: {name} requires {requirement}, got {value}")]
    AssumptionViolated {
        name: &'static str,
        requirement: String,
        value: f64,
    },

    /// Function argument outside the domain (e.g. at or past a pole).
    #[error("domain error in {what}: {reason}")]
    Domain { what: &'static str, reason: String },

    /// Root solver could not bracket or converge.
    #[error("root solve failed: {0}")]
    RootSolve(String),

    /// Simulation grid is inconsistent (horizon, dt, truncation bound).
    #[error("invalid grid: {0}")]
    Grid(String),

    /// A series that must be nondecreasing is not.
    #[error("control series is not nondecreasing at index {index}")]
    NonMonotoneControl { index: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
