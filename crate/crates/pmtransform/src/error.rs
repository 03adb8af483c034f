//! Crate-wide error type.

use thiserror::Error;

/// Errors raised by grid construction, transform evaluation, the solver and
/// the estimators. `InvalidInput` and `Config` indicate bad parameters or
/// files (CLI exit code 2); the remaining variants are numerical failures
/// (exit code 1).
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("argument out of range: {name} = {value} not in [{min}, {max}]")]
    OutOfRange {
        name: &'static str,
        value: f64,
        min: f64,
        max: f64,
    },

    #[error("non-finite value produced: {0}")]
    NonFinite(String),

    #[error("empty region")]
    EmptyRegion,

    #[error("region too thin for stencils: {0}")]
    RegionTooThin(String),

    #[error("time step {dt} exceeds the stability bound {bound}")]
    CflViolation { dt: f64, bound: f64 },

    #[error("solver diverged at t = {t}: {reason}")]
    SolverDiverged { t: f64, reason: String },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    /// True for errors a user can fix by changing parameters or config files.
    pub fn is_usage(&self) -> bool {
        matches!(
            self,
            Error::InvalidInput(_) | Error::Config(_) | Error::OutOfRange { .. }
        )
    }
}
