use thiserror::Error;

/// Errors raised by the simulation and estimation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The requested pair of levels is not connected by an electric-dipole transition.
    #[error("dipole selection rule violated: {0}")]
    SelectionRule(String),

    /// An iterative sum or solve did not settle within its budget.
    #[error("convergence failure: {0}")]
    Convergence(String),

    /// The ODE integrator could not advance.
    #[error("integration failure at t = {t:.6e} s: {reason}")]
    Integration { t: f64, reason: String },

    /// A data table or data file could not be parsed.
    #[error("data error (line {line}): {reason}")]
    Data { line: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
