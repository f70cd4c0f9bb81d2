use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("expression error: {0}")]
    Expression(String),

    /// Quadrature did not reach the requested tolerance within its panel budget.
    #[error("quadrature did not converge: best estimate {best_estimate:e}, error estimate {error_estimate:e}")]
    Convergence {
        best_estimate: f64,
        error_estimate: f64,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
