use thiserror::Error;

/// Errors from instance evaluation, planning and verification oracles.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParam(String),

    #[error("analytic derivative of order {0} not provided; use finite differences")]
    UnsupportedOrder(u32),

    #[error("empty sampling grid")]
    EmptyGrid,

    #[error("infeasible plan: {0}")]
    Infeasible(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParam(msg.into())
    }

    pub fn infeasible(msg: impl Into<String>) -> Self {
        Error::Infeasible(msg.into())
    }
}
