use thiserror::Error;

/// Errors raised by node generation, weight computation and time stepping.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("stencil at node {node} failed: {reason}")]
    StencilFailure { node: usize, reason: String },

    #[error("zero pivot in incomplete factorization at row {row}")]
    SingularPivot { row: usize },

    #[error("matrix is singular")]
    Singular,

    #[error("GMRES did not converge in {iterations} iterations (relative residual {residual:e})")]
    NoConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("point ({x}, {y}) lies outside the interpolation patch")]
    OutsidePatch { x: f64, y: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
