use std::path::PathBuf;

/// Everything that can go wrong in the library.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("guard violated: {what} = {value} (limit {limit})")]
    Guard {
        what: &'static str,
        value: f64,
        limit: f64,
    },

    #[error("coefficient field is not elliptic: {0}")]
    NotElliptic(String),

    #[error("winding matrix is resonant: M^t z = 0 for z = {z:?}")]
    Resonant { z: Vec<i64> },

    #[error("winding matrix violates the Diophantine condition: e_i . M^t z = 0 for z = {z:?}")]
    NotDiophantine { z: Vec<i64> },

    #[error(
        "solver did not converge after {iterations} iterations (relative residual {residual:.3e})"
    )]
    NonConvergence {
        iterations: usize,
        residual: f64,
        history: Vec<f64>,
    },

    #[error("empty report")]
    EmptyReport,

    #[error("cannot read {path}: {source}")]
    Read {
        path: PathBuf,
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidInput(msg.into())
}
