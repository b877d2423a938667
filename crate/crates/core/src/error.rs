//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("mode index {0} out of range (supported: 0, 1, 2)")]
    ModeOutOfRange(usize),

    #[error("matrix is not symmetric: |lower - upper| = {max_asymmetry:.3e} at row {row}")]
    NonSymmetric { row: usize, max_asymmetry: f64 },

    #[error("spectral computation failed: {0}")]
    SpectralFailure(String),

    #[error("computed constant violates its sign contract: {0}")]
    SignViolation(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("solver failed: {0}")]
    SolverFailure(String),

    #[error("positivity violated: {0}")]
    PositivityViolation(String),

    #[error("no solution found: {0} (this is not a proof of nonexistence)")]
    NoSolutionFound(String),

    #[error("operator is degenerate: {0}")]
    Degenerate(String),

    #[error("construction state error: {0}")]
    State(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("geometry file error: {0}")]
    Geometry(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error("geometry parse error: {0}")]
    Json(#[from] serde_json::Error),
}
