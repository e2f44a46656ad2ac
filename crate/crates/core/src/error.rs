//! Crate-wide error type.

use thiserror::Error;

/// Errors produced by the numerical kernel, the geometry layer, data
/// loading and training.
#[derive(Debug, Error)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("matrix is not symmetric (max asymmetry {max_asym:.3e}, tolerance {tol:.3e})")]
    NotSymmetric { max_asym: f64, tol: f64 },

    #[error("matrix is not Hermitian (max deviation {max_dev:.3e}, tolerance {tol:.3e})")]
    NotHermitian { max_dev: f64, tol: f64 },

    #[error("matrix is not positive definite (smallest eigenvalue {min_eig:.3e})")]
    NotPositiveDefinite { min_eig: f64 },

    #[error("singular matrix (norm {norm:.3e})")]
    Singular { norm: f64 },

    #[error("eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:.3e})")]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("simultaneous diagonalization failed (residual {residual:.3e}, tolerance {tol:.3e})")]
    SimultaneousDiagonalization { residual: f64, tol: f64 },

    #[error("point violates the {space} invariant: {detail}")]
    InvariantViolation { space: String, detail: String },

    #[error("space mismatch: expected {expected}, got {got}")]
    SpaceMismatch { expected: String, got: String },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("data error: {0}")]
    Data(String),

    #[error("non-finite gradient for node {node}")]
    NonFiniteGradient { node: usize },

    #[error("training diverged at epoch {epoch}: {detail}")]
    Diverged { epoch: usize, detail: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
