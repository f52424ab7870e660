use thiserror::Error;

/// Errors surfaced by the algebra, curvature and flow layers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("matrix is not positive definite ({0})")]
    NotPositiveDefinite(String),

    #[error("gauge transform is singular or nearly singular (|det| = {0:.3e})")]
    SingularGauge(f64),

    #[error("structure tensor fails the Jacobi identity: residual {residual:.3e} > {tol:.3e}")]
    NotALieBracket { residual: f64, tol: f64 },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("curvature cross-check failed: Gram-sum and adjoint-sum routes differ by {0:.3e} (relative); the metric is likely too ill-conditioned")]
    CurvatureCrossCheck(f64),

    #[error("integration aborted: {0}")]
    Integration(String),

    #[error("file format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
