use thiserror::Error;

/// Errors raised by the numerical and algebraic routines of the lab.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum LabError {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("dimension {0} outside the supported range")]
    UnsupportedDimension(usize),

    #[error("Jacobi eigensolver did not converge after {sweeps} sweeps (off-diagonal norm {off_norm:e})")]
    NotConverged { sweeps: usize, off_norm: f64 },

    #[error("Hurwitz obstruction: nu = {nu} exceeds the Radon-Hurwitz bound {bound} for n = {n}")]
    HurwitzObstruction { n: usize, nu: usize, bound: usize },

    #[error("dimension {n} is not a multiple of the irreducible Cl({nu}) module dimension {module_dim}")]
    NotAModuleDimension { n: usize, nu: usize, module_dim: usize },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("extension failed: {0}")]
    ExtensionFailed(String),

    #[error("verification failed: {0}")]
    VerificationFailed(String),

    #[error("point {0:?} is outside the chart domain (or too close to its boundary)")]
    OutsideDomain(Vec<f64>),

    #[error("metric is not positive definite at {0:?}")]
    SingularMetric(Vec<f64>),
}

pub type Result<T> = std::result::Result<T, LabError>;
