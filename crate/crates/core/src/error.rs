use num_complex::Complex64;
use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("point {z} lies outside the domain of {what}")]
    Domain { what: &'static str, z: Complex64 },

    #[error("degenerate coefficient: |mu| = {modulus} >= 1 at {z}")]
    Degeneracy { z: Complex64, modulus: f64 },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("quadrature produced a non-finite sample at radius {radius}, angle {angle}")]
    Quadrature { radius: f64, angle: f64 },

    #[error("validation failed: {0}")]
    Validation(String),

    #[error("solver failed: {reason} (residual {residual:e})")]
    Solver { reason: String, residual: f64 },

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("topology error: {0}")]
    Topology(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("composition error: {0}")]
    Composition(String),

    #[error("continuation error: {0}")]
    Continuation(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn arg(msg: impl Into<String>) -> Self {
        Error::Argument(msg.into())
    }

    pub(crate) fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }
}
