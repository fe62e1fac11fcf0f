use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error(
        "quadrature did not converge: partial value {partial:e}, achieved tolerance {achieved:e}"
    )]
    QuadratureNonConvergence { partial: f64, achieved: f64 },

    #[error("insufficient precision: {0}")]
    Precision(String),

    #[error("Newton continuation diverged at path position {path_position} (last iterate {last})")]
    NewtonDivergence { last: Complex64, path_position: f64 },

    #[error("integral possibly infinite (dyadic growth exponent {exponent:.4})")]
    PossiblyInfinite { exponent: f64 },

    #[error("iteration did not converge: last iterates {last} and {previous}")]
    NonConvergence {
        last: Complex64,
        previous: Complex64,
    },

    #[error("eigensolver failed: {0}")]
    Eigen(String),

    #[error("precondition refused: {0}")]
    Refused(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
