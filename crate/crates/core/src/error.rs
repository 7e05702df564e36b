use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid model: {0}")]
    InvalidModel(String),

    #[error("frequency {0} outside (0, pi]")]
    FrequencyDomain(f64),

    #[error("invalid epoch layout: {0}")]
    InvalidLayout(String),

    #[error("epoch {epoch} needs samples up to {needed} but the series has {len}")]
    EpochOutOfRange {
        epoch: usize,
        needed: usize,
        len: usize,
    },

    #[error("invalid bandwidth: {0}")]
    InvalidBandwidth(String),

    #[error("periodogram ordinate {k} is not strictly positive ({value})")]
    NonPositiveOrdinate { k: usize, value: f64 },

    #[error("non-positive innovation variance {value} at step {step}")]
    NotPositiveDefinite { step: usize, value: f64 },

    #[error(
        "quadrature did not converge: estimated error {estimate:e} exceeds tolerance {tolerance:e}"
    )]
    QuadratureNonConvergence { estimate: f64, tolerance: f64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
