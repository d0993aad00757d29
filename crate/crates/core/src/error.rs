//! Error types shared by every module of the crate.

use std::fmt;

/// Result alias used throughout the crate.
pub type Result<T> = std::result::Result<T, Error>;

/// Why a closed-form fit could not produce a valid `(mu, sigma)` pair.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EstimationFailure {
    /// `delta * h1 + 1` vanished, so the weighted ratios are undefined.
    SingularWeight { value: f64 },
    /// `C^2 + 4 h4 D < 0` in the sigma quadratic.
    NegativeDiscriminant { value: f64 },
    /// The positive root of the sigma quadratic was not strictly positive.
    NonPositiveSigma { value: f64 },
    /// `sigma * h2 - h3` was not strictly positive.
    NonPositiveMuDenominator { value: f64 },
    /// `h4` was not strictly positive.
    NonPositiveH4 { value: f64 },
    /// An intermediate quantity was NaN or infinite.
    NonFinite { what: &'static str },
}

impl fmt::Display for EstimationFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Self::SingularWeight { value } => {
                write!(f, "delta*h1 + 1 = {value:e} is zero")
            }
            Self::NegativeDiscriminant { value } => {
                write!(f, "sigma quadratic has negative discriminant {value:e}")
            }
            Self::NonPositiveSigma { value } => {
                write!(f, "sigma root {value:e} is not positive")
            }
            Self::NonPositiveMuDenominator { value } => {
                write!(f, "mu denominator sigma*h2 - h3 = {value:e} is not positive")
            }
            Self::NonPositiveH4 { value } => write!(f, "h4 mean {value:e} is not positive"),
            Self::NonFinite { what } => write!(f, "{what} is not finite"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("moment undefined: {0}")]
    MomentUndefined(String),

    #[error("sample is empty or too small (n = {n}, need at least {required})")]
    EmptySample { n: usize, required: usize },

    #[error("data value {value} at index {index} is not strictly positive and finite")]
    NonPositiveData { index: usize, value: f64 },

    #[error("estimation failed: {0}")]
    EstimationFailed(EstimationFailure),

    #[error("bootstrap degenerate: {succeeded} of {total} replicates succeeded, need {required}")]
    BootstrapDegenerate {
        succeeded: usize,
        total: usize,
        required: usize,
    },

    #[error("optimization failed after {iterations} iterations (last iterate mu = {mu}, sigma = {sigma})")]
    OptimizationFailed { iterations: usize, mu: f64, sigma: f64 },

    #[error("unknown model '{0}'")]
    UnknownModel(String),

    #[error("model mismatch: {0}")]
    ModelMismatch(String),

    #[error("configuration error: {0}")]
    Config(String),
}

impl From<EstimationFailure> for Error {
    fn from(f: EstimationFailure) -> Self {
        Error::EstimationFailed(f)
    }
}
