use thiserror::Error;

/// Errors raised when an input violates an operation's precondition.
///
/// Data-dependent failures of an estimator (no outliers observed, tied order
/// statistics, ...) are not errors; they are reported through
/// [`crate::estimators::EstimateRecord`].
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter for {family}: {message}")]
    InvalidParameter {
        family: &'static str,
        message: String,
    },
    #[error("probability {0} is outside the open interval (0, 1)")]
    ProbabilityOutOfRange(f64),
    #[error("cannot parse distribution spec at `{token}`: {message}")]
    Parse { token: String, message: String },
    #[error("sample is empty")]
    EmptySample,
    #[error("sample contains a non-finite value at position {0}")]
    NonFinite(usize),
    #[error("sample too small for quartile fences: need at least 3 observations, got {0}")]
    SampleTooSmall(usize),
    #[error("order-statistic count k = {k} is out of range for n = {n}: {message}")]
    InvalidK {
        k: usize,
        n: usize,
        message: &'static str,
    },
    #[error("invalid fence multipliers: {0}")]
    InvalidFences(String),
    #[error("invalid study configuration: {0}")]
    InvalidConfig(String),
}

pub type Result<T> = std::result::Result<T, Error>;
