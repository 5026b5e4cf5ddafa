use thiserror::Error;

/// Errors produced by the simulator and the statistics toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("need at least {needed} samples, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("sample {index} is not strictly positive ({value})")]
    NonPositiveSample { index: usize, value: f64 },

    #[error("zero sample variance: R-accuracy is infinite")]
    ZeroVariance,

    #[error("tick times must be strictly increasing: {prev} then {next}")]
    NotIncreasing { prev: f64, next: f64 },

    #[error("enhancing clock must be in {expected} mode")]
    WrongMode { expected: &'static str },

    #[error("no admissible period: {0}")]
    PeriodSelection(String),

    #[error("node {node}: {reason}")]
    Node { node: usize, reason: String },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
