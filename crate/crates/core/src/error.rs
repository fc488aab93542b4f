use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("query at {value} outside the domain [{lo}, {hi}]")]
    OutOfDomain { value: f64, lo: f64, hi: f64 },

    #[error("domain overflow: {0}")]
    DomainOverflow(String),

    #[error("control field {omega:e} below the floor {floor:e}")]
    DegenerateControl { omega: f64, floor: f64 },

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("grid mismatch: expected {expected} points, found {found}")]
    GridMismatch { expected: usize, found: usize },

    #[error("insufficient data: {0}")]
    InsufficientData(String),

    #[error("residual undefined: {0}")]
    UndefinedResidual(String),

    #[error("Hilbert space of dimension {dim} exceeds the supported bounds ({reason})")]
    DimensionOverflow { dim: usize, reason: String },

    #[error("numerical instability at step {step}: {detail}")]
    Instability { step: usize, detail: String },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter { name, reason: reason.into() }
    }
}
