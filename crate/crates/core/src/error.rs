use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("size limit exceeded: total dimension {requested} exceeds cap {cap}")]
    SizeLimit { requested: usize, cap: usize },

    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("numeric error: {0}")]
    Numeric(String),

    #[error("positivity error: eigenvalue {eigenvalue:e} below tolerance")]
    Positivity { eigenvalue: f64 },

    #[error("normalization error: trace deviates from 1 by {deviation:e}")]
    Normalization { deviation: f64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("not a channel: trace-preservation residual {residual}")]
    NotTracePreserving { residual: f64 },

    #[error("not completely positive: Choi eigenvalue {eigenvalue:e}")]
    NotCompletelyPositive { eigenvalue: f64 },

    #[error("purity violation: ensemble member {index} is mixed (largest eigenvalue {largest})")]
    Purity { index: usize, largest: f64 },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Whether this error describes invalid input (as opposed to a numerical failure).
    pub fn is_validation(&self) -> bool {
        !matches!(self, Error::Numeric(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
