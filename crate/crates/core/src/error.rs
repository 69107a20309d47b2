use thiserror::Error;

/// Errors raised across the simulation pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular input: {0}")]
    Singular(String),

    #[error("degenerate input: {0}")]
    Degenerate(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: String, reason: String },

    #[error("integration failure at t = {t:.6} ps: {reason}")]
    Integration { t: f64, reason: String },

    #[error("positivity failure at t = {t:.6} ps: minimum eigenvalue {min_eigenvalue:e}")]
    Positivity { t: f64, min_eigenvalue: f64 },

    #[error("correlation propagation failed at (t = {t:.6} ps, tau = {tau:.6} ps): {reason}")]
    Propagation { t: f64, tau: f64, reason: String },

    #[error("data corruption: {0}")]
    DataCorruption(String),

    #[error("config error at line {line}: {reason}")]
    Config { line: usize, reason: String },

    #[error("scenario `{scenario}`: {source}")]
    Scenario {
        scenario: String,
        #[source]
        source: Box<Error>,
    },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn invalid(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    /// True for failures of the numerical integration (as opposed to bad input).
    pub fn is_integration_failure(&self) -> bool {
        match self {
            Error::Integration { .. } | Error::Positivity { .. } | Error::Propagation { .. } => true,
            Error::Scenario { source, .. } => source.is_integration_failure(),
            _ => false,
        }
    }

    pub(crate) fn in_scenario(self, scenario: &str) -> Self {
        Error::Scenario {
            scenario: scenario.to_string(),
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
