use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("quadrature did not converge after {evaluations} evaluations (error estimate {error_estimate:e})")]
    NonConvergence { evaluations: usize, error_estimate: f64 },

    #[error("divergent integral: {0}")]
    DivergentIntegral(String),

    /// Sampler parameters for which no envelope is configured.
    #[error("unsupported parameters: {0}")]
    UnsupportedParameter(String),

    #[error("inconsistent coefficients: {0}")]
    Inconsistency(String),

    #[error("invalid seed coefficients: {0}")]
    InvalidSeed(String),

    /// The coefficient signs exclude every smooth LWMY branch.
    #[error("classification rejected: {0}")]
    Rejected(String),

    #[error("step-size failure: {0}")]
    StepSize(String),

    #[error("division by zero: {0}")]
    Division(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
