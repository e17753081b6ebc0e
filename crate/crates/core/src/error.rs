use thiserror::Error;

/// Errors raised by the inference engine and the experiment harness.
#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// The error budget violates `0 < nu < alpha < 1`.
    #[error("invalid budget: alpha = {alpha}, nu = {nu} (need 0 < nu < alpha < 1)")]
    Budget { alpha: f64, nu: f64 },

    /// A covariance matrix could not be factorized even after jitter.
    #[error("covariance error: {0}")]
    Covariance(String),

    /// A design submatrix is rank deficient.
    #[error("degenerate design: {0}")]
    Degenerate(String),

    /// An iterative solver failed to converge or certify its output.
    #[error("solver error: {0}")]
    Solver(String),

    /// Invalid or inconsistent experiment configuration.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Config(_) | Error::Domain(_) | Error::Budget { .. } | Error::Io(_) | Error::Csv(_) => 2,
            Error::Covariance(_) | Error::Degenerate(_) | Error::Solver(_) => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
