use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A specification failed validation at construction time.
    #[error("invalid specification: {0}")]
    InvalidSpec(String),

    /// An enumeration oracle would exceed its documented size guard.
    #[error("capacity exceeded: {what} requires {required}, limit is {limit}")]
    Capacity {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    /// Cholesky factorization of a covariance window failed even after jitter.
    #[error("covariance matrix over lags 0..{window} is not positive definite (jitter {jitter:e})")]
    Factorization { window: usize, jitter: f64 },

    /// A policy or run was configured inconsistently (e.g. horizon shorter than a cycle).
    #[error("configuration error: {0}")]
    Config(String),

    /// A closed-form bound does not apply for the given inputs.
    #[error("bound `{bound}` is not applicable: {reason}")]
    BoundInapplicable { bound: &'static str, reason: String },

    /// Traces or matrices handed to an estimator did not line up.
    #[error("shape mismatch: {0}")]
    Shape(String),

    /// An error raised inside one Monte Carlo run.
    #[error("run {run}: {source}")]
    Run {
        run: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("scenario `{path}`: {message}")]
    Scenario { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn spec(msg: impl Into<String>) -> Self {
        Error::InvalidSpec(msg.into())
    }

    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    pub(crate) fn in_run(self, run: usize) -> Self {
        Error::Run {
            run,
            source: Box::new(self),
        }
    }
}
