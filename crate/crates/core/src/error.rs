use std::path::PathBuf;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("root solve did not converge within {iters} iterations (residual {residual:e})")]
    NoConvergence { iters: usize, residual: f64 },

    #[error("operator is not strongly monotone on the sampled region (mu_hat = {0})")]
    NotStronglyMonotone(f64),

    #[error("non-positive SINR denominator for player {player}, channel {channel}")]
    NegativeSinr { player: usize, channel: usize },

    #[error("circulant embedding produced a negative eigenvalue {0:e}")]
    NegativeEigenvalue(f64),

    #[error(
        "long-range dependent noise needs {needed} pre-generated samples, above the budget of {budget}; lower the horizon or dimension"
    )]
    MemoryBudget { needed: usize, budget: usize },

    #[error("theorem constants are outside their validity region: {0}")]
    InvalidConstants(String),

    #[error("{flagged} of {runs} runs produced non-finite iterates (limit is 1%)")]
    TooManyFlagged { flagged: usize, runs: usize },

    #[error("rate fit: {0}")]
    RateFit(String),

    #[error("{path}: {msg}")]
    Config { path: String, msg: String },

    #[error("{}: {source}", path.display())]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn config(path: impl Into<String>, msg: impl Into<String>) -> Self {
        Error::Config {
            path: path.into(),
            msg: msg.into(),
        }
    }
}

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
