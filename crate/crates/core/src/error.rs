use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("probability {0} is outside [0, 1]")]
    InvalidProbability(f64),

    #[error("log-likelihood price {0} is not finite")]
    NonFiniteLogLikelihood(f64),

    #[error("all prices are zero (or the list is empty)")]
    AllZero,

    #[error("winner index {index} out of range for {len} probabilities")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("parse error at line {line}: {message}")]
    Parse { line: u64, message: String },

    #[error("schema error: {0}")]
    Schema(String),

    #[error("duplicate document id {id:?} at line {line}")]
    DuplicateId { id: String, line: u64 },

    #[error("market {0:?} has no price points")]
    EmptyMarket(String),

    #[error("market {0:?} has no winning candidate")]
    NoWinner(String),

    #[error("invalid coin-flip state: n={n}, i={i}, k={k} (need 0 <= i <= k <= n)")]
    InvalidState { n: u64, i: u64, k: u64 },

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("too few samples: need at least {needed}, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("no samples for outcome class {0}")]
    NoSamples(&'static str),

    #[error("too few points for a fit: need at least {needed}, got {got}")]
    TooFewPoints { needed: usize, got: usize },

    #[error("series too short: need at least {needed} points, got {got}")]
    TooShort { needed: usize, got: usize },

    #[error("{0} side of the corpus split is empty")]
    EmptySide(&'static str),

    #[error("no features survive filtering")]
    NoFeatures,

    #[error("invalid counts: pos_df={pos_df}, neg_df={neg_df}, pos_total={pos_total}, neg_total={neg_total}")]
    InvalidCounts {
        pos_df: u64,
        neg_df: u64,
        pos_total: u64,
        neg_total: u64,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}
