//! Information incorporation in betting markets.
//!
//! Prices of contracts that pay 1 if an event happens are treated as
//! probabilities. The crate scores price series with the logarithmic rule,
//! simulates a coin-flip model of information release, checks the
//! statistical consequences of efficient pricing on ensembles, flags days
//! with unusually large log-likelihood moves, and ranks text features by
//! expected entropy loss to explain them.

pub mod analytics;
pub mod cli;
pub mod detect;
pub mod error;
pub mod explain;
pub mod ingest;
pub mod manifest;
pub mod model;
pub mod sim;
pub mod synth;

pub use error::{Error, Result};
pub use model::{
    from_log_likelihood, log_score, normalize_prices, to_likelihood, to_log_likelihood,
    CandidateSeries, LogLikelihoodPrice, Market, Outcome, PricePoint, Probability,
};
