//! Ranking of text features that separate documents after a date from
//! documents before it.

mod entropy;
mod rank;
mod split;
mod tokenize;

pub use entropy::{binary_entropy, expected_entropy_loss, PHI};
pub use rank::{DEFAULT_MIN_POS_FRACTION, DEFAULT_TOP_K, count_features, filter_features, rank_features, FeatureCounts, FeatureStat, RankConfig, Stoplist};
pub use split::{split_corpus, SplitSpec, DEFAULT_POSITIVE_WINDOW_DAYS};
pub use tokenize::{extract_features, tokens, MAX_NGRAM};
