//! Statistics over aligned markets: log-score curves, distributions of
//! daily log-likelihood changes, winner/loser ratios, conditional price
//! moments, power-law tail fits, and the checks that efficient pricing
//! implies for simulated ensembles.

mod bins;
mod conditional;
mod density;
mod epsilon;
mod fit;
mod ratio;
mod score;
pub mod validate;

pub use bins::{bin_index, linear_edges, signed_log_edges};
pub use conditional::{conditional_ll_ratio, conditional_stats, conditional_stats_from, ConditionalStats, LlRatioCell, CellFlag};
pub use density::{empirical_density, DensityEstimate, DensityPoint, DEFAULT_WINDOW};
pub use epsilon::{epsilon_samples, epsilon_samples_with, series_epsilons, price_transitions, EpsilonSample, GapPolicy, Transition};
pub use fit::{fit_line, fit_power_law_tail, LineFit, PowerLawFit};
pub use ratio::{stratified_winner_loser_ratio, winner_loser_ratio, RatioBin, StratifiedRatioCell};
pub use score::{average_log_score_curve, CurvePoint, LogScoreCurve};
pub use validate::{run_validation, CheckResult, ValidationConfig, ValidationReport};
