//! Statistical checks of efficient pricing on an ensemble.
//!
//! Each check compares an empirical quantity with what accurate prices
//! imply, using standard-error bands:
//!
//! * `martingale`: the mean next price equals the conditioning price.
//! * `e_epsilon_law`: within a prior-price stratum, a log-likelihood move of
//!   `epsilon` is `e^epsilon` times as frequent among eventual winners as
//!   among eventual losers; `ln ratio` regressed on `epsilon` has slope 1
//!   and intercept 0.
//! * `ll_ratio`: relative to all candidates, winners make the move
//!   `(e^a + 1) / (e^a + e^-epsilon)` times as often.
//! * `variance_drift`: among winners, the mean next price exceeds the
//!   conditioning price `a` by `Var(next) / a`.
//! * `winner_drift_positive`: that excess is positive.

use serde::Serialize;

use super::bins::linear_edges;
use super::conditional::{conditional_ll_ratio, conditional_stats_from, CellFlag};
use super::epsilon::{epsilon_samples, price_transitions, GapPolicy};
use super::fit::fit_line;
use super::ratio::stratified_winner_loser_ratio;
use crate::error::{Error, Result};
use crate::model::Market;

/// One-sided 95% normal quantile.
pub const Z_95_ONE_SIDED: f64 = 1.644_853_626_951_472_2;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationConfig {
    /// Equal-width price bins on [0, 1].
    pub price_bins: usize,
    /// Minimum samples for a bin or cell to be tested.
    pub min_count: usize,
    /// Bins of the prior log-likelihood price.
    pub ll_edges: Vec<f64>,
    /// Bins of the log-likelihood change.
    pub eps_edges: Vec<f64>,
    /// Width of the two-sided bands, in standard errors.
    pub sigmas: f64,
    pub slope_tolerance: f64,
    pub intercept_tolerance: f64,
    /// Fraction of `ll_ratio` cells that must fall inside their band.
    pub min_cell_pass_fraction: f64,
}

impl Default for ValidationConfig {
    fn default() -> Self {
        ValidationConfig {
            price_bins: 20,
            min_count: 100,
            ll_edges: linear_edges(-4.0, 4.0, 32).expect("valid edges"),
            eps_edges: linear_edges(-3.0, 3.0, 60).expect("valid edges"),
            sigmas: 3.0,
            slope_tolerance: 0.1,
            intercept_tolerance: 0.1,
            min_cell_pass_fraction: 0.95,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: &'static str,
    pub cells_tested: usize,
    pub cells_passed: usize,
    /// The check's headline statistic (see `detail`).
    pub statistic: f64,
    /// The bound the statistic is compared with.
    pub bound: f64,
    pub passed: bool,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidationReport {
    pub checks: Vec<CheckResult>,
}

impl ValidationReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn check(&self, name: &str) -> Option<&CheckResult> {
        self.checks.iter().find(|c| c.name == name)
    }
}

pub fn run_validation(markets: &[Market], config: &ValidationConfig) -> Result<ValidationReport> {
    if config.price_bins == 0 {
        return Err(Error::InvalidConfig("price_bins must be positive".into()));
    }
    let price_edges = linear_edges(0.0, 1.0, config.price_bins)?;
    let transitions = price_transitions(markets, GapPolicy::Exclude);
    let stats = conditional_stats_from(&transitions, &price_edges)?;
    let samples = epsilon_samples(markets);
    let k = config.sigmas;
    let min = config.min_count;

    let mut checks = Vec::with_capacity(5);

    // martingale
    {
        let tested: Vec<_> = stats.iter().filter(|s| s.count >= min).collect();
        let mut worst = 0.0f64;
        let mut passed = 0;
        for s in &tested {
            let se = (s.var_next / s.count as f64).sqrt();
            let dev = (s.mean_next - s.a).abs();
            let z = if se > 0.0 { dev / se } else if dev == 0.0 { 0.0 } else { f64::INFINITY };
            worst = worst.max(z);
            if dev <= k * se {
                passed += 1;
            }
        }
        checks.push(CheckResult {
            name: "martingale",
            cells_tested: tested.len(),
            cells_passed: passed,
            statistic: worst,
            bound: k,
            passed: !tested.is_empty() && passed == tested.len(),
            detail: format!("max |mean_next - a| / sqrt(var_next / count) over bins with count >= {min}"),
        });
    }

    // e^epsilon law
    {
        let cells = stratified_winner_loser_ratio(&samples, &config.ll_edges, &config.eps_edges);
        let (xs, ys): (Vec<f64>, Vec<f64>) = match &cells {
            Ok(cells) => cells
                .iter()
                .filter(|c| c.count_won >= min && c.count_lost >= min)
                .filter_map(|c| c.ratio.map(|r| (c.eps_center, r.ln())))
                .unzip(),
            Err(_) => (Vec::new(), Vec::new()),
        };
        let fit = fit_line(&xs, &ys).ok();
        let (passed, statistic, detail) = match fit {
            Some(f) => {
                let ok = (f.slope - 1.0).abs() <= config.slope_tolerance
                    && f.intercept.abs() <= config.intercept_tolerance;
                (
                    ok,
                    f.slope,
                    format!(
                        "ln(ratio) ~ epsilon: slope {:.4} (1 +/- {}), intercept {:.4} (0 +/- {}), r2 {:.4}",
                        f.slope, config.slope_tolerance, f.intercept, config.intercept_tolerance, f.r_squared
                    ),
                )
            }
            None => (false, f64::NAN, "not enough populated cells for a regression".to_string()),
        };
        checks.push(CheckResult {
            name: "e_epsilon_law",
            cells_tested: xs.len(),
            cells_passed: if passed { xs.len() } else { 0 },
            statistic,
            bound: 1.0,
            passed,
            detail,
        });
    }

    // (e^a + 1) / (e^a + e^-epsilon)
    {
        let cells = conditional_ll_ratio(&samples, &config.ll_edges, &config.eps_edges, min)?;
        let reported: Vec<_> = cells.iter().filter(|c| c.flag == CellFlag::Reported).collect();
        let inside = reported
            .iter()
            .filter(|c| {
                let (r, se) = (c.ratio.expect("reported"), c.std_error.expect("reported"));
                (r - c.theory).abs() <= k * se
            })
            .count();
        let fraction = if reported.is_empty() {
            0.0
        } else {
            inside as f64 / reported.len() as f64
        };
        checks.push(CheckResult {
            name: "ll_ratio",
            cells_tested: reported.len(),
            cells_passed: inside,
            statistic: fraction,
            bound: config.min_cell_pass_fraction,
            passed: !reported.is_empty() && fraction >= config.min_cell_pass_fraction,
            detail: format!(
                "fraction of (a, epsilon) cells within {k} standard errors; {} cells flagged as too sparse",
                cells.len() - reported.len()
            ),
        });
    }

    // variance drift and its sign
    {
        let tested: Vec<_> = stats
            .iter()
            .filter(|s| s.count_won >= min && s.var_next > 0.0 && s.a > 0.0 && s.drift_std_error.is_finite())
            .collect();
        let (mut drift_ok, mut sign_ok) = (0, 0);
        let (mut worst_drift, mut min_z) = (0.0f64, f64::INFINITY);
        for s in &tested {
            let excess = s.mean_next_given_won - s.a;
            let predicted = s.var_next / s.a;
            let se = s.drift_std_error;
            let z = if se > 0.0 { (excess - predicted).abs() / se } else { f64::INFINITY };
            worst_drift = worst_drift.max(z);
            if (excess - predicted).abs() <= k * se {
                drift_ok += 1;
            }
            let se_won = s.winner_excess_std_error;
            let z_sign = if se_won > 0.0 {
                excess / se_won
            } else if excess > 0.0 {
                f64::INFINITY
            } else {
                f64::NEG_INFINITY
            };
            min_z = min_z.min(z_sign);
            if z_sign > Z_95_ONE_SIDED {
                sign_ok += 1;
            }
        }
        checks.push(CheckResult {
            name: "variance_drift",
            cells_tested: tested.len(),
            cells_passed: drift_ok,
            statistic: worst_drift,
            bound: k,
            passed: !tested.is_empty() && drift_ok == tested.len(),
            detail: format!(
                "max |(mean_next_given_won - a) - var_next / a| in series-clustered standard errors over bins with count_won >= {min}"
            ),
        });
        checks.push(CheckResult {
            name: "winner_drift_positive",
            cells_tested: tested.len(),
            cells_passed: sign_ok,
            statistic: min_z,
            bound: Z_95_ONE_SIDED,
            passed: !tested.is_empty() && sign_ok == tested.len(),
            detail: "min z of mean_next_given_won - a, series-clustered (one-sided 95%)".to_string(),
        });
    }

    Ok(ValidationReport { checks })
}
