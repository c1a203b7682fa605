//! Domain types and price/score transforms.
//!
//! A price `p` of a contract paying 1 if an event happens is read as the
//! market's probability of that event. The likelihood price is `p / (1 - p)`
//! and the log-likelihood price is its natural log. Both are singular at the
//! ends of `[0, 1]`, so prices are clamped to `[delta, 1 - delta]` first.

use std::fmt;

use chrono::NaiveDate;
use serde::Serialize;

use crate::error::{Error, Result};

/// Default clamp applied before likelihood transforms.
pub const DEFAULT_CLAMP: f64 = 1e-6;

/// A price read as a probability, in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct Probability(f64);

impl Probability {
    pub const ZERO: Probability = Probability(0.0);
    pub const HALF: Probability = Probability(0.5);
    pub const ONE: Probability = Probability(1.0);

    pub fn new(value: f64) -> Result<Self> {
        if (0.0..=1.0).contains(&value) {
            Ok(Probability(value))
        } else {
            Err(Error::InvalidProbability(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }

    #[inline]
    pub fn complement(self) -> Probability {
        Probability(1.0 - self.0)
    }

    /// The value pulled into `[delta, 1 - delta]`.
    #[inline]
    pub fn clamped(self, delta: f64) -> f64 {
        self.0.clamp(delta, 1.0 - delta)
    }
}

impl fmt::Display for Probability {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

impl TryFrom<f64> for Probability {
    type Error = Error;

    fn try_from(value: f64) -> Result<Self> {
        Probability::new(value)
    }
}

/// Natural log of a likelihood price. Always finite.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd, Serialize)]
pub struct LogLikelihoodPrice(f64);

impl LogLikelihoodPrice {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() {
            Ok(LogLikelihoodPrice(value))
        } else {
            Err(Error::NonFiniteLogLikelihood(value))
        }
    }

    #[inline]
    pub fn value(self) -> f64 {
        self.0
    }
}

impl fmt::Display for LogLikelihoodPrice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.0.fmt(f)
    }
}

/// Likelihood price `p / (1 - p)` with the default clamp.
pub fn to_likelihood(p: Probability) -> f64 {
    to_likelihood_with(p, DEFAULT_CLAMP)
}

pub fn to_likelihood_with(p: Probability, delta: f64) -> f64 {
    let p = p.clamped(delta);
    p / (1.0 - p)
}

/// Log-likelihood price `ln(p / (1 - p))` with the default clamp.
pub fn to_log_likelihood(p: Probability) -> LogLikelihoodPrice {
    to_log_likelihood_with(p, DEFAULT_CLAMP)
}

pub fn to_log_likelihood_with(p: Probability, delta: f64) -> LogLikelihoodPrice {
    let p = p.clamped(delta);
    // ln p - ln(1 - p) keeps ll(1 - p) == -ll(p) whenever 1 - p is exact.
    LogLikelihoodPrice(p.ln() - (1.0 - p).ln())
}

/// Inverse of [`to_log_likelihood`]: the logistic function.
pub fn from_log_likelihood(ll: LogLikelihoodPrice) -> Probability {
    let x = ll.value();
    let p = if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    };
    Probability(p)
}

/// Scale non-negative raw prices so they sum to one.
pub fn normalize_prices(raw: &[f64]) -> Result<Vec<Probability>> {
    if let Some(&bad) = raw.iter().find(|v| !(v.is_finite() && **v >= 0.0)) {
        return Err(Error::InvalidProbability(bad));
    }
    let total: f64 = raw.iter().sum();
    if total <= 0.0 {
        return Err(Error::AllZero);
    }
    Ok(raw
        .iter()
        .map(|&v| Probability((v / total).min(1.0)))
        .collect())
}

/// Logarithmic score of a forecast: `ln(probs[winner])`.
///
/// The winner's probability is floored at [`DEFAULT_CLAMP`] so a forecast
/// of zero scores a large finite penalty instead of `-inf`. A certain
/// correct forecast scores exactly 0.
pub fn log_score(probs: &[Probability], winner_index: usize) -> Result<f64> {
    log_score_with(probs, winner_index, DEFAULT_CLAMP)
}

pub fn log_score_with(probs: &[Probability], winner_index: usize, delta: f64) -> Result<f64> {
    let p = probs.get(winner_index).ok_or(Error::IndexOutOfRange {
        index: winner_index,
        len: probs.len(),
    })?;
    Ok(p.value().max(delta).ln())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub enum Outcome {
    Won,
    Lost,
}

impl Outcome {
    pub fn as_str(self) -> &'static str {
        match self {
            Outcome::Won => "won",
            Outcome::Lost => "lost",
        }
    }

    pub fn is_won(self) -> bool {
        self == Outcome::Won
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for Outcome {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s.trim().to_ascii_lowercase().as_str() {
            "won" => Ok(Outcome::Won),
            "lost" => Ok(Outcome::Lost),
            other => Err(format!("unknown outcome {other:?} (expected won or lost)")),
        }
    }
}

/// One daily price. `day_offset` counts days back from the market's final
/// trading day, which has offset 0.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PricePoint {
    pub day_offset: i64,
    pub price: Probability,
}

impl PricePoint {
    pub fn new(day_offset: i64, price: Probability) -> Self {
        PricePoint { day_offset, price }
    }
}

/// Daily prices of one tradable outcome plus its eventual label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CandidateSeries {
    pub market_id: String,
    pub candidate_id: String,
    pub outcome: Outcome,
    points: Vec<PricePoint>,
}

impl CandidateSeries {
    /// Points must have strictly increasing, non-positive offsets.
    pub fn new(
        market_id: impl Into<String>,
        candidate_id: impl Into<String>,
        outcome: Outcome,
        points: Vec<PricePoint>,
    ) -> Result<Self> {
        let market_id = market_id.into();
        let candidate_id = candidate_id.into();
        for pair in points.windows(2) {
            if pair[1].day_offset <= pair[0].day_offset {
                return Err(Error::Schema(format!(
                    "candidate {candidate_id:?} in market {market_id:?}: day offsets must be strictly increasing ({} then {})",
                    pair[0].day_offset, pair[1].day_offset
                )));
            }
        }
        if let Some(last) = points.last() {
            if last.day_offset > 0 {
                return Err(Error::Schema(format!(
                    "candidate {candidate_id:?} in market {market_id:?}: positive day offset {}",
                    last.day_offset
                )));
            }
        }
        Ok(CandidateSeries {
            market_id,
            candidate_id,
            outcome,
            points,
        })
    }

    pub fn points(&self) -> &[PricePoint] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn price_at(&self, day_offset: i64) -> Option<Probability> {
        self.points
            .binary_search_by_key(&day_offset, |p| p.day_offset)
            .ok()
            .map(|i| self.points[i].price)
    }

    pub(crate) fn shift(&mut self, by: i64) {
        for p in &mut self.points {
            p.day_offset += by;
        }
    }
}

/// A set of mutually exclusive candidates traded together.
///
/// A market with several candidates has exactly one winner. A market with a
/// single candidate is a binary event (the candidate and its complement), so
/// its lone candidate may carry either label.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Market {
    pub market_id: String,
    /// Calendar date of offset 0.
    pub end_date: NaiveDate,
    candidates: Vec<CandidateSeries>,
}

impl Market {
    pub fn new(
        market_id: impl Into<String>,
        end_date: NaiveDate,
        candidates: Vec<CandidateSeries>,
    ) -> Result<Self> {
        let market_id = market_id.into();
        if candidates.is_empty() || candidates.iter().all(|c| c.is_empty()) {
            return Err(Error::EmptyMarket(market_id));
        }
        if let Some(c) = candidates.iter().find(|c| c.market_id != market_id) {
            return Err(Error::Schema(format!(
                "candidate {:?} belongs to market {:?}, not {market_id:?}",
                c.candidate_id, c.market_id
            )));
        }
        if candidates.len() > 1 {
            let winners = candidates.iter().filter(|c| c.outcome.is_won()).count();
            match winners {
                1 => {}
                0 => return Err(Error::NoWinner(market_id)),
                n => {
                    return Err(Error::Schema(format!(
                        "market {market_id:?} has {n} winning candidates"
                    )))
                }
            }
        }
        Ok(Market {
            market_id,
            end_date,
            candidates,
        })
    }

    pub fn candidates(&self) -> &[CandidateSeries] {
        &self.candidates
    }

    pub(crate) fn candidates_mut(&mut self) -> &mut [CandidateSeries] {
        &mut self.candidates
    }

    pub fn is_binary(&self) -> bool {
        self.candidates.len() == 1
    }

    pub fn date_of(&self, day_offset: i64) -> NaiveDate {
        self.end_date + chrono::Duration::days(day_offset)
    }

    /// Latest offset carried by any candidate.
    pub fn last_offset(&self) -> Option<i64> {
        self.candidates
            .iter()
            .filter_map(|c| c.points.last().map(|p| p.day_offset))
            .max()
    }

    pub fn first_offset(&self) -> Option<i64> {
        self.candidates
            .iter()
            .filter_map(|c| c.points.first().map(|p| p.day_offset))
            .min()
    }

    /// Forecast distribution over outcomes at one day, together with the
    /// index of the realized outcome. `None` if the winner has no price that
    /// day or the prices are all zero.
    pub fn forecast_at(&self, day_offset: i64) -> Option<(Vec<Probability>, usize)> {
        if let [only] = self.candidates.as_slice() {
            let p = only.price_at(day_offset)?;
            let winner = if only.outcome.is_won() { 0 } else { 1 };
            return Some((vec![p, p.complement()], winner));
        }
        let mut raw = Vec::with_capacity(self.candidates.len());
        let mut winner = None;
        for c in &self.candidates {
            if let Some(p) = c.price_at(day_offset) {
                if c.outcome.is_won() {
                    winner = Some(raw.len());
                }
                raw.push(p.value());
            }
        }
        let winner = winner?;
        let probs = normalize_prices(&raw).ok()?;
        Some((probs, winner))
    }
}
