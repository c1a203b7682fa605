use serde::Serialize;

use crate::model::{to_log_likelihood, CandidateSeries, Market, Outcome, Probability};

/// How to treat consecutive points that are more than one day apart.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize)]
pub enum GapPolicy {
    /// Pair only points on consecutive calendar days.
    #[default]
    Exclude,
    /// Pair every consecutive point, whatever the gap.
    Include,
}

/// A one-step move of one candidate's price.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Transition {
    pub prev: Probability,
    pub next: Probability,
    pub outcome: Outcome,
    /// Offset of the later point.
    pub day_offset: i64,
    /// Ordinal of the candidate series the move belongs to.
    pub series_index: usize,
}

/// A daily change in log-likelihood price.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EpsilonSample {
    pub value: f64,
    /// Log-likelihood price on the earlier day.
    pub prev_ll: f64,
    pub outcome: Outcome,
    pub market_id: String,
    pub candidate_id: String,
    /// Offset of the later day.
    pub day_offset: i64,
}

pub fn price_transitions(markets: &[Market], gaps: GapPolicy) -> Vec<Transition> {
    let mut out = Vec::new();
    let series = markets.iter().flat_map(|m| m.candidates());
    for (series_index, c) in series.enumerate() {
        for w in c.points().windows(2) {
            if gaps == GapPolicy::Exclude && w[1].day_offset - w[0].day_offset != 1 {
                continue;
            }
            out.push(Transition {
                prev: w[0].price,
                next: w[1].price,
                outcome: c.outcome,
                day_offset: w[1].day_offset,
                series_index,
            });
        }
    }
    out
}

/// Daily log-likelihood changes of every candidate, excluding gaps.
pub fn epsilon_samples(markets: &[Market]) -> Vec<EpsilonSample> {
    epsilon_samples_with(markets, GapPolicy::Exclude)
}

pub fn epsilon_samples_with(markets: &[Market], gaps: GapPolicy) -> Vec<EpsilonSample> {
    let mut out = Vec::new();
    for m in markets {
        for c in m.candidates() {
            for w in c.points().windows(2) {
                if gaps == GapPolicy::Exclude && w[1].day_offset - w[0].day_offset != 1 {
                    continue;
                }
                let prev = to_log_likelihood(w[0].price).value();
                let next = to_log_likelihood(w[1].price).value();
                out.push(EpsilonSample {
                    value: next - prev,
                    prev_ll: prev,
                    outcome: c.outcome,
                    market_id: m.market_id.clone(),
                    candidate_id: c.candidate_id.clone(),
                    day_offset: w[1].day_offset,
                });
            }
        }
    }
    out
}

/// `(day_offset of the later day, change in log-likelihood)` for one series.
pub fn series_epsilons(series: &CandidateSeries, gaps: GapPolicy) -> Vec<(i64, f64)> {
    series
        .points()
        .windows(2)
        .filter(|w| gaps == GapPolicy::Include || w[1].day_offset - w[0].day_offset == 1)
        .map(|w| {
            let d = to_log_likelihood(w[1].price).value() - to_log_likelihood(w[0].price).value();
            (w[1].day_offset, d)
        })
        .collect()
}
