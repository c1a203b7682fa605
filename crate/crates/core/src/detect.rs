//! Flags days with unusually large one-day log-likelihood moves.

use chrono::NaiveDate;
use serde::Serialize;

use crate::analytics::{series_epsilons, GapPolicy};
use crate::error::{Error, Result};
use crate::model::{CandidateSeries, Market};

/// Consistency constant that makes the MAD estimate a normal SD.
pub const MAD_SCALE: f64 = 1.4826;

pub const DEFAULT_Z_THRESHOLD: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(tag = "method", rename_all = "snake_case")]
pub enum DetectPolicy {
    /// `|d - median| / (MAD_SCALE * MAD) >= threshold`.
    RobustZ { threshold: f64 },
    /// `|d| >= threshold`.
    AbsThreshold { threshold: f64 },
    /// The `k` largest `|d|`, earlier days first on ties.
    TopK { k: usize },
}

impl Default for DetectPolicy {
    fn default() -> Self {
        DetectPolicy::RobustZ { threshold: DEFAULT_Z_THRESHOLD }
    }
}

impl DetectPolicy {
    fn min_points(&self) -> usize {
        match self {
            DetectPolicy::RobustZ { .. } => 3,
            _ => 2,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EventHit {
    pub market_id: String,
    pub candidate_id: String,
    /// The later day of the pair.
    pub date: NaiveDate,
    pub delta_ll: f64,
    pub robust_z: f64,
}

struct Change<'a> {
    market: &'a Market,
    series: &'a CandidateSeries,
    day_offset: i64,
    delta: f64,
}

fn changes<'a>(market: &'a Market, series: &'a CandidateSeries) -> Vec<Change<'a>> {
    series_epsilons(series, GapPolicy::Exclude)
        .into_iter()
        .map(|(day_offset, delta)| Change { market, series, day_offset, delta })
        .collect()
}

fn median(sorted: &[f64]) -> f64 {
    let n = sorted.len();
    if n == 0 {
        return 0.0;
    }
    if n % 2 == 1 {
        sorted[n / 2]
    } else {
        0.5 * (sorted[n / 2 - 1] + sorted[n / 2])
    }
}

/// Median and MAD of the values.
pub fn median_mad(values: &[f64]) -> (f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let med = median(&v);
    let mut dev: Vec<f64> = v.iter().map(|x| (x - med).abs()).collect();
    dev.sort_by(f64::total_cmp);
    (med, median(&dev))
}

fn robust_z(delta: f64, med: f64, mad: f64) -> f64 {
    let dev = delta - med;
    if mad > 0.0 {
        dev / (MAD_SCALE * mad)
    } else if dev == 0.0 {
        0.0
    } else {
        // degenerate spread: any departure from the median is infinitely unusual
        f64::INFINITY.copysign(dev)
    }
}

/// Indices of flagged changes. Ties in `TopK` go to the lower index, so
/// callers pass changes in date order.
pub fn flagged(deltas: &[f64], policy: &DetectPolicy) -> Vec<usize> {
    let (med, mad) = median_mad(deltas);
    let mut keep: Vec<usize> = match *policy {
        DetectPolicy::RobustZ { threshold } => (0..deltas.len())
            .filter(|&i| robust_z(deltas[i], med, mad).abs() >= threshold)
            .collect(),
        DetectPolicy::AbsThreshold { threshold } => {
            (0..deltas.len()).filter(|&i| deltas[i].abs() >= threshold).collect()
        }
        DetectPolicy::TopK { k } => {
            let mut idx: Vec<usize> = (0..deltas.len()).collect();
            idx.sort_by(|&a, &b| deltas[b].abs().total_cmp(&deltas[a].abs()).then(a.cmp(&b)));
            idx.truncate(k);
            idx
        }
    };
    keep.sort_unstable();
    keep
}

fn select(mut changes: Vec<Change<'_>>, policy: &DetectPolicy) -> Vec<EventHit> {
    changes.sort_by_key(date_of);
    let deltas: Vec<f64> = changes.iter().map(|c| c.delta).collect();
    let (med, mad) = median_mad(&deltas);
    flagged(&deltas, policy)
        .into_iter()
        .map(|i| {
            let c = &changes[i];
            EventHit {
                market_id: c.market.market_id.clone(),
                candidate_id: c.series.candidate_id.clone(),
                date: date_of(c),
                delta_ll: c.delta,
                robust_z: robust_z(c.delta, med, mad),
            }
        })
        .collect()
}

fn date_of(c: &Change<'_>) -> NaiveDate {
    c.market.date_of(c.day_offset)
}

fn check_len(series: &CandidateSeries, policy: &DetectPolicy) -> Result<()> {
    let needed = policy.min_points();
    if series.len() < needed {
        return Err(Error::TooShort { needed, got: series.len() });
    }
    Ok(())
}

/// Events in one candidate series of `market`, sorted by date.
pub fn detect_events(
    market: &Market,
    series: &CandidateSeries,
    policy: &DetectPolicy,
) -> Result<Vec<EventHit>> {
    check_len(series, policy)?;
    Ok(select(changes(market, series), policy))
}

/// Runs [`detect_events`] on every series; hits are grouped by series in
/// input order.
pub fn detect_all(markets: &[Market], policy: &DetectPolicy) -> Result<Vec<EventHit>> {
    let mut out = Vec::new();
    for m in markets {
        for c in m.candidates() {
            out.extend(detect_events(m, c, policy)?);
        }
    }
    Ok(out)
}

/// Thresholds against the pooled distribution of every series' changes.
/// Output is sorted by date, then by input order.
pub fn detect_pooled(markets: &[Market], policy: &DetectPolicy) -> Result<Vec<EventHit>> {
    let mut all = Vec::new();
    let mut points = 0;
    for m in markets {
        for c in m.candidates() {
            points = points.max(c.len());
            all.extend(changes(m, c));
        }
    }
    let needed = policy.min_points() - 1;
    if all.len() < needed {
        return Err(Error::TooShort { needed: needed + 1, got: points });
    }
    Ok(select(all, policy))
}
