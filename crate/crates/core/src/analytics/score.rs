use std::collections::{BTreeMap, BTreeSet};

use serde::Serialize;

use crate::error::Result;
use crate::model::{log_score, Market};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CurvePoint {
    pub day_offset: i64,
    pub mean_score: f64,
    pub num_markets: usize,
}

/// Mean logarithmic score per day offset, oldest offset first.
#[derive(Debug, Clone, PartialEq, Default, Serialize)]
pub struct LogScoreCurve {
    pub points: Vec<CurvePoint>,
}

impl LogScoreCurve {
    pub fn at(&self, day_offset: i64) -> Option<&CurvePoint> {
        self.points
            .binary_search_by_key(&day_offset, |p| p.day_offset)
            .ok()
            .map(|i| &self.points[i])
    }
}

/// Average the log score of every market's forecast at each offset.
///
/// A market contributes to an offset only if it has prices that day
/// (including its winner's); markets are never zero-filled, so older
/// offsets average over fewer markets.
pub fn average_log_score_curve(markets: &[Market]) -> Result<LogScoreCurve> {
    let mut acc: BTreeMap<i64, (f64, usize)> = BTreeMap::new();
    for m in markets {
        let offsets: BTreeSet<i64> = m
            .candidates()
            .iter()
            .flat_map(|c| c.points().iter().map(|p| p.day_offset))
            .collect();
        for offset in offsets {
            let Some((probs, winner)) = m.forecast_at(offset) else {
                continue;
            };
            let score = log_score(&probs, winner)?;
            let slot = acc.entry(offset).or_insert((0.0, 0));
            slot.0 += score;
            slot.1 += 1;
        }
    }
    Ok(LogScoreCurve {
        points: acc
            .into_iter()
            .map(|(day_offset, (sum, n))| CurvePoint {
                day_offset,
                mean_score: sum / n as f64,
                num_markets: n,
            })
            .collect(),
    })
}
