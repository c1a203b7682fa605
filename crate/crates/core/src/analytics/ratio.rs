use serde::Serialize;

use super::bins::{bin_index, check_edges};
use super::epsilon::EpsilonSample;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioBin {
    pub bin_low: f64,
    pub bin_high: f64,
    pub bin_center: f64,
    /// Won frequency over lost frequency; `None` when no lost sample falls
    /// in the bin.
    pub ratio: Option<f64>,
    /// `e^bin_center`.
    pub theory: f64,
    pub count_won: usize,
    pub count_lost: usize,
}

fn class_totals<'a>(samples: impl Iterator<Item = &'a EpsilonSample>) -> Result<(usize, usize)> {
    let (mut won, mut lost) = (0, 0);
    for s in samples {
        if s.outcome.is_won() {
            won += 1;
        } else {
            lost += 1;
        }
    }
    if won == 0 {
        return Err(Error::NoSamples("won"));
    }
    if lost == 0 {
        return Err(Error::NoSamples("lost"));
    }
    Ok((won, lost))
}

fn ratio_of(cw: usize, tw: usize, cl: usize, tl: usize) -> Option<f64> {
    (cl > 0 && tw > 0 && tl > 0).then(|| (cw as f64 / tw as f64) / (cl as f64 / tl as f64))
}

/// Per bin of `epsilon`, the frequency among eventual winners divided by the
/// frequency among eventual losers. Frequencies are normalized by each
/// class's total sample count.
pub fn winner_loser_ratio(samples: &[EpsilonSample], edges: &[f64]) -> Result<Vec<RatioBin>> {
    check_edges(edges)?;
    let (total_won, total_lost) = class_totals(samples.iter())?;
    let bins = edges.len() - 1;
    let mut won = vec![0usize; bins];
    let mut lost = vec![0usize; bins];
    for s in samples {
        if let Some(j) = bin_index(edges, s.value) {
            if s.outcome.is_won() {
                won[j] += 1;
            } else {
                lost[j] += 1;
            }
        }
    }
    Ok((0..bins)
        .map(|j| {
            let center = 0.5 * (edges[j] + edges[j + 1]);
            RatioBin {
                bin_low: edges[j],
                bin_high: edges[j + 1],
                bin_center: center,
                ratio: ratio_of(won[j], total_won, lost[j], total_lost),
                theory: center.exp(),
                count_won: won[j],
                count_lost: lost[j],
            }
        })
        .collect())
}

/// Winner/loser ratio of one `epsilon` bin within one bin of the prior
/// log-likelihood price.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StratifiedRatioCell {
    pub a_center: f64,
    pub eps_center: f64,
    pub ratio: Option<f64>,
    pub count_won: usize,
    pub count_lost: usize,
    pub stratum_won: usize,
    pub stratum_lost: usize,
}

/// Winner/loser ratio computed separately within each bin of the prior
/// log-likelihood price `a`, with frequencies normalized inside the stratum.
///
/// The `e^epsilon` relation holds conditional on the prior price; pooling
/// over different priors mixes strata whose winner shares differ.
pub fn stratified_winner_loser_ratio(
    samples: &[EpsilonSample],
    ll_edges: &[f64],
    eps_edges: &[f64],
) -> Result<Vec<StratifiedRatioCell>> {
    check_edges(ll_edges)?;
    check_edges(eps_edges)?;
    class_totals(samples.iter())?;
    let (na, ne) = (ll_edges.len() - 1, eps_edges.len() - 1);
    let mut won = vec![0usize; na * ne];
    let mut lost = vec![0usize; na * ne];
    let mut stratum = vec![(0usize, 0usize); na];
    for s in samples {
        let Some(ai) = bin_index(ll_edges, s.prev_ll) else {
            continue;
        };
        let slot = &mut stratum[ai];
        if s.outcome.is_won() {
            slot.0 += 1;
        } else {
            slot.1 += 1;
        }
        if let Some(ei) = bin_index(eps_edges, s.value) {
            if s.outcome.is_won() {
                won[ai * ne + ei] += 1;
            } else {
                lost[ai * ne + ei] += 1;
            }
        }
    }
    let mut out = Vec::new();
    for ai in 0..na {
        let (tw, tl) = stratum[ai];
        for ei in 0..ne {
            let (cw, cl) = (won[ai * ne + ei], lost[ai * ne + ei]);
            if cw + cl == 0 {
                continue;
            }
            out.push(StratifiedRatioCell {
                a_center: 0.5 * (ll_edges[ai] + ll_edges[ai + 1]),
                eps_center: 0.5 * (eps_edges[ei] + eps_edges[ei + 1]),
                ratio: ratio_of(cw, tw, cl, tl),
                count_won: cw,
                count_lost: cl,
                stratum_won: tw,
                stratum_lost: tl,
            });
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Outcome;

    fn sample(value: f64, prev_ll: f64, outcome: Outcome) -> EpsilonSample {
        EpsilonSample {
            value,
            prev_ll,
            outcome,
            market_id: "m".into(),
            candidate_id: "c".into(),
            day_offset: 0,
        }
    }

    #[test]
    fn all_won_is_an_error() {
        let s = vec![sample(0.1, 0.0, Outcome::Won); 3];
        assert!(matches!(winner_loser_ratio(&s, &[-1.0, 1.0]), Err(Error::NoSamples("lost"))));
    }

    #[test]
    fn exact_counts() {
        // won: 2 of 4 in the upper bin, lost: 1 of 4 -> ratio 2
        let mut s = Vec::new();
        for v in [-0.5, -0.5, 0.5, 0.5] {
            s.push(sample(v, 0.0, Outcome::Won));
        }
        for v in [-0.5, -0.5, -0.5, 0.5] {
            s.push(sample(v, 0.0, Outcome::Lost));
        }
        let bins = winner_loser_ratio(&s, &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(bins[1].ratio, Some(2.0));
        assert!((bins[0].ratio.unwrap() - 2.0 / 3.0).abs() < 1e-15);
        assert_eq!(bins[1].theory, 0.5f64.exp());
    }

    #[test]
    fn empty_lost_bin_is_undefined() {
        let s = vec![sample(0.5, 0.0, Outcome::Won), sample(-0.5, 0.0, Outcome::Lost)];
        let bins = winner_loser_ratio(&s, &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(bins[1].ratio, None);
        assert_eq!(bins[0].ratio, Some(0.0));
    }

    #[test]
    fn strata_are_normalized_separately() {
        // stratum a~0: won 1 up, 1 down; lost 1 down  -> up ratio undefined, down 0.5
        // stratum a~2: won 3 up; lost 1 up          -> up ratio 1
        let s = vec![
            sample(0.5, 0.1, Outcome::Won),
            sample(-0.5, 0.1, Outcome::Won),
            sample(-0.5, 0.1, Outcome::Lost),
            sample(0.5, 2.1, Outcome::Won),
            sample(0.5, 2.1, Outcome::Won),
            sample(0.5, 2.1, Outcome::Won),
            sample(0.5, 2.1, Outcome::Lost),
        ];
        let cells = stratified_winner_loser_ratio(&s, &[-1.0, 1.0, 3.0], &[-1.0, 0.0, 1.0]).unwrap();
        assert_eq!(cells.len(), 3);
        assert_eq!(cells[0].ratio, Some(0.5));
        assert_eq!(cells[1].ratio, None);
        assert_eq!(cells[2].ratio, Some(1.0));
        assert_eq!(cells[2].a_center, 2.0);
    }
}
