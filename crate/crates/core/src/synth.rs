//! Seeded synthetic fixtures: a corpus with planted features, a noisy
//! log-likelihood series with one large jump, and a biased ensemble.

use chrono::{Duration, NaiveDate};
use rand_chacha::ChaCha8Rng;
use rand_core::SeedableRng;
use rand_distr::{Distribution, Normal, Uniform};

use crate::detect::MAD_SCALE;
use crate::error::{Error, Result};
use crate::ingest::{Corpus, Document};
use crate::model::{
    from_log_likelihood, CandidateSeries, LogLikelihoodPrice, Market, Outcome, PricePoint,
    Probability,
};
use crate::sim::sim_end_date;

const BACKGROUND: &[&str] = &[
    "The campaign held a town hall meeting downtown.",
    "Voters in the suburbs remain undecided about the race.",
    "Analysts expect turnout to be higher than last cycle.",
    "The senator spoke about health care and education funding.",
    "Fundraising totals were released by both campaigns.",
    "A new advertisement aired on local television stations.",
    "Editorial boards weighed in on the debate performance.",
    "Volunteers knocked on doors across the county.",
    "The governor endorsed the candidate at a morning rally.",
    "Pollsters noted a narrow gap among likely voters.",
    "Transportation policy came up during the radio interview.",
    "Union leaders met with staff to discuss the platform.",
    "The mayor attended a breakfast with business owners.",
    "Reporters followed the bus tour through small towns.",
    "Tax relief remained a central theme of the speeches.",
    "Supporters gathered outside the convention center.",
];

const SENTENCES_PER_DOC: usize = 4;

#[derive(Debug, Clone, PartialEq)]
pub struct PlantedCorpus {
    pub corpus: Corpus,
    pub pivot: NaiveDate,
    pub positive_docs: usize,
    pub negative_docs: usize,
    /// In every positive document and no negative one.
    pub primary: &'static str,
    /// In half the positive documents and 5% of the negative ones.
    pub secondary: &'static str,
}

pub const PLANTED_PRIMARY: &str = "meteorite";
pub const PLANTED_SECONDARY: &str = "recount";
pub const PLANTED_PIVOT: (i32, u32, u32) = (2000, 5, 19);

fn uniform_index(rng: &mut ChaCha8Rng, n: usize) -> usize {
    Uniform::new(0, n).expect("nonempty range").sample(rng)
}

/// Inserts `word` at a random word boundary so its neighbours vary.
fn plant(text: &str, word: &str, rng: &mut ChaCha8Rng) -> String {
    let mut words: Vec<&str> = text.split(' ').collect();
    let at = uniform_index(rng, words.len() + 1);
    words.insert(at, word);
    words.join(" ")
}

/// 40 documents before the pivot and 20 in the week from it. Background
/// text comes from one sentence pool, and every positive background is
/// repeated exactly twice on the negative side so only the planted words
/// separate the sides.
pub fn planted_corpus(seed: u64) -> PlantedCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let pos_n = 20;
    let neg_n = 40;
    let pivot = NaiveDate::from_ymd_opt(PLANTED_PIVOT.0, PLANTED_PIVOT.1, PLANTED_PIVOT.2)
        .expect("valid date");

    let backgrounds: Vec<String> = (0..pos_n)
        .map(|_| {
            let mut picked: Vec<usize> = Vec::new();
            while picked.len() < SENTENCES_PER_DOC {
                let s = uniform_index(&mut rng, BACKGROUND.len());
                if !picked.contains(&s) {
                    picked.push(s);
                }
            }
            picked.iter().map(|&s| BACKGROUND[s]).collect::<Vec<_>>().join(" ")
        })
        .collect();

    let mut documents = Vec::with_capacity(pos_n + neg_n);
    for j in 0..neg_n {
        let mut text = backgrounds[j % pos_n].clone();
        if j % 20 == 7 {
            text = plant(&text, PLANTED_SECONDARY, &mut rng);
        }
        documents.push(Document {
            doc_id: format!("neg-{j:03}"),
            date: pivot - Duration::days(1 + (j as i64 % 30)),
            source: "wire".into(),
            text,
        });
    }
    for j in 0..pos_n {
        let mut text = plant(&backgrounds[j], PLANTED_PRIMARY, &mut rng);
        if j % 2 == 0 {
            text = plant(&text, PLANTED_SECONDARY, &mut rng);
        }
        documents.push(Document {
            doc_id: format!("pos-{j:03}"),
            date: pivot + Duration::days(j as i64 % 7),
            source: "wire".into(),
            text,
        });
    }
    PlantedCorpus {
        corpus: Corpus::new(documents),
        pivot,
        positive_docs: pos_n,
        negative_docs: neg_n,
        primary: PLANTED_PRIMARY,
        secondary: PLANTED_SECONDARY,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JumpSeries {
    pub market: Market,
    /// Later day of the jump pair.
    pub jump_date: NaiveDate,
}

/// A `days`-point series whose daily log-likelihood changes are normal with
/// median absolute deviation `mad`, except one change of exactly `jump`.
pub fn jump_series(seed: u64, days: usize, mad: f64, jump: f64) -> Result<JumpSeries> {
    if days < 3 {
        return Err(Error::TooShort { needed: 3, got: days });
    }
    let noise = Normal::new(0.0, mad * MAD_SCALE)
        .map_err(|e| Error::InvalidConfig(format!("noise scale {mad}: {e}")))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let jump_at = 1 + uniform_index(&mut rng, days - 1);
    let mut ll = 0.0;
    let mut points = Vec::with_capacity(days);
    let last = days as i64 - 1;
    for t in 0..days {
        if t > 0 {
            ll += if t == jump_at { jump } else { noise.sample(&mut rng) };
        }
        let p = from_log_likelihood(LogLikelihoodPrice::new(ll)?);
        points.push(PricePoint::new(t as i64 - last, p));
    }
    let series = CandidateSeries::new("synth-jump", "c", Outcome::Won, points)?;
    let market = Market::new("synth-jump", sim_end_date(), vec![series])?;
    let jump_date = market.date_of(jump_at as i64 - last);
    Ok(JumpSeries { market, jump_date })
}

/// Every price raised by `bias` and clamped to [0, 1].
pub fn biased_ensemble(markets: &[Market], bias: f64) -> Result<Vec<Market>> {
    markets
        .iter()
        .map(|m| {
            let candidates = m
                .candidates()
                .iter()
                .map(|c| {
                    let points = c
                        .points()
                        .iter()
                        .map(|pt| {
                            let p = (pt.price.value() + bias).clamp(0.0, 1.0);
                            Ok(PricePoint::new(pt.day_offset, Probability::new(p)?))
                        })
                        .collect::<Result<Vec<_>>>()?;
                    CandidateSeries::new(&c.market_id, &c.candidate_id, c.outcome, points)
                })
                .collect::<Result<Vec<_>>>()?;
            Market::new(&m.market_id, m.end_date, candidates)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::explain::extract_features;

    #[test]
    fn planted_frequencies() {
        let pc = planted_corpus(3);
        let (mut pos, mut neg) = ((0, 0), (0, 0));
        for d in &pc.corpus.documents {
            let f = extract_features(&d.text);
            let side = if d.date >= pc.pivot { &mut pos } else { &mut neg };
            side.0 += f.contains(pc.primary) as usize;
            side.1 += f.contains(pc.secondary) as usize;
        }
        assert_eq!(pos, (20, 10));
        assert_eq!(neg, (0, 2));
        assert_eq!(pc.corpus.len(), 60);
    }

    #[test]
    fn planted_is_seeded() {
        assert_eq!(planted_corpus(1), planted_corpus(1));
        assert_ne!(planted_corpus(1), planted_corpus(2));
    }

    #[test]
    fn jump_is_recovered() {
        let js = jump_series(5, 60, 0.05, 1.0).unwrap();
        let c = &js.market.candidates()[0];
        assert_eq!(c.len(), 60);
        let eps = crate::analytics::series_epsilons(c, crate::analytics::GapPolicy::Exclude);
        let (off, d) = eps.iter().copied().find(|&(o, _)| js.market.date_of(o) == js.jump_date).unwrap();
        assert!((d - 1.0).abs() < 1e-9, "{off} {d}");
    }

    #[test]
    fn bias_clamps() {
        let js = jump_series(5, 10, 0.05, 1.0).unwrap();
        let b = biased_ensemble(&[js.market.clone()], 0.6).unwrap();
        for (x, y) in js.market.candidates()[0].points().iter().zip(b[0].candidates()[0].points()) {
            assert_eq!(y.price.value(), (x.price.value() + 0.6).min(1.0));
        }
    }
}
