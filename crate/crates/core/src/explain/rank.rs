use std::collections::{BTreeMap, BTreeSet};
use std::io::BufRead;
use std::path::Path;

use rayon::prelude::*;
use serde::Serialize;

use super::entropy::expected_entropy_loss;
use super::tokenize::extract_features;
use crate::error::{Error, Result};
use crate::ingest::Corpus;

pub const DEFAULT_MIN_POS_FRACTION: f64 = 0.075;
pub const DEFAULT_TOP_K: usize = 10;

/// Features to drop. A single-word entry also drops every n-gram
/// containing that word.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize)]
pub struct Stoplist(BTreeSet<String>);

impl Stoplist {
    pub fn new<I, S>(entries: I) -> Self
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        Stoplist(
            entries
                .into_iter()
                .map(|s| s.as_ref().split_whitespace().collect::<Vec<_>>().join(" ").to_lowercase())
                .filter(|s| !s.is_empty())
                .collect(),
        )
    }

    /// One entry per line.
    pub fn read<R: BufRead>(reader: R) -> Result<Self> {
        let lines: Vec<String> = reader
            .lines()
            .collect::<std::io::Result<_>>()
            .map_err(|e| Error::io("<stoplist>", e))?;
        Ok(Stoplist::new(lines))
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Ok(Stoplist::new(text.lines()))
    }

    pub fn blocks(&self, feature: &str) -> bool {
        self.0.contains(feature) || feature.split(' ').any(|w| self.0.contains(w))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn entries(&self) -> impl Iterator<Item = &str> {
        self.0.iter().map(String::as_str)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankConfig {
    pub min_pos_fraction: f64,
    pub stoplist: Stoplist,
    /// `None` keeps every surviving feature.
    pub top_k: Option<usize>,
}

impl Default for RankConfig {
    fn default() -> Self {
        RankConfig {
            min_pos_fraction: DEFAULT_MIN_POS_FRACTION,
            stoplist: Stoplist::default(),
            top_k: Some(DEFAULT_TOP_K),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct FeatureCounts {
    pub pos_df: u64,
    pub neg_df: u64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FeatureStat {
    pub feature: String,
    pub pos_df: u64,
    pub neg_df: u64,
    pub pos_total: u64,
    pub neg_total: u64,
    /// Bits.
    pub entropy_loss: f64,
}

fn document_frequencies(corpus: &Corpus) -> BTreeMap<String, u64> {
    let sets: Vec<BTreeSet<String>> =
        corpus.documents.par_iter().map(|d| extract_features(&d.text)).collect();
    let mut df = BTreeMap::new();
    for set in sets {
        for f in set {
            *df.entry(f).or_insert(0) += 1;
        }
    }
    df
}

/// Document frequencies of every feature on each side.
pub fn count_features(pos: &Corpus, neg: &Corpus) -> BTreeMap<String, FeatureCounts> {
    let (p, n) = rayon::join(|| document_frequencies(pos), || document_frequencies(neg));
    let mut out: BTreeMap<String, FeatureCounts> = p
        .into_iter()
        .map(|(f, pos_df)| (f, FeatureCounts { pos_df, neg_df: 0 }))
        .collect();
    for (f, neg_df) in n {
        out.entry(f).or_insert(FeatureCounts { pos_df: 0, neg_df: 0 }).neg_df = neg_df;
    }
    out
}

/// Applies the stoplist, then keeps features found in at least
/// `min_pos_fraction` of the positive documents.
pub fn filter_features(
    pos: &Corpus,
    neg: &Corpus,
    min_pos_fraction: f64,
    stoplist: &Stoplist,
) -> Result<BTreeMap<String, FeatureCounts>> {
    if pos.is_empty() {
        return Err(Error::EmptySide("positive"));
    }
    if neg.is_empty() {
        return Err(Error::EmptySide("negative"));
    }
    if !(0.0..=1.0).contains(&min_pos_fraction) {
        return Err(Error::InvalidConfig(format!(
            "min_pos_fraction {min_pos_fraction} is outside [0, 1]"
        )));
    }
    let total = pos.len() as f64;
    let kept: BTreeMap<_, _> = count_features(pos, neg)
        .into_iter()
        .filter(|(f, _)| !stoplist.blocks(f))
        .filter(|(_, c)| c.pos_df as f64 / total >= min_pos_fraction)
        .collect();
    if kept.is_empty() {
        return Err(Error::NoFeatures);
    }
    Ok(kept)
}

/// Features sorted by expected entropy loss, then by positive document
/// frequency, then alphabetically.
pub fn rank_features(pos: &Corpus, neg: &Corpus, config: &RankConfig) -> Result<Vec<FeatureStat>> {
    let kept = filter_features(pos, neg, config.min_pos_fraction, &config.stoplist)?;
    let (pos_total, neg_total) = (pos.len() as u64, neg.len() as u64);
    let mut stats = kept
        .into_iter()
        .map(|(feature, c)| {
            Ok(FeatureStat {
                entropy_loss: expected_entropy_loss(c.pos_df, c.neg_df, pos_total, neg_total)?,
                feature,
                pos_df: c.pos_df,
                neg_df: c.neg_df,
                pos_total,
                neg_total,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    stats.sort_by(|a, b| {
        b.entropy_loss
            .total_cmp(&a.entropy_loss)
            .then(b.pos_df.cmp(&a.pos_df))
            .then_with(|| a.feature.cmp(&b.feature))
    });
    if let Some(k) = config.top_k {
        stats.truncate(k);
    }
    Ok(stats)
}
