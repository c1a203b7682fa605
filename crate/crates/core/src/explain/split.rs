use chrono::{Duration, NaiveDate};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::ingest::Corpus;

pub const DEFAULT_POSITIVE_WINDOW_DAYS: u32 = 7;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct SplitSpec {
    pub pivot_date: NaiveDate,
    pub positive_window_days: u32,
    /// `None` takes every earlier document.
    pub negative_window_days: Option<u32>,
}

impl SplitSpec {
    pub fn new(pivot_date: NaiveDate) -> Self {
        SplitSpec {
            pivot_date,
            positive_window_days: DEFAULT_POSITIVE_WINDOW_DAYS,
            negative_window_days: None,
        }
    }
}

/// `(negative, positive)`. Positive documents fall in
/// `[pivot, pivot + positive_window_days)`, negative ones before the pivot.
pub fn split_corpus(corpus: &Corpus, spec: &SplitSpec) -> Result<(Corpus, Corpus)> {
    if spec.positive_window_days == 0 || spec.negative_window_days == Some(0) {
        return Err(Error::InvalidConfig("split windows must be at least one day".into()));
    }
    let pivot = spec.pivot_date;
    let pos_end = pivot + Duration::days(spec.positive_window_days.into());
    let neg_start = spec.negative_window_days.map(|d| pivot - Duration::days(d.into()));
    let mut neg = Vec::new();
    let mut pos = Vec::new();
    for d in &corpus.documents {
        if d.date >= pivot && d.date < pos_end {
            pos.push(d.clone());
        } else if d.date < pivot && neg_start.is_none_or(|s| d.date >= s) {
            neg.push(d.clone());
        }
    }
    if neg.is_empty() {
        return Err(Error::EmptySide("negative"));
    }
    if pos.is_empty() {
        return Err(Error::EmptySide("positive"));
    }
    Ok((Corpus::new(neg), Corpus::new(pos)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ingest::Document;

    fn doc(id: &str, date: NaiveDate) -> Document {
        Document { doc_id: id.into(), date, source: "s".into(), text: String::new() }
    }

    fn pivot() -> NaiveDate {
        NaiveDate::from_ymd_opt(2000, 5, 19).unwrap()
    }

    fn ids(c: &Corpus) -> Vec<&str> {
        c.documents.iter().map(|d| d.doc_id.as_str()).collect()
    }

    #[test]
    fn window_rule() {
        let p = pivot();
        let c = Corpus::new(vec![
            doc("before", p - Duration::days(3)),
            doc("inside", p + Duration::days(2)),
            doc("after", p + Duration::days(10)),
            doc("edge", p + Duration::days(7)),
            doc("same", p),
        ]);
        let (neg, pos) = split_corpus(&c, &SplitSpec::new(p)).unwrap();
        assert_eq!(ids(&neg), vec!["before"]);
        assert_eq!(ids(&pos), vec!["inside", "same"]);
    }

    #[test]
    fn bounded_negative_window() {
        let p = pivot();
        let c = Corpus::new(vec![
            doc("old", p - Duration::days(30)),
            doc("recent", p - Duration::days(5)),
            doc("pos", p),
        ]);
        let spec = SplitSpec { negative_window_days: Some(10), ..SplitSpec::new(p) };
        let (neg, _) = split_corpus(&c, &spec).unwrap();
        assert_eq!(ids(&neg), vec!["recent"]);
    }

    #[test]
    fn empty_sides() {
        let p = pivot();
        let late = Corpus::new(vec![doc("a", p + Duration::days(20))]);
        assert!(matches!(split_corpus(&late, &SplitSpec::new(p)), Err(Error::EmptySide("negative"))));
        let early = Corpus::new(vec![doc("a", p - Duration::days(1))]);
        assert!(matches!(split_corpus(&early, &SplitSpec::new(p)), Err(Error::EmptySide("positive"))));
    }
}
