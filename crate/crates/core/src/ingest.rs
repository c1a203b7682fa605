//! Price CSV and corpus JSON-lines readers/writers, and market alignment.
//!
//! Price CSV header: `market_id,candidate_id,date,price,outcome`. Dates are
//! `YYYY-MM-DD`. The `outcome` cell is `won`, `lost`, or empty; every
//! candidate needs a label on at least one of its rows.
//!
//! Corpus files hold one JSON object per line with exactly the fields
//! `doc_id`, `date`, `source` and `text`.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;

use chrono::NaiveDate;
use serde::Deserialize;

use crate::error::{Error, Result};
use crate::model::{CandidateSeries, Market, Outcome, PricePoint, Probability};

pub const PRICE_HEADER: [&str; 5] = ["market_id", "candidate_id", "date", "price", "outcome"];

const DATE_FORMAT: &str = "%Y-%m-%d";

pub fn parse_date(s: &str) -> Option<NaiveDate> {
    NaiveDate::parse_from_str(s.trim(), DATE_FORMAT).ok()
}

/// One row of the price CSV.
#[derive(Debug, Clone, PartialEq)]
pub struct RawPriceRow {
    pub market_id: String,
    pub candidate_id: String,
    pub date: NaiveDate,
    pub price: f64,
    pub outcome: Option<Outcome>,
}

pub fn load_prices(path: impl AsRef<Path>) -> Result<Vec<Market>> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_prices(BufReader::new(file))
}

pub fn read_prices<R: Read>(reader: R) -> Result<Vec<Market>> {
    let rows = read_price_rows(reader)?;
    group_rows(rows)
}

/// Parse and validate rows without grouping. Each row carries its line number.
pub fn read_price_rows<R: Read>(reader: R) -> Result<Vec<(u64, RawPriceRow)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .from_reader(reader);
    let mut records = rdr.records();

    let header = match records.next() {
        Some(rec) => rec.map_err(csv_error)?,
        None => return Err(Error::Schema("empty file: missing price CSV header".into())),
    };
    let fields: Vec<&str> = header.iter().map(str::trim).collect();
    if fields != PRICE_HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header {:?}, found {:?}",
                PRICE_HEADER.join(","),
                fields.join(",")
            ),
        });
    }

    let mut rows = Vec::new();
    for rec in records {
        let rec = rec.map_err(csv_error)?;
        let line = rec.position().map_or(0, |p| p.line());
        if rec.len() == 1 && rec[0].trim().is_empty() {
            continue;
        }
        if rec.len() != 5 {
            return Err(Error::Parse {
                line,
                message: format!("expected 5 fields, found {}", rec.len()),
            });
        }
        let market_id = rec[0].trim();
        let candidate_id = rec[1].trim();
        if market_id.is_empty() || candidate_id.is_empty() {
            return Err(Error::Parse {
                line,
                message: "empty market_id or candidate_id".into(),
            });
        }
        let date = parse_date(&rec[2]).ok_or_else(|| Error::Parse {
            line,
            message: format!("unparseable date {:?}", &rec[2]),
        })?;
        let price: f64 = rec[3].trim().parse().map_err(|_| Error::Parse {
            line,
            message: format!("unparseable price {:?}", &rec[3]),
        })?;
        if !price.is_finite() || price < 0.0 {
            return Err(Error::Schema(format!("line {line}: price {price} is negative or not finite")));
        }
        if price > 1.0 {
            return Err(Error::Schema(format!("line {line}: price {price} exceeds 1")));
        }
        let outcome = match rec[4].trim() {
            "" => None,
            s => Some(s.parse::<Outcome>().map_err(|message| Error::Parse { line, message })?),
        };
        rows.push((
            line,
            RawPriceRow {
                market_id: market_id.to_string(),
                candidate_id: candidate_id.to_string(),
                date,
                price,
                outcome,
            },
        ));
    }
    Ok(rows)
}

fn csv_error(e: csv::Error) -> Error {
    let line = e.position().map_or(0, |p| p.line());
    Error::Parse {
        line,
        message: e.to_string(),
    }
}

#[derive(Default)]
struct CandidateRows {
    closes: BTreeMap<NaiveDate, f64>,
    outcome: Option<Outcome>,
}

/// Group rows into markets. Markets and candidates keep first-appearance order.
pub fn group_rows(rows: Vec<(u64, RawPriceRow)>) -> Result<Vec<Market>> {
    let mut market_order: Vec<String> = Vec::new();
    let mut markets: HashMap<String, (Vec<String>, HashMap<String, CandidateRows>)> = HashMap::new();

    for (line, row) in rows {
        let (order, cands) = markets.entry(row.market_id.clone()).or_insert_with(|| {
            market_order.push(row.market_id.clone());
            Default::default()
        });
        let cand = cands.entry(row.candidate_id.clone()).or_insert_with(|| {
            order.push(row.candidate_id.clone());
            CandidateRows::default()
        });
        // later rows for the same day overwrite earlier ones: daily close
        cand.closes.insert(row.date, row.price);
        if let Some(o) = row.outcome {
            match cand.outcome {
                Some(prev) if prev != o => {
                    return Err(Error::Schema(format!(
                        "line {line}: candidate {:?} in market {:?} labelled both {prev} and {o}",
                        row.candidate_id, row.market_id
                    )))
                }
                _ => cand.outcome = Some(o),
            }
        }
    }

    let mut out = Vec::with_capacity(market_order.len());
    for market_id in market_order {
        let (order, mut cands) = markets.remove(&market_id).expect("market recorded");
        let end_date = cands
            .values()
            .filter_map(|c| c.closes.keys().next_back().copied())
            .max()
            .ok_or_else(|| Error::EmptyMarket(market_id.clone()))?;
        let mut series = Vec::with_capacity(order.len());
        for candidate_id in order {
            let rows = cands.remove(&candidate_id).expect("candidate recorded");
            let outcome = rows.outcome.ok_or_else(|| {
                Error::Schema(format!(
                    "candidate {candidate_id:?} in market {market_id:?} has no won/lost label"
                ))
            })?;
            let points = rows
                .closes
                .into_iter()
                .map(|(date, price)| {
                    let offset = (date - end_date).num_days();
                    Ok(PricePoint::new(offset, Probability::new(price)?))
                })
                .collect::<Result<Vec<_>>>()?;
            series.push(CandidateSeries::new(market_id.clone(), candidate_id, outcome, points)?);
        }
        let market = Market::new(market_id.clone(), end_date, series).map_err(|e| match e {
            Error::NoWinner(id) => Error::Schema(format!("market {id:?} has no winning candidate")),
            other => other,
        })?;
        out.push(market);
    }
    Ok(out)
}

/// Write markets in the price CSV schema, labelling every row.
pub fn write_prices<W: Write>(markets: &[Market], writer: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    let to_err = |e: csv::Error| Error::Schema(format!("csv write failed: {e}"));
    w.write_record(PRICE_HEADER).map_err(to_err)?;
    let mut price = String::new();
    for m in markets {
        for c in m.candidates() {
            for p in c.points() {
                price.clear();
                use std::fmt::Write as _;
                write!(price, "{}", p.price.value()).expect("write to string");
                let date = m.date_of(p.day_offset).format(DATE_FORMAT).to_string();
                w.write_record([
                    m.market_id.as_str(),
                    c.candidate_id.as_str(),
                    date.as_str(),
                    price.as_str(),
                    c.outcome.as_str(),
                ])
                .map_err(to_err)?;
            }
        }
    }
    w.flush().map_err(|e| Error::io("<price csv>", e))?;
    Ok(())
}

/// Shift every market so its latest trading day sits at offset 0.
///
/// Interior gaps stay gaps and markets keep their full length.
pub fn align_markets(markets: Vec<Market>) -> Result<Vec<Market>> {
    markets.into_iter().map(align_market).collect()
}

pub fn align_market(mut market: Market) -> Result<Market> {
    let last = market
        .last_offset()
        .ok_or_else(|| Error::EmptyMarket(market.market_id.clone()))?;
    if last != 0 {
        for c in market.candidates_mut() {
            c.shift(-last);
        }
        market.end_date += chrono::Duration::days(last);
    }
    Ok(market)
}

/// A dated text document.
#[derive(Debug, Clone, PartialEq)]
pub struct Document {
    pub doc_id: String,
    pub date: NaiveDate,
    pub source: String,
    pub text: String,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Corpus {
    pub documents: Vec<Document>,
}

impl Corpus {
    pub fn new(documents: Vec<Document>) -> Self {
        Corpus { documents }
    }

    pub fn len(&self) -> usize {
        self.documents.len()
    }

    pub fn is_empty(&self) -> bool {
        self.documents.is_empty()
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct DocumentRecord {
    doc_id: String,
    date: String,
    source: String,
    text: String,
}

pub fn load_corpus(path: impl AsRef<Path>) -> Result<Corpus> {
    let path = path.as_ref();
    let file = File::open(path).map_err(|e| Error::io(path, e))?;
    read_corpus(BufReader::new(file))
}

pub fn read_corpus<R: BufRead>(reader: R) -> Result<Corpus> {
    let mut documents = Vec::new();
    let mut seen = HashSet::new();
    for (idx, line) in reader.lines().enumerate() {
        let line_no = idx as u64 + 1;
        let line = line.map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: DocumentRecord = serde_json::from_str(&line).map_err(|e| Error::Parse {
            line: line_no,
            message: e.to_string(),
        })?;
        let date = parse_date(&rec.date).ok_or_else(|| Error::Parse {
            line: line_no,
            message: format!("unparseable date {:?}", rec.date),
        })?;
        if !seen.insert(rec.doc_id.clone()) {
            return Err(Error::DuplicateId {
                id: rec.doc_id,
                line: line_no,
            });
        }
        documents.push(Document {
            doc_id: rec.doc_id,
            date,
            source: rec.source,
            text: rec.text,
        });
    }
    Ok(Corpus { documents })
}

pub fn write_corpus<W: Write>(corpus: &Corpus, mut writer: W) -> Result<()> {
    for d in &corpus.documents {
        let value = serde_json::json!({
            "doc_id": d.doc_id,
            "date": d.date.format(DATE_FORMAT).to_string(),
            "source": d.source,
            "text": d.text,
        });
        writeln!(writer, "{value}").map_err(|e| Error::io("<corpus>", e))?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn load(s: &str) -> Result<Vec<Market>> {
        read_prices(s.as_bytes())
    }

    #[test]
    fn happy_path() {
        let csv = "market_id,candidate_id,date,price,outcome\n\
                   m,a,2000-11-05,0.5,won\n\
                   m,a,2000-11-06,0.6,\n\
                   m,a,2000-11-07,0.7,\n\
                   m,b,2000-11-05,0.5,lost\n\
                   m,b,2000-11-06,0.4,\n\
                   m,b,2000-11-07,0.3,\n";
        let markets = load(csv).unwrap();
        assert_eq!(markets.len(), 1);
        let m = &markets[0];
        assert_eq!(m.candidates().len(), 2);
        for c in m.candidates() {
            let offsets: Vec<i64> = c.points().iter().map(|p| p.day_offset).collect();
            assert_eq!(offsets, vec![-2, -1, 0]);
        }
        assert_eq!(m.end_date, NaiveDate::from_ymd_opt(2000, 11, 7).unwrap());
        assert_eq!(m.candidates()[0].outcome, Outcome::Won);
    }

    #[test]
    fn last_row_of_a_day_wins() {
        let csv = "market_id,candidate_id,date,price,outcome\n\
                   m,a,2000-11-07,0.4,won\n\
                   m,a,2000-11-07,0.6,\n";
        let m = &load(csv).unwrap()[0];
        assert_eq!(m.candidates()[0].points()[0].price.value(), 0.6);
    }

    #[test]
    fn two_winners_rejected() {
        let csv = "market_id,candidate_id,date,price,outcome\n\
                   m,a,2000-11-07,0.4,won\n\
                   m,b,2000-11-07,0.6,won\n";
        assert!(matches!(load(csv), Err(Error::Schema(_))));
    }

    #[test]
    fn missing_winner_rejected() {
        let csv = "market_id,candidate_id,date,price,outcome\n\
                   m,a,2000-11-07,0.4,lost\n\
                   m,b,2000-11-07,0.6,lost\n";
        assert!(matches!(load(csv), Err(Error::Schema(_))));
    }

    #[test]
    fn unlabelled_candidate_rejected() {
        let csv = "market_id,candidate_id,date,price,outcome\nm,a,2000-11-07,0.4,\n";
        assert!(matches!(load(csv), Err(Error::Schema(_))));
    }

    #[test]
    fn negative_price_rejected() {
        let csv = "market_id,candidate_id,date,price,outcome\nm,a,2000-11-07,-0.1,won\n";
        assert!(matches!(load(csv), Err(Error::Schema(_))));
    }

    #[test]
    fn malformed_row_reports_line() {
        let csv = "market_id,candidate_id,date,price,outcome\n\
                   m,a,2000-11-07,0.4,won\n\
                   m,a,not-a-date,0.4,\n";
        match load(csv) {
            Err(Error::Parse { line, .. }) => assert_eq!(line, 3),
            other => panic!("expected parse error, got {other:?}"),
        }
        let csv = "market_id,candidate_id,date,price,outcome\nm,a,2000-11-07,abc,won\n";
        assert!(matches!(load(csv), Err(Error::Parse { line: 2, .. })));
    }

    #[test]
    fn bad_header_and_empty_file() {
        assert!(matches!(load(""), Err(Error::Schema(_))));
        assert!(matches!(load("a,b,c\n"), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn csv_round_trip() {
        let csv = "market_id,candidate_id,date,price,outcome\n\
                   x,a,2000-05-01,0.25,won\n\
                   x,a,2000-05-03,0.125,\n\
                   x,b,2000-05-01,0.75,lost\n\
                   y,only,1996-08-06,0.1,lost\n";
        let markets = load(csv).unwrap();
        let mut buf = Vec::new();
        write_prices(&markets, &mut buf).unwrap();
        let again = read_prices(buf.as_slice()).unwrap();
        assert_eq!(markets, again);
    }

    #[test]
    fn alignment() {
        let csv = "market_id,candidate_id,date,price,outcome\n\
                   m,a,2000-11-06,0.4,won\n\
                   m,a,2000-11-07,0.6,\n";
        let markets = load(csv).unwrap();
        let aligned = align_markets(markets.clone()).unwrap();
        assert_eq!(aligned, markets);
        let m = &aligned[0];
        assert_eq!(m.date_of(0), NaiveDate::from_ymd_opt(2000, 11, 7).unwrap());
        assert_eq!(m.date_of(-1), NaiveDate::from_ymd_opt(2000, 11, 6).unwrap());

        // a market whose offsets do not end at zero gets shifted
        let end = NaiveDate::from_ymd_opt(2000, 11, 7).unwrap();
        let c = CandidateSeries::new(
            "s",
            "a",
            Outcome::Won,
            vec![PricePoint::new(-3, Probability::HALF)],
        )
        .unwrap();
        let shifted = align_market(Market::new("s", end, vec![c]).unwrap()).unwrap();
        assert_eq!(shifted.candidates()[0].points()[0].day_offset, 0);
        assert_eq!(shifted.end_date, NaiveDate::from_ymd_opt(2000, 11, 4).unwrap());
        assert_eq!(align_market(shifted.clone()).unwrap(), shifted);
    }

    #[test]
    fn corpus_loading() {
        let ok = r#"{"doc_id":"1","date":"2000-04-27","source":"ny.politics","text":"prostate cancer"}
{"doc_id":"2","date":"2000-04-28","source":"ny.politics","text":""}
{"doc_id":"3","date":"2000-04-29","source":"wapo","text":"cancer diagnosis"}
"#;
        let c = read_corpus(ok.as_bytes()).unwrap();
        assert_eq!(c.len(), 3);

        let missing = r#"{"doc_id":"1","date":"2000-04-27","source":"s","text":"a"}
{"doc_id":"2","source":"s","text":"b"}
"#;
        assert!(matches!(read_corpus(missing.as_bytes()), Err(Error::Parse { line: 2, .. })));

        let dup = r#"{"doc_id":"1","date":"2000-04-27","source":"s","text":"a"}
{"doc_id":"1","date":"2000-04-28","source":"s","text":"b"}
"#;
        assert!(matches!(read_corpus(dup.as_bytes()), Err(Error::DuplicateId { .. })));

        let extra = r#"{"doc_id":"1","date":"2000-04-27","source":"s","text":"a","x":1}"#;
        assert!(matches!(read_corpus(extra.as_bytes()), Err(Error::Parse { line: 1, .. })));
    }

    #[test]
    fn corpus_round_trip() {
        let c = Corpus::new(vec![Document {
            doc_id: "a\"b".into(),
            date: NaiveDate::from_ymd_opt(1996, 8, 6).unwrap(),
            source: "sci.space.news".into(),
            text: "Martian meteorite, \"life\"\non Mars".into(),
        }]);
        let mut buf = Vec::new();
        write_corpus(&c, &mut buf).unwrap();
        assert_eq!(read_corpus(buf.as_slice()).unwrap(), c);
    }
}
