use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use infomarket::ingest::{write_corpus, write_prices};
use infomarket::sim::{simulate_ensemble, SimConfig};
use infomarket::synth::{biased_ensemble, jump_series, planted_corpus};

const BIN: &str = env!("CARGO_BIN_EXE_infomarket");

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn rows(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records().map(|x| x.unwrap().iter().map(String::from).collect()).collect()
}

fn header(path: &Path) -> String {
    std::fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

struct Dir(tempfile::TempDir);

impl Dir {
    fn new() -> Self {
        Dir(tempfile::tempdir().unwrap())
    }
    fn path(&self, name: &str) -> PathBuf {
        self.0.path().join(name)
    }
}

#[test]
fn simulate_paper_defaults() {
    let d = Dir::new();
    let out = d.path("p.csv");
    let o = run(&["simulate", "--n", "1200", "--flips-per-step", "2", "--markets", "22", "--seed", "7", "--out", s(&out)]);
    assert!(o.status.success());
    let r = rows(&out);
    assert_eq!(r.len(), 22 * 601);
    let ids: std::collections::BTreeSet<_> = r.iter().map(|x| x[0].clone()).collect();
    assert_eq!(ids.len(), 22);
    let manifest = std::fs::read_to_string(d.path("p.csv.manifest")).unwrap();
    assert!(manifest.contains("seed: 7"));
    assert!(manifest.contains("\"num_markets\":22"));
}

#[test]
fn simulate_rejects_bad_flags() {
    for args in [
        vec!["simulate", "--markets", "0"],
        vec!["simulate", "--n", "0"],
        vec!["simulate", "--flips-per-step", "0"],
        vec!["simulate", "--bogus"],
    ] {
        let o = run(&args);
        assert_eq!(o.status.code(), Some(2), "{args:?}");
        assert!(!o.stderr.is_empty());
    }
}

#[test]
fn score_ends_at_zero() {
    let d = Dir::new();
    let prices = d.path("p.csv");
    let curve = d.path("c.csv");
    assert!(run(&["simulate", "--n", "80", "--markets", "5", "--out", s(&prices)]).status.success());
    assert!(run(&["score", s(&prices), "--out", s(&curve)]).status.success());
    assert_eq!(header(&curve), "day_offset,mean_score,num_markets");
    let r = rows(&curve);
    assert_eq!(r.last().unwrap(), &["0", "0", "5"]);
}

#[test]
fn score_counts_markets_per_offset() {
    let d = Dir::new();
    let prices = d.path("p.csv");
    std::fs::write(
        &prices,
        "market_id,candidate_id,date,price,outcome\n\
         a,x,2000-01-01,0.5,won\na,x,2000-01-02,0.6,won\na,x,2000-01-03,0.7,won\n\
         b,y,2000-02-01,0.5,lost\nb,y,2000-02-02,0.4,lost\nb,y,2000-02-03,0.3,lost\n\
         b,y,2000-02-04,0.2,lost\nb,y,2000-02-05,0.1,lost\n",
    )
    .unwrap();
    let curve = d.path("c.csv");
    assert!(run(&["score", s(&prices), "--out", s(&curve)]).status.success());
    let counts: Vec<(String, String)> = rows(&curve).into_iter().map(|r| (r[0].clone(), r[2].clone())).collect();
    let expect = [("-4", "1"), ("-3", "1"), ("-2", "2"), ("-1", "2"), ("0", "2")];
    assert_eq!(counts, expect.map(|(a, b)| (a.to_string(), b.to_string())));
}

#[test]
fn input_errors_exit_2() {
    let d = Dir::new();
    let empty = d.path("empty.csv");
    std::fs::write(&empty, "").unwrap();
    assert_eq!(run(&["score", s(&empty)]).status.code(), Some(2));

    let bad = d.path("bad.csv");
    std::fs::write(&bad, "market_id,candidate_id,date,price,outcome\nm,c,2000-01-01,abc,won\n").unwrap();
    let o = run(&["score", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("line 2"));

    let prices = d.path("p.csv");
    assert!(run(&["simulate", "--n", "40", "--markets", "3", "--out", s(&prices)]).status.success());
    assert_eq!(run(&["validate", s(&prices), "--bins", "0"]).status.code(), Some(2));
    assert_eq!(run(&["ratio", s(&prices), "--bins", "0"]).status.code(), Some(2));
    assert_eq!(run(&["dist", s(&prices), "--window", "0"]).status.code(), Some(2));
    assert_eq!(run(&["detect", s(&prices), "--method", "top_k"]).status.code(), Some(2));
}

#[test]
fn dist_and_ratio_headers() {
    let d = Dir::new();
    let prices = d.path("p.csv");
    assert!(run(&["simulate", "--n", "100", "--flips-per-step", "1", "--markets", "200", "--out", s(&prices)]).status.success());
    let dist = d.path("d.csv");
    assert!(run(&["dist", s(&prices), "--out", s(&dist)]).status.success());
    assert_eq!(header(&dist), "epsilon,density");
    assert!(rows(&dist).len() > 100);
    let ratio = d.path("r.csv");
    assert!(run(&["ratio", s(&prices), "--bins", "6", "--out", s(&ratio)]).status.success());
    assert_eq!(header(&ratio), "bin_center,ratio,theory,count_won,count_lost");
    assert_eq!(rows(&ratio).len(), 13);
}

#[test]
fn validate_large_ensemble_passes_and_biased_fails() {
    let d = Dir::new();
    let config = SimConfig { n: 100, flips_per_step: 1, num_markets: 10_000, seed: 0, ..SimConfig::default() };
    let markets = simulate_ensemble(&config).unwrap();
    let fair = d.path("fair.csv");
    write_prices(&markets, std::fs::File::create(&fair).unwrap()).unwrap();
    let report = d.path("fair-report.csv");
    let o = run(&["validate", s(&fair), "--out", s(&report)]);
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(rows(&report).len(), 5);
    assert!(rows(&report).iter().all(|r| r[5] == "true"));

    let biased = d.path("biased.csv");
    let shifted = biased_ensemble(&markets, 0.05).unwrap();
    write_prices(&shifted, std::fs::File::create(&biased).unwrap()).unwrap();
    let report = d.path("biased-report.csv");
    let o = run(&["validate", s(&biased), "--out", s(&report)]);
    assert_eq!(o.status.code(), Some(1));
    let martingale = rows(&report).into_iter().find(|r| r[0] == "martingale").unwrap();
    assert_eq!(martingale[5], "false");
}

#[test]
fn detect_fixtures() {
    let d = Dir::new();
    let js = jump_series(3, 60, 0.05, 1.0).unwrap();
    let prices = d.path("jump.csv");
    write_prices(&[js.market.clone()], std::fs::File::create(&prices).unwrap()).unwrap();
    let events = d.path("e.csv");
    assert!(run(&["detect", s(&prices), "--out", s(&events)]).status.success());
    assert_eq!(header(&events), "market_id,candidate_id,date,delta_ll,robust_z");
    let r = rows(&events);
    assert_eq!(r.len(), 1);
    assert_eq!(r[0][2], js.jump_date.format("%Y-%m-%d").to_string());

    assert!(run(&["detect", s(&prices), "--method", "top_k", "--k", "3", "--out", s(&events)]).status.success());
    assert_eq!(rows(&events).len(), 3);

    let flat = d.path("flat.csv");
    let mut text = String::from("market_id,candidate_id,date,price,outcome\n");
    for day in 1..=20 {
        text.push_str(&format!("m,c,2000-01-{day:02},0.4,won\n"));
    }
    std::fs::write(&flat, text).unwrap();
    assert!(run(&["detect", s(&flat), "--out", s(&events)]).status.success());
    assert_eq!(std::fs::read_to_string(&events).unwrap(), "market_id,candidate_id,date,delta_ll,robust_z\n");
}

#[test]
fn explain_fixtures() {
    let d = Dir::new();
    let pc = planted_corpus(9);
    let corpus = d.path("c.jsonl");
    write_corpus(&pc.corpus, std::fs::File::create(&corpus).unwrap()).unwrap();
    let out = d.path("x.csv");
    assert!(run(&["explain", s(&corpus), "--pivot", "2000-05-19", "--out", s(&out)]).status.success());
    assert_eq!(header(&out), "rank,feature,entropy_loss,pos_df,neg_df");
    let r = rows(&out);
    assert_eq!(r.len(), 10);
    assert_eq!((r[0][0].as_str(), r[0][1].as_str()), ("1", pc.primary));
    assert_eq!((r[0][3].as_str(), r[0][4].as_str()), ("20", "0"));

    let stop = d.path("stop.txt");
    std::fs::write(&stop, format!("{}\n", pc.primary)).unwrap();
    assert!(run(&["explain", s(&corpus), "--pivot", "2000-05-19", "--stoplist", s(&stop), "--out", s(&out)]).status.success());
    assert_eq!(rows(&out)[0][1], pc.secondary);

    assert_eq!(run(&["explain", s(&corpus), "--pivot", "19/05/2000"]).status.code(), Some(2));
    assert_eq!(run(&["explain", s(&corpus), "--pivot", "1990-01-01"]).status.code(), Some(2));
}
