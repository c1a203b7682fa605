//! Command-line front end.
//!
//! Exit status: 0 on success, 1 when a validation check fails, 2 on usage
//! or input errors.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

use crate::analytics::{
    average_log_score_curve, empirical_density, epsilon_samples, run_validation,
    signed_log_edges, winner_loser_ratio, ValidationConfig, DEFAULT_WINDOW,
};
use crate::detect::{detect_all, detect_pooled, DetectPolicy, DEFAULT_Z_THRESHOLD};
use crate::error::{Error, Result};
use crate::explain::{
    rank_features, split_corpus, RankConfig, SplitSpec, Stoplist, DEFAULT_MIN_POS_FRACTION,
    DEFAULT_POSITIVE_WINDOW_DAYS, DEFAULT_TOP_K,
};
use crate::ingest::{load_corpus, load_prices, parse_date, write_prices};
use crate::manifest::RunManifest;
use crate::sim::{simulate_ensemble, SimConfig, RNG_ALGORITHM};

pub const EXIT_OK: i32 = 0;
pub const EXIT_VALIDATION_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

/// Smallest and largest |epsilon| of the log-spaced ratio bins.
pub const RATIO_MIN_ABS: f64 = 0.01;
pub const RATIO_MAX_ABS: f64 = 10.0;

#[derive(Debug, Parser)]
#[command(name = "infomarket", version, about = "Analyze betting-market price series")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Simulate an ensemble of coin-flip markets.
    Simulate(SimulateArgs),
    /// Average logarithmic score by days before close.
    Score(ScoreArgs),
    /// Density of daily log-likelihood changes.
    Dist(DistArgs),
    /// Winner/loser frequency ratio of log-likelihood changes.
    Ratio(RatioArgs),
    /// Statistical checks of efficient pricing.
    Validate(ValidateArgs),
    /// Days with unusually large log-likelihood changes.
    Detect(DetectArgs),
    /// Rank text features around a pivotal date.
    Explain(ExplainArgs),
}

#[derive(Debug, Args, Serialize)]
struct OutArg {
    /// Output CSV; standard output when omitted. A `.manifest` sidecar is
    /// written next to it.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args, Serialize)]
struct SimulateArgs {
    #[arg(long, default_value_t = 1200)]
    n: u64,
    #[arg(long, default_value_t = 2)]
    flips_per_step: u64,
    #[arg(long, default_value_t = 22)]
    markets: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Debug, Args, Serialize)]
struct ScoreArgs {
    prices: PathBuf,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Debug, Args, Serialize)]
struct DistArgs {
    prices: PathBuf,
    /// Rank offset of the density estimator.
    #[arg(long, default_value_t = DEFAULT_WINDOW)]
    window: usize,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Debug, Args, Serialize)]
struct RatioArgs {
    prices: PathBuf,
    /// Log-spaced bins on each side of zero.
    #[arg(long, default_value_t = 10)]
    bins: usize,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Debug, Args, Serialize)]
struct ValidateArgs {
    prices: PathBuf,
    /// Equal-width price bins.
    #[arg(long, default_value_t = 20)]
    bins: usize,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Debug, Clone, Copy, ValueEnum, Serialize)]
#[serde(rename_all = "snake_case")]
enum Method {
    #[value(name = "robust_z")]
    RobustZ,
    #[value(name = "abs_threshold")]
    AbsThreshold,
    #[value(name = "top_k")]
    TopK,
}

#[derive(Debug, Args, Serialize)]
struct DetectArgs {
    prices: PathBuf,
    #[arg(long, value_enum, default_value_t = Method::RobustZ)]
    method: Method,
    /// Defaults to 4 for robust_z; required for abs_threshold.
    #[arg(long)]
    threshold: Option<f64>,
    /// Required for top_k.
    #[arg(long)]
    k: Option<usize>,
    /// Threshold against all series together instead of each separately.
    #[arg(long)]
    pooled: bool,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

#[derive(Debug, Args, Serialize)]
struct ExplainArgs {
    corpus: PathBuf,
    #[arg(long, value_parser = parse_pivot)]
    pivot: chrono::NaiveDate,
    #[arg(long, default_value_t = DEFAULT_POSITIVE_WINDOW_DAYS)]
    pos_window_days: u32,
    /// Bound on how far before the pivot negative documents may lie.
    #[arg(long)]
    neg_window_days: Option<u32>,
    #[arg(long, default_value_t = DEFAULT_MIN_POS_FRACTION)]
    min_pos_fraction: f64,
    /// Newline-separated features to drop.
    #[arg(long)]
    stoplist: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TOP_K)]
    top_k: usize,
    #[command(flatten)]
    #[serde(flatten)]
    out: OutArg,
}

fn parse_pivot(s: &str) -> std::result::Result<chrono::NaiveDate, String> {
    parse_date(s).ok_or_else(|| format!("expected YYYY-MM-DD, got {s:?}"))
}

enum Failure {
    Usage(String),
    Validation,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        Failure::Usage(e.to_string())
    }
}

/// Parses `args` (program name first), runs the command and returns the
/// exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match run(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Validation) => EXIT_VALIDATION_FAILED,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
    }
}

/// Bytes written to `--out` or standard output, plus its manifest.
fn emit(out: &OutArg, bytes: &[u8], manifest: RunManifest) -> Result<()> {
    match &out.out {
        Some(path) => {
            std::fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
            let mut manifest = manifest;
            manifest.set_output(path)?;
            manifest.write_beside(path)?;
        }
        None => {
            let mut stdout = std::io::stdout().lock();
            match stdout.write_all(bytes).and_then(|_| stdout.flush()) {
                Err(e) if e.kind() != std::io::ErrorKind::BrokenPipe => {
                    return Err(Error::io("<stdout>", e));
                }
                _ => {}
            }
        }
    }
    Ok(())
}

fn manifest_for(command: &str, args: &impl Serialize, inputs: &[&Path]) -> Result<RunManifest> {
    let mut m = RunManifest::new(command, args)?;
    for p in inputs {
        m.add_input(p)?;
    }
    Ok(m)
}

fn csv_bytes<F>(header: &[&str], fill: F) -> Result<Vec<u8>>
where
    F: FnOnce(&mut csv::Writer<&mut Vec<u8>>) -> csv::Result<()>,
{
    let mut buf = Vec::new();
    {
        let mut w = csv::Writer::from_writer(&mut buf);
        let to_err = |e: csv::Error| Error::Schema(format!("csv write failed: {e}"));
        w.write_record(header).map_err(to_err)?;
        fill(&mut w).map_err(to_err)?;
        w.flush().map_err(|e| Error::io("<csv>", e))?;
    }
    Ok(buf)
}

fn run(command: Command) -> std::result::Result<(), Failure> {
    match command {
        Command::Simulate(a) => simulate(a)?,
        Command::Score(a) => score(a)?,
        Command::Dist(a) => dist(a)?,
        Command::Ratio(a) => ratio(a)?,
        Command::Validate(a) => return validate(a),
        Command::Detect(a) => detect(a)?,
        Command::Explain(a) => explain(a)?,
    }
    Ok(())
}

fn simulate(a: SimulateArgs) -> Result<()> {
    let config = SimConfig {
        n: a.n,
        flips_per_step: a.flips_per_step,
        num_markets: a.markets,
        seed: a.seed,
        ..SimConfig::default()
    };
    let markets = simulate_ensemble(&config)?;
    let mut buf = Vec::new();
    write_prices(&markets, &mut buf)?;
    let manifest = RunManifest::new("simulate", &config)?.seeded(config.seed, RNG_ALGORITHM);
    emit(&a.out, &buf, manifest)
}

fn score(a: ScoreArgs) -> Result<()> {
    let markets = load_prices(&a.prices)?;
    let curve = average_log_score_curve(&markets)?;
    let bytes = csv_bytes(&["day_offset", "mean_score", "num_markets"], |w| {
        for p in &curve.points {
            w.write_record([
                p.day_offset.to_string(),
                p.mean_score.to_string(),
                p.num_markets.to_string(),
            ])?;
        }
        Ok(())
    })?;
    emit(&a.out, &bytes, manifest_for("score", &a, &[&a.prices])?)
}

fn dist(a: DistArgs) -> Result<()> {
    if a.window == 0 {
        return Err(Error::InvalidConfig("--window must be positive".into()));
    }
    let markets = load_prices(&a.prices)?;
    let values: Vec<f64> = epsilon_samples(&markets).iter().map(|s| s.value).collect();
    let density = empirical_density(&values, a.window)?;
    let bytes = csv_bytes(&["epsilon", "density"], |w| {
        for p in &density.points {
            w.write_record([p.epsilon.to_string(), p.density.to_string()])?;
        }
        Ok(())
    })?;
    emit(&a.out, &bytes, manifest_for("dist", &a, &[&a.prices])?)
}

#[derive(Serialize)]
struct Resolved<'a, A: Serialize, C: Serialize> {
    #[serde(flatten)]
    args: &'a A,
    resolved: C,
}

fn ratio(a: RatioArgs) -> Result<()> {
    let edges = signed_log_edges(RATIO_MIN_ABS, RATIO_MAX_ABS, a.bins)?;
    let markets = load_prices(&a.prices)?;
    let bins = winner_loser_ratio(&epsilon_samples(&markets), &edges)?;
    let header = ["bin_center", "ratio", "theory", "count_won", "count_lost"];
    let bytes = csv_bytes(&header, |w| {
        for b in &bins {
            w.write_record([
                b.bin_center.to_string(),
                b.ratio.map(|r| r.to_string()).unwrap_or_default(),
                b.theory.to_string(),
                b.count_won.to_string(),
                b.count_lost.to_string(),
            ])?;
        }
        Ok(())
    })?;
    let resolved = Resolved { args: &a, resolved: edges };
    emit(&a.out, &bytes, manifest_for("ratio", &resolved, &[&a.prices])?)
}

fn validate(a: ValidateArgs) -> std::result::Result<(), Failure> {
    let config = ValidationConfig {
        price_bins: a.bins,
        ..ValidationConfig::default()
    };
    if a.bins == 0 {
        return Err(Error::InvalidConfig("--bins must be positive".into()).into());
    }
    let markets = load_prices(&a.prices)?;
    let report = run_validation(&markets, &config)?;
    let header = ["check", "cells_tested", "cells_passed", "statistic", "bound", "passed", "detail"];
    let bytes = csv_bytes(&header, |w| {
        for c in &report.checks {
            w.write_record([
                c.name.to_string(),
                c.cells_tested.to_string(),
                c.cells_passed.to_string(),
                c.statistic.to_string(),
                c.bound.to_string(),
                c.passed.to_string(),
                c.detail.clone(),
            ])?;
        }
        Ok(())
    })?;
    let resolved = Resolved { args: &a, resolved: &config };
    emit(&a.out, &bytes, manifest_for("validate", &resolved, &[&a.prices])?)?;
    if report.all_passed() {
        Ok(())
    } else {
        for c in report.checks.iter().filter(|c| !c.passed) {
            eprintln!("check failed: {} ({} vs bound {})", c.name, c.statistic, c.bound);
        }
        Err(Failure::Validation)
    }
}

fn detect(a: DetectArgs) -> Result<()> {
    let policy = match a.method {
        Method::RobustZ => DetectPolicy::RobustZ {
            threshold: a.threshold.unwrap_or(DEFAULT_Z_THRESHOLD),
        },
        Method::AbsThreshold => DetectPolicy::AbsThreshold {
            threshold: a.threshold.ok_or_else(|| {
                Error::InvalidConfig("--method abs_threshold needs --threshold".into())
            })?,
        },
        Method::TopK => DetectPolicy::TopK {
            k: a.k.ok_or_else(|| Error::InvalidConfig("--method top_k needs --k".into()))?,
        },
    };
    if let DetectPolicy::RobustZ { threshold } | DetectPolicy::AbsThreshold { threshold } = policy {
        if !threshold.is_finite() || threshold < 0.0 {
            return Err(Error::InvalidConfig(format!("invalid --threshold {threshold}")));
        }
    }
    let markets = load_prices(&a.prices)?;
    let hits = if a.pooled {
        detect_pooled(&markets, &policy)?
    } else {
        detect_all(&markets, &policy)?
    };
    let header = ["market_id", "candidate_id", "date", "delta_ll", "robust_z"];
    let bytes = csv_bytes(&header, |w| {
        for h in &hits {
            w.write_record([
                h.market_id.clone(),
                h.candidate_id.clone(),
                h.date.format("%Y-%m-%d").to_string(),
                h.delta_ll.to_string(),
                h.robust_z.to_string(),
            ])?;
        }
        Ok(())
    })?;
    let resolved = Resolved { args: &a, resolved: policy };
    emit(&a.out, &bytes, manifest_for("detect", &resolved, &[&a.prices])?)
}

fn explain(a: ExplainArgs) -> Result<()> {
    if a.pos_window_days == 0 || a.neg_window_days == Some(0) {
        return Err(Error::InvalidConfig("window lengths must be positive".into()));
    }
    let corpus = load_corpus(&a.corpus)?;
    let stoplist = match &a.stoplist {
        Some(p) => Stoplist::load(p)?,
        None => Stoplist::default(),
    };
    let spec = SplitSpec {
        pivot_date: a.pivot,
        positive_window_days: a.pos_window_days,
        negative_window_days: a.neg_window_days,
    };
    let (neg, pos) = split_corpus(&corpus, &spec)?;
    let config = RankConfig {
        min_pos_fraction: a.min_pos_fraction,
        stoplist,
        top_k: Some(a.top_k),
    };
    let ranked = rank_features(&pos, &neg, &config)?;
    let header = ["rank", "feature", "entropy_loss", "pos_df", "neg_df"];
    let bytes = csv_bytes(&header, |w| {
        for (i, f) in ranked.iter().enumerate() {
            w.write_record([
                (i + 1).to_string(),
                f.feature.clone(),
                f.entropy_loss.to_string(),
                f.pos_df.to_string(),
                f.neg_df.to_string(),
            ])?;
        }
        Ok(())
    })?;
    let mut inputs: Vec<&Path> = vec![&a.corpus];
    if let Some(p) = &a.stoplist {
        inputs.push(p);
    }
    let resolved = Resolved { args: &a, resolved: (&spec, &config) };
    emit(&a.out, &bytes, manifest_for("explain", &resolved, &inputs)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn code(args: &[&str]) -> i32 {
        main_with_args(std::iter::once("infomarket").chain(args.iter().copied()))
    }

    #[test]
    fn usage_errors_exit_2() {
        assert_eq!(code(&[]), EXIT_USAGE);
        assert_eq!(code(&["simulate", "--markets", "0"]), EXIT_USAGE);
        assert_eq!(code(&["simulate", "--n", "x"]), EXIT_USAGE);
        assert_eq!(code(&["explain", "c.jsonl", "--pivot", "May 19"]), EXIT_USAGE);
        assert_eq!(code(&["detect", "missing.csv"]), EXIT_USAGE);
        assert_eq!(code(&["detect", "x.csv", "--method", "median"]), EXIT_USAGE);
    }

    #[test]
    fn help_exits_0() {
        assert_eq!(code(&["--help"]), EXIT_OK);
        assert_eq!(code(&["score", "--help"]), EXIT_OK);
    }

    #[test]
    fn definition_is_consistent() {
        use clap::CommandFactory;
        Cli::command().debug_assert();
    }
}
