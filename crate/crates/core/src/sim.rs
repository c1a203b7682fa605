//! Coin-flip model of information release.
//!
//! The event is "at least ⌈n/2⌉ tails in n fair flips". Flips are revealed
//! one at a time and the price after `k` flips with `i` tails is the exact
//! probability of the event given what has been revealed, so every simulated
//! price path is a martingale.

use chrono::NaiveDate;
use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::model::{CandidateSeries, Market, Outcome, PricePoint, Probability};

/// Description of the flip stream, written into run manifests.
pub const RNG_ALGORITHM: &str = "ChaCha8 (rand_chacha 0.9); key = seed as 8 little-endian bytes \
zero-padded to 32; stream = market_index; flips are bits of successive 64-bit output words, \
least significant first, 1 = tails";

/// Calendar date given to offset 0 of simulated markets.
pub const SIM_END_DATE: (i32, u32, u32) = (2000, 11, 7);

pub fn sim_end_date() -> NaiveDate {
    let (y, m, d) = SIM_END_DATE;
    NaiveDate::from_ymd_opt(y, m, d).expect("valid constant date")
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimConfig {
    /// Total number of coin flips.
    pub n: u64,
    /// Tails among the flips already known at the start.
    pub i0: u64,
    /// Flips already known at the start.
    pub k0: u64,
    /// Flips revealed between recorded prices.
    pub flips_per_step: u64,
    pub num_markets: usize,
    pub seed: u64,
}

impl Default for SimConfig {
    fn default() -> Self {
        SimConfig {
            n: 1200,
            i0: 0,
            k0: 0,
            flips_per_step: 2,
            num_markets: 22,
            seed: 0,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if self.n == 0 {
            return bad("n must be positive".into());
        }
        if self.i0 > self.k0 || self.k0 > self.n {
            return bad(format!(
                "need i0 <= k0 <= n, got i0={}, k0={}, n={}",
                self.i0, self.k0, self.n
            ));
        }
        if self.flips_per_step == 0 {
            return bad("flips_per_step must be positive".into());
        }
        if self.num_markets == 0 {
            return bad("num_markets must be positive".into());
        }
        Ok(())
    }

    /// Tails needed for the event: ⌈n/2⌉.
    pub fn tails_needed(&self) -> u64 {
        self.n.div_ceil(2)
    }

    /// Number of recorded prices per market, including the initial one.
    pub fn points_per_market(&self) -> usize {
        1 + (self.n - self.k0).div_ceil(self.flips_per_step) as usize
    }
}

/// Running tally: `i` tails among `k` revealed flips.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct SimState {
    pub i: u64,
    pub k: u64,
}

impl SimState {
    pub fn reveal(&mut self, tails: bool) {
        self.k += 1;
        self.i += u64::from(tails);
    }
}

/// Upper-tail sums of Binomial(m, 1/2), accumulated in log space from the
/// top term downward. Calls `visit(r, ln P[X >= r])` for r = m, m-1, ..., lowest.
fn accumulate_upper_tail(m: u64, lowest: u64, mut visit: impl FnMut(u64, f64)) {
    let ln2 = std::f64::consts::LN_2;
    let mut ln_choose = 0.0; // ln C(m, m)
    let mut acc = -(m as f64) * ln2;
    visit(m, acc);
    let mut j = m;
    while j > lowest {
        // C(m, j-1) = C(m, j) * j / (m - j + 1)
        ln_choose += (j as f64 / (m - j + 1) as f64).ln();
        j -= 1;
        let term = ln_choose - (m as f64) * ln2;
        acc = log_add_exp(acc, term);
        visit(j, acc);
    }
}

#[inline]
fn log_add_exp(a: f64, b: f64) -> f64 {
    let (hi, lo) = if a >= b { (a, b) } else { (b, a) };
    hi + (lo - hi).exp().ln_1p()
}

#[inline]
fn tail_from_log(ln_tail: f64) -> f64 {
    ln_tail.exp().min(1.0)
}

/// Probability of the event given `i` tails among `k` revealed flips:
/// `(1/2)^(n-k) * sum_{j = ⌈n/2⌉ - i}^{n-k} C(n-k, j)`.
pub fn event_probability(n: u64, i: u64, k: u64) -> Result<Probability> {
    if i > k || k > n {
        return Err(Error::InvalidState { n, i, k });
    }
    let remaining = n - k;
    let needed = n.div_ceil(2).saturating_sub(i);
    if needed == 0 {
        return Ok(Probability::ONE);
    }
    if needed > remaining {
        return Ok(Probability::ZERO);
    }
    let mut ln_tail = f64::NEG_INFINITY;
    accumulate_upper_tail(remaining, needed, |_, acc| ln_tail = acc);
    Probability::new(tail_from_log(ln_tail))
}

/// Event probabilities for every tail count at a fixed set of flip counts.
///
/// Rows are filled with the same accumulation as [`event_probability`], so
/// lookups return bit-identical values.
#[derive(Debug, Clone)]
pub struct PriceTable {
    n: u64,
    first_k: u64,
    step: u64,
    // rows[s][r] = P[at least r more tails in n - k flips], k = first_k + s*step (or n)
    rows: Vec<Vec<f64>>,
    row_k: Vec<u64>,
}

impl PriceTable {
    /// Table for the flip counts recorded under `config`.
    pub fn for_config(config: &SimConfig) -> Result<Self> {
        config.validate()?;
        let mut row_k: Vec<u64> = (config.k0..=config.n).step_by(config.flips_per_step as usize).collect();
        if *row_k.last().expect("non-empty") != config.n {
            row_k.push(config.n);
        }
        let rows = row_k
            .par_iter()
            .map(|&k| {
                let m = config.n - k;
                let mut row = vec![0.0; m as usize + 2];
                row[0] = 1.0;
                accumulate_upper_tail(m, 1.min(m), |r, acc| {
                    if r > 0 {
                        row[r as usize] = tail_from_log(acc);
                    }
                });
                row
            })
            .collect();
        Ok(PriceTable {
            n: config.n,
            first_k: config.k0,
            step: config.flips_per_step,
            rows,
            row_k,
        })
    }

    pub fn get(&self, state: SimState) -> Option<Probability> {
        let idx = if state.k == self.n {
            self.rows.len() - 1
        } else {
            let off = state.k.checked_sub(self.first_k)?;
            if off % self.step != 0 {
                return None;
            }
            (off / self.step) as usize
        };
        if self.row_k.get(idx) != Some(&state.k) || state.i > state.k {
            return None;
        }
        let needed = self.n.div_ceil(2).saturating_sub(state.i) as usize;
        let row = &self.rows[idx];
        Some(Probability::new(row.get(needed).copied().unwrap_or(0.0)).expect("tail in [0, 1]"))
    }
}

/// Flip stream for one market.
pub struct FlipStream {
    rng: ChaCha8Rng,
    word: u64,
    bits_left: u32,
}

impl FlipStream {
    pub fn new(seed: u64, market_index: u64) -> Self {
        let mut key = [0u8; 32];
        key[..8].copy_from_slice(&seed.to_le_bytes());
        let mut rng = ChaCha8Rng::from_seed(key);
        rng.set_stream(market_index);
        FlipStream {
            rng,
            word: 0,
            bits_left: 0,
        }
    }

    /// Next flip; `true` is tails.
    pub fn next_flip(&mut self) -> bool {
        if self.bits_left == 0 {
            self.word = self.rng.next_u64();
            self.bits_left = 64;
        }
        let bit = self.word & 1 == 1;
        self.word >>= 1;
        self.bits_left -= 1;
        bit
    }
}

pub fn market_id(market_index: usize) -> String {
    format!("sim-{market_index:06}")
}

pub const SIM_CANDIDATE_ID: &str = "event";

/// Simulate one market: reveal the remaining flips and record the price
/// initially and after every `flips_per_step` flips (plus a final point if
/// the last group is short). The final point sits at offset 0.
pub fn simulate_market(config: &SimConfig, market_index: usize) -> Result<CandidateSeries> {
    config.validate()?;
    run_market(config, market_index, |s| event_probability(config.n, s.i, s.k))
}

fn run_market(
    config: &SimConfig,
    market_index: usize,
    mut price: impl FnMut(SimState) -> Result<Probability>,
) -> Result<CandidateSeries> {
    let total = config.points_per_market();
    let mut flips = FlipStream::new(config.seed, market_index as u64);
    let mut state = SimState {
        i: config.i0,
        k: config.k0,
    };
    let mut points = Vec::with_capacity(total);
    let mut offset = -(total as i64 - 1);
    points.push(PricePoint::new(offset, price(state)?));
    while state.k < config.n {
        let batch = config.flips_per_step.min(config.n - state.k);
        for _ in 0..batch {
            state.reveal(flips.next_flip());
        }
        offset += 1;
        points.push(PricePoint::new(offset, price(state)?));
    }
    debug_assert_eq!(offset, 0);
    let outcome = if state.i >= config.tails_needed() {
        Outcome::Won
    } else {
        Outcome::Lost
    };
    CandidateSeries::new(market_id(market_index), SIM_CANDIDATE_ID, outcome, points)
}

/// `num_markets` independent single-candidate markets, ordered by index.
pub fn simulate_ensemble(config: &SimConfig) -> Result<Vec<Market>> {
    let table = PriceTable::for_config(config)?;
    let end = sim_end_date();
    (0..config.num_markets)
        .into_par_iter()
        .map(|idx| {
            let series = run_market(config, idx, |s| {
                table
                    .get(s)
                    .ok_or(Error::InvalidState { n: config.n, i: s.i, k: s.k })
            })?;
            Market::new(series.market_id.clone(), end, vec![series])
        })
        .collect()
}
