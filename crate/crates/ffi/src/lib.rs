//! C interface to `infomarket`.
//!
//! Every fallible function returns an [`ImStatus`] and writes its result
//! through an out-pointer. On failure a message is kept per thread and can
//! be read with [`im_last_error_message`]. Handles are opaque and must be
//! released with their `_free` function.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;
use std::ptr;

use infomarket::analytics::{average_log_score_curve, LogScoreCurve};
use infomarket::explain::expected_entropy_loss;
use infomarket::ingest::{load_prices, write_prices};
use infomarket::sim::{event_probability, simulate_ensemble, SimConfig};
use infomarket::{from_log_likelihood, log_score, to_log_likelihood, Error, LogLikelihoodPrice, Market, Probability};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ImStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Io = 3,
    Parse = 4,
    Schema = 5,
    Panic = 6,
}

/// Price series of an ensemble of markets.
pub struct ImMarkets {
    markets: Vec<Market>,
}

/// Average log score by day offset.
pub struct ImCurve {
    curve: LogScoreCurve,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).expect("no interior nul");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> ImStatus {
    match e {
        Error::Io { .. } => ImStatus::Io,
        Error::Parse { .. } => ImStatus::Parse,
        Error::Schema(_) | Error::DuplicateId { .. } | Error::EmptyMarket(_) | Error::NoWinner(_) => {
            ImStatus::Schema
        }
        _ => ImStatus::InvalidArgument,
    }
}

struct Fail(ImStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn null(what: &str) -> Fail {
    Fail(ImStatus::NullPointer, format!("{what} is null"))
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> ImStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => ImStatus::Ok,
        Ok(Err(Fail(status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            ImStatus::Panic
        }
    }
}

fn write_out<T>(out: *mut T, value: T, what: &str) -> Result<(), Fail> {
    if out.is_null() {
        return Err(null(what));
    }
    // SAFETY: non-null and, by contract, valid for writes.
    unsafe { out.write(value) };
    Ok(())
}

unsafe fn path_arg(path: *const c_char) -> Result<PathBuf, Fail> {
    if path.is_null() {
        return Err(null("path"));
    }
    let s = CStr::from_ptr(path)
        .to_str()
        .map_err(|_| Fail(ImStatus::InvalidArgument, "path is not UTF-8".into()))?;
    Ok(PathBuf::from(s))
}

/// Message of the last failure on this thread, or NULL. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn im_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn im_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Probability that at least half of `n` fair coins land tails given `i`
/// tails among the first `k`.
#[no_mangle]
pub extern "C" fn im_event_probability(n: u64, i: u64, k: u64, out: *mut f64) -> ImStatus {
    guard(|| write_out(out, event_probability(n, i, k)?.value(), "out"))
}

/// `ln(p / (1 - p))` with `p` clamped away from 0 and 1.
#[no_mangle]
pub extern "C" fn im_log_likelihood(p: f64, out: *mut f64) -> ImStatus {
    guard(|| write_out(out, to_log_likelihood(Probability::new(p)?).value(), "out"))
}

#[no_mangle]
pub extern "C" fn im_from_log_likelihood(ll: f64, out: *mut f64) -> ImStatus {
    guard(|| write_out(out, from_log_likelihood(LogLikelihoodPrice::new(ll)?).value(), "out"))
}

/// Natural log of the probability given to the winner.
///
/// # Safety
/// `probs` must point to `len` readable doubles.
#[no_mangle]
pub unsafe extern "C" fn im_log_score(
    probs: *const f64,
    len: usize,
    winner: usize,
    out: *mut f64,
) -> ImStatus {
    guard(|| {
        if probs.is_null() {
            return Err(null("probs"));
        }
        let raw = std::slice::from_raw_parts(probs, len);
        let ps = raw.iter().map(|&p| Probability::new(p)).collect::<Result<Vec<_>, _>>()?;
        write_out(out, log_score(&ps, winner)?, "out")
    })
}

/// Expected entropy loss of a feature, in bits.
#[no_mangle]
pub extern "C" fn im_entropy_loss(
    pos_df: u64,
    neg_df: u64,
    pos_total: u64,
    neg_total: u64,
    out: *mut f64,
) -> ImStatus {
    guard(|| write_out(out, expected_entropy_loss(pos_df, neg_df, pos_total, neg_total)?, "out"))
}

/// Simulates `num_markets` coin-flip markets.
#[no_mangle]
pub extern "C" fn im_markets_simulate(
    n: u64,
    flips_per_step: u64,
    num_markets: usize,
    seed: u64,
    out: *mut *mut ImMarkets,
) -> ImStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let config = SimConfig { n, flips_per_step, num_markets, seed, ..SimConfig::default() };
        let markets = simulate_ensemble(&config)?;
        write_out(out, Box::into_raw(Box::new(ImMarkets { markets })), "out")
    })
}

/// Reads a price CSV.
///
/// # Safety
/// `path` must be a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn im_markets_load_csv(path: *const c_char, out: *mut *mut ImMarkets) -> ImStatus {
    guard(|| {
        let path = path_arg(path)?;
        if out.is_null() {
            return Err(null("out"));
        }
        let markets = load_prices(path)?;
        write_out(out, Box::into_raw(Box::new(ImMarkets { markets })), "out")
    })
}

/// Writes a price CSV.
///
/// # Safety
/// `markets` must be a live handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn im_markets_write_csv(markets: *const ImMarkets, path: *const c_char) -> ImStatus {
    guard(|| {
        let m = markets.as_ref().ok_or_else(|| null("markets"))?;
        let path = path_arg(path)?;
        let file = std::fs::File::create(&path).map_err(|e| Fail(ImStatus::Io, format!("{}: {e}", path.display())))?;
        write_prices(&m.markets, std::io::BufWriter::new(file))?;
        Ok(())
    })
}

/// Number of markets, or 0 for NULL.
///
/// # Safety
/// `markets` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn im_markets_len(markets: *const ImMarkets) -> usize {
    markets.as_ref().map_or(0, |m| m.markets.len())
}

/// # Safety
/// `markets` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn im_markets_free(markets: *mut ImMarkets) {
    if !markets.is_null() {
        drop(Box::from_raw(markets));
    }
}

/// Average log score of the ensemble by day offset.
///
/// # Safety
/// `markets` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn im_score_curve(markets: *const ImMarkets, out: *mut *mut ImCurve) -> ImStatus {
    guard(|| {
        let m = markets.as_ref().ok_or_else(|| null("markets"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let curve = average_log_score_curve(&m.markets)?;
        write_out(out, Box::into_raw(Box::new(ImCurve { curve })), "out")
    })
}

/// # Safety
/// `curve` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn im_curve_len(curve: *const ImCurve) -> usize {
    curve.as_ref().map_or(0, |c| c.curve.points.len())
}

/// Point `index` of the curve, in increasing day offset.
///
/// # Safety
/// `curve` must be a live handle; the out-pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn im_curve_point(
    curve: *const ImCurve,
    index: usize,
    day_offset: *mut i64,
    mean_score: *mut f64,
    num_markets: *mut usize,
) -> ImStatus {
    guard(|| {
        let c = curve.as_ref().ok_or_else(|| null("curve"))?;
        let len = c.curve.points.len();
        let p = c.curve.points.get(index).ok_or_else(|| {
            Fail(ImStatus::InvalidArgument, format!("index {index} out of range for {len} points"))
        })?;
        write_out(day_offset, p.day_offset, "day_offset")?;
        write_out(mean_score, p.mean_score, "mean_score")?;
        write_out(num_markets, p.num_markets, "num_markets")
    })
}

/// # Safety
/// `curve` must be NULL or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn im_curve_free(curve: *mut ImCurve) {
    if !curve.is_null() {
        drop(Box::from_raw(curve));
    }
}
