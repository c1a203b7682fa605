use serde::Serialize;

use super::bins::{bin_index, check_edges};
use super::epsilon::{price_transitions, EpsilonSample, GapPolicy, Transition};
use crate::error::Result;
use crate::model::Market;

/// Moments of the next-day price given that the previous price fell in
/// `[bin_low, bin_high)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConditionalStats {
    pub bin_low: f64,
    pub bin_high: f64,
    pub bin_center: f64,
    /// Mean previous price of the pairs in the bin: the conditioning price.
    pub a: f64,
    pub count: usize,
    pub mean_next: f64,
    /// Population variance of the next price.
    pub var_next: f64,
    /// Fourth central moment of the next price.
    pub m4_next: f64,
    pub mean_next_given_won: f64,
    pub var_next_given_won: f64,
    pub count_won: usize,
    /// Standard error of `(mean_next_given_won - a) - var_next / a`,
    /// clustered by candidate series.
    pub drift_std_error: f64,
    /// Standard error of `mean_next_given_won - a`, clustered by series.
    pub winner_excess_std_error: f64,
}

/// Mean, population variance and fourth central moment. The mean is taken
/// relative to the first value so a constant input returns it exactly.
fn moments(xs: &[f64]) -> (f64, f64, f64) {
    let Some(&first) = xs.first() else {
        return (f64::NAN, f64::NAN, f64::NAN);
    };
    let n = xs.len() as f64;
    let mean = first + xs.iter().map(|x| x - first).sum::<f64>() / n;
    let (mut m2, mut m4) = (0.0, 0.0);
    for x in xs {
        let d = (x - mean) * (x - mean);
        m2 += d;
        m4 += d * d;
    }
    (mean, m2 / n, m4 / n)
}

/// Group consecutive-day price pairs by the bin of the earlier price and
/// report next-price moments per populated bin.
pub fn conditional_stats(markets: &[Market], bin_edges: &[f64]) -> Result<Vec<ConditionalStats>> {
    conditional_stats_from(&price_transitions(markets, GapPolicy::Exclude), bin_edges)
}

pub fn conditional_stats_from(transitions: &[Transition], bin_edges: &[f64]) -> Result<Vec<ConditionalStats>> {
    check_edges(bin_edges)?;
    let bins = bin_edges.len() - 1;
    let mut members: Vec<Vec<&Transition>> = vec![Vec::new(); bins];
    for t in transitions {
        if let Some(j) = bin_index(bin_edges, t.prev.value()) {
            members[j].push(t);
        }
    }
    Ok(members
        .iter()
        .enumerate()
        .filter(|(_, m)| !m.is_empty())
        .map(|(j, m)| bin_stats(bin_edges[j], bin_edges[j + 1], m))
        .collect())
}

/// Per-series sums: count, prev, next, next^2, won count, won next.
#[derive(Default, Clone, Copy)]
struct Sums {
    c: f64,
    sp: f64,
    sn: f64,
    q: f64,
    cw: f64,
    sw: f64,
}

impl Sums {
    fn add(&mut self, t: &Transition) {
        let (p, x) = (t.prev.value(), t.next.value());
        self.c += 1.0;
        self.sp += p;
        self.sn += x;
        self.q += x * x;
        if t.outcome.is_won() {
            self.cw += 1.0;
            self.sw += x;
        }
    }
}

fn bin_stats(low: f64, high: f64, members: &[&Transition]) -> ConditionalStats {
    let prev: Vec<f64> = members.iter().map(|t| t.prev.value()).collect();
    let next: Vec<f64> = members.iter().map(|t| t.next.value()).collect();
    let next_won: Vec<f64> = members
        .iter()
        .filter(|t| t.outcome.is_won())
        .map(|t| t.next.value())
        .collect();
    let (a, _, _) = moments(&prev);
    let (mean_next, var_next, m4_next) = moments(&next);
    let (mean_won, var_won, _) = moments(&next_won);

    // Delta-method standard errors with series as clusters: a series that
    // lingers in the bin contributes correlated samples.
    let mut per_series: Vec<Sums> = Vec::new();
    let mut total = Sums::default();
    let mut current = None;
    for t in members {
        if current != Some(t.series_index) {
            per_series.push(Sums::default());
            current = Some(t.series_index);
        }
        per_series.last_mut().expect("pushed").add(t);
        total.add(t);
    }
    let Sums { c, sp, sn, q, cw, sw } = total;
    let (drift_se, excess_se) = if cw > 0.0 && a > 0.0 && per_series.len() > 1 {
        let v = q / c - (sn / c) * (sn / c);
        // d/d(totals) of D = sw/cw - a - v/a, with a = sp/c, v = q/c - (sn/c)^2
        let d_sw = 1.0 / cw;
        let d_cw = -sw / (cw * cw);
        let d_a = -1.0 + v / (a * a);
        let d_sp = d_a / c;
        let d_c = d_a * (-a / c) - (1.0 / a) * (-q / (c * c) + 2.0 * sn * sn / (c * c * c));
        let d_q = -1.0 / (a * c);
        let d_sn = 2.0 * sn / (a * c * c);
        // E = sw/cw - sp/c
        let e_sp = -1.0 / c;
        let e_c = sp / (c * c);
        let (mut var_d, mut var_e) = (0.0, 0.0);
        for s in &per_series {
            let psi_d = d_sw * s.sw + d_cw * s.cw + d_sp * s.sp + d_c * s.c + d_q * s.q + d_sn * s.sn;
            let psi_e = d_sw * s.sw + d_cw * s.cw + e_sp * s.sp + e_c * s.c;
            var_d += psi_d * psi_d;
            var_e += psi_e * psi_e;
        }
        let k = per_series.len() as f64;
        let scale = k / (k - 1.0);
        ((var_d * scale).sqrt(), (var_e * scale).sqrt())
    } else {
        (f64::NAN, f64::NAN)
    };

    ConditionalStats {
        bin_low: low,
        bin_high: high,
        bin_center: 0.5 * (low + high),
        a,
        count: next.len(),
        mean_next,
        var_next,
        m4_next,
        mean_next_given_won: mean_won,
        var_next_given_won: var_won,
        count_won: next_won.len(),
        drift_std_error: drift_se,
        winner_excess_std_error: excess_se,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum CellFlag {
    Reported,
    InsufficientSamples,
}

/// Probability of an `epsilon` move among eventual winners relative to all
/// candidates, within one `(a, epsilon)` cell.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LlRatioCell {
    pub a_center: f64,
    pub eps_center: f64,
    pub ratio: Option<f64>,
    /// `(e^a + 1) / (e^a + e^-epsilon)` at the cell center.
    pub theory: f64,
    pub std_error: Option<f64>,
    pub count_won: usize,
    pub count_all: usize,
    pub stratum_won: usize,
    pub stratum_all: usize,
    pub flag: CellFlag,
}

pub fn ll_ratio_theory(a: f64, eps: f64) -> f64 {
    (a.exp() + 1.0) / (a.exp() + (-eps).exp())
}

/// `Pr(epsilon-bin | won, a-bin) / Pr(epsilon-bin | a-bin)` for every
/// populated cell. Cells with fewer than `min_count` won or total samples
/// are kept but flagged and carry no ratio.
pub fn conditional_ll_ratio(
    samples: &[EpsilonSample],
    a_edges: &[f64],
    eps_edges: &[f64],
    min_count: usize,
) -> Result<Vec<LlRatioCell>> {
    check_edges(a_edges)?;
    check_edges(eps_edges)?;
    let (na, ne) = (a_edges.len() - 1, eps_edges.len() - 1);
    let mut won = vec![0usize; na * ne];
    let mut all = vec![0usize; na * ne];
    let mut stratum = vec![(0usize, 0usize); na];
    for s in samples {
        let Some(ai) = bin_index(a_edges, s.prev_ll) else {
            continue;
        };
        stratum[ai].1 += 1;
        if s.outcome.is_won() {
            stratum[ai].0 += 1;
        }
        if let Some(ei) = bin_index(eps_edges, s.value) {
            all[ai * ne + ei] += 1;
            if s.outcome.is_won() {
                won[ai * ne + ei] += 1;
            }
        }
    }
    let mut out = Vec::new();
    for ai in 0..na {
        let (tw, ta) = stratum[ai];
        let a_center = 0.5 * (a_edges[ai] + a_edges[ai + 1]);
        for ei in 0..ne {
            let (cw, ca) = (won[ai * ne + ei], all[ai * ne + ei]);
            if ca == 0 {
                continue;
            }
            let eps_center = 0.5 * (eps_edges[ei] + eps_edges[ei + 1]);
            let enough = cw >= min_count && ca >= min_count && cw > 0;
            let (ratio, std_error) = if enough {
                let r = (cw as f64 / tw as f64) / (ca as f64 / ta as f64);
                let rel_var = (1.0 / cw as f64 - 1.0 / ca as f64).max(0.0)
                    + (1.0 / tw as f64 - 1.0 / ta as f64).max(0.0);
                (Some(r), Some(r * rel_var.sqrt()))
            } else {
                (None, None)
            };
            out.push(LlRatioCell {
                a_center,
                eps_center,
                ratio,
                theory: ll_ratio_theory(a_center, eps_center),
                std_error,
                count_won: cw,
                count_all: ca,
                stratum_won: tw,
                stratum_all: ta,
                flag: if enough {
                    CellFlag::Reported
                } else {
                    CellFlag::InsufficientSamples
                },
            });
        }
    }
    Ok(out)
}
