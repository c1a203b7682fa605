use crate::error::{Error, Result};

/// Index of the half-open bin `[edges[j], edges[j+1])` holding `x`. The last
/// bin is closed on the right.
pub fn bin_index(edges: &[f64], x: f64) -> Option<usize> {
    let n = edges.len();
    if n < 2 || !(x >= edges[0] && x <= edges[n - 1]) {
        return None;
    }
    if x == edges[n - 1] {
        return Some(n - 2);
    }
    // first edge strictly greater than x
    let upper = edges.partition_point(|&e| e <= x);
    Some(upper - 1)
}

pub(crate) fn check_edges(edges: &[f64]) -> Result<()> {
    if edges.len() < 2 {
        return Err(Error::InvalidConfig(format!(
            "need at least 2 bin edges, got {}",
            edges.len()
        )));
    }
    if edges.iter().any(|e| !e.is_finite()) || edges.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::InvalidConfig("bin edges must be finite and strictly increasing".into()));
    }
    Ok(())
}

/// `bins` equal-width bins over `[lo, hi]`.
pub fn linear_edges(lo: f64, hi: f64, bins: usize) -> Result<Vec<f64>> {
    if bins == 0 || !(hi > lo) {
        return Err(Error::InvalidConfig(format!(
            "need bins > 0 and lo < hi, got bins={bins}, lo={lo}, hi={hi}"
        )));
    }
    let width = (hi - lo) / bins as f64;
    let mut edges: Vec<f64> = (0..bins).map(|j| lo + j as f64 * width).collect();
    edges.push(hi);
    Ok(edges)
}

/// Edges log-spaced in `|x|` over `[min_abs, max_abs]` on each side of zero,
/// with one central bin `[-min_abs, min_abs]`. Yields `2 * bins_per_side + 1`
/// bins, symmetric about zero.
pub fn signed_log_edges(min_abs: f64, max_abs: f64, bins_per_side: usize) -> Result<Vec<f64>> {
    if bins_per_side == 0 || !(min_abs > 0.0) || !(max_abs > min_abs) {
        return Err(Error::InvalidConfig(format!(
            "need bins_per_side > 0 and 0 < min_abs < max_abs, got {bins_per_side}, {min_abs}, {max_abs}"
        )));
    }
    let (lmin, lmax) = (min_abs.ln(), max_abs.ln());
    let step = (lmax - lmin) / bins_per_side as f64;
    let positive: Vec<f64> = (0..=bins_per_side)
        .map(|j| {
            if j == bins_per_side {
                max_abs
            } else {
                (lmin + j as f64 * step).exp()
            }
        })
        .collect();
    let mut edges: Vec<f64> = positive.iter().rev().map(|v| -v).collect();
    edges.extend(positive);
    Ok(edges)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bin_lookup() {
        let e = [0.0, 0.5, 1.0];
        assert_eq!(bin_index(&e, 0.0), Some(0));
        assert_eq!(bin_index(&e, 0.49), Some(0));
        assert_eq!(bin_index(&e, 0.5), Some(1));
        assert_eq!(bin_index(&e, 1.0), Some(1));
        assert_eq!(bin_index(&e, 1.01), None);
        assert_eq!(bin_index(&e, -0.1), None);
        assert_eq!(bin_index(&e, f64::NAN), None);
    }

    #[test]
    fn edge_builders() {
        let e = linear_edges(0.0, 1.0, 20).unwrap();
        assert_eq!(e.len(), 21);
        assert_eq!(e[20], 1.0);
        assert!(linear_edges(0.0, 1.0, 0).is_err());

        let s = signed_log_edges(0.01, 10.0, 3).unwrap();
        assert_eq!(s.len(), 8);
        for (a, b) in s.iter().zip(s.iter().rev()) {
            assert_eq!(*a, -*b);
        }
        assert!(check_edges(&s).is_ok());
        assert!(check_edges(&[1.0]).is_err());
        assert!(check_edges(&[1.0, 1.0]).is_err());
    }
}
