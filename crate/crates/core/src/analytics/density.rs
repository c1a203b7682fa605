use serde::Serialize;

use crate::error::{Error, Result};

pub const DEFAULT_WINDOW: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DensityPoint {
    pub epsilon: f64,
    pub density: f64,
}

/// Density read off the empirical distribution by finite differences over
/// a fixed rank window. Points are in descending `epsilon` order.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DensityEstimate {
    pub points: Vec<DensityPoint>,
    pub window: usize,
}

impl DensityEstimate {
    /// Trapezoid-rule integral over the estimated support.
    pub fn integral(&self) -> f64 {
        self.points
            .windows(2)
            .map(|w| 0.5 * (w[0].density + w[1].density) * (w[0].epsilon - w[1].epsilon))
            .sum()
    }
}

/// Estimate a density by differencing the empirical distribution.
///
/// Values are ranked in descending order `x_1 >= x_2 >= ...` and `y_i` is the
/// fraction of values `>= x_i`. The density at `x_i` is
/// `|y_{i-w} - y_{i+w}| / (x_{i-w} - x_{i+w})` for `w < i <= N - w`. Ranks
/// within `w` of either end are not estimated, and ties that make the
/// denominator vanish are skipped.
pub fn empirical_density(samples: &[f64], window: usize) -> Result<DensityEstimate> {
    if window == 0 {
        return Err(Error::InvalidConfig("density window must be positive".into()));
    }
    let n = samples.len();
    if n < 2 * window + 1 {
        return Err(Error::TooFewSamples {
            needed: 2 * window + 1,
            got: n,
        });
    }
    if samples.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidConfig("samples contain NaN".into()));
    }
    let mut x = samples.to_vec();
    x.sort_unstable_by(|a, b| b.total_cmp(a));

    // at_least[i] = number of values >= x[i] (0-based i)
    let mut at_least = vec![0usize; n];
    let mut start = 0;
    while start < n {
        let mut end = start + 1;
        while end < n && x[end] == x[start] {
            end += 1;
        }
        at_least[start..end].fill(end);
        start = end;
    }

    let total = n as f64;
    let mut points = Vec::with_capacity(n - 2 * window);
    for i in window..n - window {
        let (hi, lo) = (i - window, i + window);
        let run = x[hi] - x[lo];
        if run == 0.0 {
            continue;
        }
        if points.last().is_some_and(|p: &DensityPoint| p.epsilon == x[i]) {
            continue;
        }
        let mass = (at_least[lo] - at_least[hi]) as f64 / total;
        points.push(DensityPoint {
            epsilon: x[i],
            density: mass / run,
        });
    }
    Ok(DensityEstimate { points, window })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn too_few_samples() {
        let s: Vec<f64> = (0..50).map(f64::from).collect();
        assert!(matches!(
            empirical_density(&s, 50),
            Err(Error::TooFewSamples { needed: 101, got: 50 })
        ));
        assert!(empirical_density(&s, 0).is_err());
    }

    #[test]
    fn evenly_spaced_values_have_flat_density() {
        // 1001 values spaced 0.001 over [0, 1]
        let s: Vec<f64> = (0..=1000).map(|i| i as f64 / 1000.0).collect();
        let d = empirical_density(&s, 10).unwrap();
        assert_eq!(d.points.len(), 1001 - 20);
        for p in &d.points {
            // 20 gaps of 0.001 hold 20 of 1001 values
            assert!((p.density - 1000.0 / 1001.0).abs() < 1e-9, "{p:?}");
        }
        assert!(d.points.windows(2).all(|w| w[0].epsilon > w[1].epsilon));
    }

    #[test]
    fn mirrored_input_gives_mirrored_output() {
        let half: Vec<f64> = (1..=400).map(|i| (i as f64 * 0.37).sin().abs() + i as f64 * 1e-3).collect();
        let mut s = half.clone();
        s.extend(half.iter().map(|v| -v));
        let d = empirical_density(&s, 7).unwrap();
        let m = d.points.len();
        for j in 0..m {
            let a = d.points[j];
            let b = d.points[m - 1 - j];
            assert_eq!(a.epsilon, -b.epsilon);
            assert_eq!(a.density, b.density);
        }
    }

    #[test]
    fn ties_spanning_the_window_are_skipped() {
        let mut s = vec![0.0; 30];
        s.extend((1..=30).map(f64::from));
        let d = empirical_density(&s, 5).unwrap();
        assert!(d.points.iter().all(|p| p.density.is_finite() && p.density > 0.0));
        // at most one point at the tied value
        assert!(d.points.iter().filter(|p| p.epsilon == 0.0).count() <= 1);
    }
}
