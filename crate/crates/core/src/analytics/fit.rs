use serde::Serialize;

use super::density::DensityEstimate;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct LineFit {
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub n: usize,
}

/// Ordinary least squares of `ys` on `xs`.
pub fn fit_line(xs: &[f64], ys: &[f64]) -> Result<LineFit> {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return Err(Error::TooFewPoints { needed: 2, got: n });
    }
    let nf = n as f64;
    let mx = xs[..n].iter().sum::<f64>() / nf;
    let my = ys[..n].iter().sum::<f64>() / nf;
    let (mut sxx, mut sxy, mut syy) = (0.0, 0.0, 0.0);
    for (x, y) in xs.iter().zip(ys) {
        let (dx, dy) = (x - mx, y - my);
        sxx += dx * dx;
        sxy += dx * dy;
        syy += dy * dy;
    }
    if sxx == 0.0 {
        return Err(Error::InvalidConfig("all x values are equal".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_res: f64 = xs
        .iter()
        .zip(ys)
        .map(|(x, y)| {
            let r = y - (intercept + slope * x);
            r * r
        })
        .sum();
    let r_squared = if syy == 0.0 { 1.0 } else { 1.0 - ss_res / syy };
    Ok(LineFit {
        slope,
        intercept,
        r_squared,
        n,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PowerLawFit {
    /// Slope of `ln density` against `ln epsilon`.
    pub exponent: f64,
    /// `ln` of the prefactor.
    pub log_scale: f64,
    pub r_squared: f64,
    pub points_used: usize,
}

pub const MIN_TAIL_POINTS: usize = 5;

/// Least-squares line through `(ln epsilon, ln density)` for the points
/// with `epsilon >= epsilon_min` and positive density.
pub fn fit_power_law_tail(density: &DensityEstimate, epsilon_min: f64) -> Result<PowerLawFit> {
    if !(epsilon_min > 0.0) {
        return Err(Error::InvalidConfig(format!("epsilon_min must be positive, got {epsilon_min}")));
    }
    let (xs, ys): (Vec<f64>, Vec<f64>) = density
        .points
        .iter()
        .filter(|p| p.epsilon >= epsilon_min && p.density > 0.0)
        .map(|p| (p.epsilon.ln(), p.density.ln()))
        .unzip();
    if xs.len() < MIN_TAIL_POINTS {
        return Err(Error::TooFewPoints {
            needed: MIN_TAIL_POINTS,
            got: xs.len(),
        });
    }
    let line = fit_line(&xs, &ys)?;
    Ok(PowerLawFit {
        exponent: line.slope,
        log_scale: line.intercept,
        r_squared: line.r_squared,
        points_used: line.n,
    })
}
