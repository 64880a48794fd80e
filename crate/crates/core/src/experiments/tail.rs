//! Empirical tail of `||Q(t)||_2` across runs and a log-linear fit.

use serde::Serialize;

use super::Trajectory;
use crate::error::{Error, Result};

/// Thresholds with fewer exceedances than this are left out of the fit.
pub const MIN_EXCEEDANCES: usize = 5;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailFit {
    /// Slope of `ln P(||Q|| >= x)` against `x`; the decay rate is its negation.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub points: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct TailEstimate {
    pub thresholds: Vec<f64>,
    pub survival: Vec<f64>,
    pub exceedances: Vec<usize>,
    /// `None` when fewer than two thresholds have enough exceedances.
    pub fit: Option<TailFit>,
}

/// Nearest-rank percentile of an ascending slice, `p` in `[0, 100]`.
fn percentile(sorted: &[f64], p: f64) -> f64 {
    let rank = ((p / 100.0) * sorted.len() as f64).ceil() as usize;
    sorted[rank.clamp(1, sorted.len()) - 1]
}

/// `count` evenly spaced thresholds from the 50th to the 99th percentile.
pub fn percentile_thresholds(samples: &[f64], count: usize) -> Vec<f64> {
    if samples.is_empty() || count == 0 {
        return Vec::new();
    }
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let lo = percentile(&sorted, 50.0);
    let hi = percentile(&sorted, 99.0);
    if count == 1 || hi == lo {
        return vec![lo];
    }
    (0..count)
        .map(|k| lo + (hi - lo) * k as f64 / (count - 1) as f64)
        .collect()
}

/// Survival estimates and fit from raw samples.
pub fn tail_from_samples(samples: &[f64], thresholds: &[f64]) -> TailEstimate {
    let n = samples.len();
    let exceedances: Vec<usize> = thresholds
        .iter()
        .map(|&x| samples.iter().filter(|&&v| v >= x).count())
        .collect();
    let survival: Vec<f64> = exceedances
        .iter()
        .map(|&c| if n == 0 { 0.0 } else { c as f64 / n as f64 })
        .collect();

    let points: Vec<(f64, f64, f64)> = thresholds
        .iter()
        .zip(&exceedances)
        .zip(&survival)
        .filter(|((_, &c), _)| c >= MIN_EXCEEDANCES)
        .map(|((&x, &c), &s)| (x, s.ln(), c as f64))
        .collect();

    TailEstimate {
        thresholds: thresholds.to_vec(),
        survival,
        exceedances,
        fit: weighted_fit(&points),
    }
}

/// Weighted least squares over `(x, y, weight)`.
fn weighted_fit(points: &[(f64, f64, f64)]) -> Option<TailFit> {
    if points.len() < 2 {
        return None;
    }
    let w: f64 = points.iter().map(|p| p.2).sum();
    let mx = points.iter().map(|p| p.2 * p.0).sum::<f64>() / w;
    let my = points.iter().map(|p| p.2 * p.1).sum::<f64>() / w;
    let sxx: f64 = points.iter().map(|p| p.2 * (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return None;
    }
    let sxy: f64 = points.iter().map(|p| p.2 * (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss_tot: f64 = points.iter().map(|p| p.2 * (p.1 - my).powi(2)).sum();
    let ss_res: f64 = points
        .iter()
        .map(|p| p.2 * (p.1 - intercept - slope * p.0).powi(2))
        .sum();
    let r_squared = if ss_tot == 0.0 { 1.0 } else { 1.0 - ss_res / ss_tot };
    Some(TailFit {
        slope,
        intercept,
        r_squared,
        points: points.len(),
    })
}

/// `P(||Q(t)||_2 >= x)` across runs. Every run must have recorded slot `t`.
pub fn tail_estimate(trajectories: &[Trajectory], t: u64, thresholds: &[f64]) -> Result<TailEstimate> {
    let samples = tail_samples(trajectories, t)?;
    Ok(tail_from_samples(&samples, thresholds))
}

/// Every run's `||Q(t)||_2`, in seed order.
pub fn tail_samples(trajectories: &[Trajectory], t: u64) -> Result<Vec<f64>> {
    let mut runs: Vec<&Trajectory> = trajectories.iter().collect();
    runs.sort_by_key(|r| r.seed);
    runs.iter()
        .map(|r| {
            r.tail
                .iter()
                .find(|p| p.0 == t)
                .map(|p| p.1)
                .ok_or_else(|| Error::Config(format!("slot {t} was not recorded for seed {}", r.seed)))
        })
        .collect()
}
