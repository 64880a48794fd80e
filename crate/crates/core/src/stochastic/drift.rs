//! Validators for the smoothness conditions on time-varying service rates
//! under which the discounted estimator is known to be stable.
//!
//! With `g = 4/(1-gamma) * ln(1/(1-gamma))` and `c2 = 5 (I U_A + J)`:
//!
//! - rate-time condition: `|1/mu(ta) - 1/mu(tb)| <= (1/g) (1/gamma)^(|ta-tb|-1)`
//!   whenever `0 < |ta-tb| <= 2g`;
//! - rate condition: `|mu(ta) - mu(tb)| <= 1/g^p` whenever `|ta-tb| <= U_S`;
//! - any-time condition: `|1/mu(ta) - 1/mu(tb)| <= delta/((c2+1) g) (1/gamma)^(|ta-tb|-1)`
//!   whenever `0 < |ta-tb| <= (c2+1) g / delta`.
//!
//! Mean service times are piecewise constant, so only pairs of distinct
//! segments can violate anything, and since every bound grows with the slot
//! distance it suffices to test the closest pair of slots of each segment pair.

use serde::Serialize;

use super::timeline::Timeline;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::SystemConfig;

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DriftReport {
    pub gamma: f64,
    pub p: f64,
    pub delta: f64,
    pub c2: f64,
    pub g: f64,
    /// Largest rate change `|mu(ta) - mu(tb)|` with `|ta - tb| <= U_S`.
    pub max_drift: f64,
    pub rate_time_ok: bool,
    pub rate_ok: bool,
    pub anytime_ok: bool,
    /// The horizon is shorter than the longest window the conditions cover.
    pub partial: bool,
}

/// `g(gamma) = 4/(1-gamma) * ln(1/(1-gamma))`.
pub fn discount_horizon(gamma: f64) -> f64 {
    4.0 / (1.0 - gamma) * (1.0 / (1.0 - gamma)).ln()
}

pub fn validate_drift_assumptions(
    mean_times: &Timeline<Matrix<f64>>,
    config: &SystemConfig,
    gamma: f64,
    p: f64,
    delta: f64,
) -> Result<DriftReport> {
    if !(gamma > 0.0 && gamma < 1.0) {
        return Err(Error::parameter(format!("gamma {gamma} must lie in (0, 1)")));
    }
    if !(p > 0.0) || !(delta > 0.0) {
        return Err(Error::parameter("p and delta must be positive"));
    }
    for (start, _, m) in mean_times.segments() {
        if m.shape() != (config.num_types, config.num_servers) {
            return Err(Error::dimension(format!("mean-time segment at {start} has wrong shape")));
        }
        if m.as_slice().iter().any(|&s| !(s >= 1.0) || !s.is_finite()) {
            return Err(Error::parameter(format!(
                "mean service times at segment {start} must be finite and >= 1"
            )));
        }
    }

    let g = discount_horizon(gamma);
    let c2 = 5.0 * (config.num_types as f64 * f64::from(config.arrival_bound) + config.num_servers as f64);
    let window_rate_time = (2.0 * g).floor();
    let window_rate = f64::from(config.service_bound);
    let window_anytime = ((c2 + 1.0) * g / delta).floor();
    let rate_bound = g.powf(-p);
    let growth = 1.0 / gamma;

    let mut report = DriftReport {
        gamma,
        p,
        delta,
        c2,
        g,
        max_drift: 0.0,
        rate_time_ok: true,
        rate_ok: true,
        anytime_ok: true,
        partial: ((mean_times.horizon() - 1) as f64)
            < window_rate_time.max(window_rate).max(window_anytime),
    };

    let segments: Vec<(u64, u64, &Matrix<f64>)> = mean_times.segments().collect();
    for (a, &(_, end_a, ma)) in segments.iter().enumerate() {
        for &(start_b, _, mb) in &segments[a + 1..] {
            let gap = (start_b + 1 - end_a) as f64;
            for ((i, j), &sa) in ma.iter() {
                let sb = mb[(i, j)];
                let time_diff = (sa - sb).abs();
                let rate_diff = (1.0 / sa - 1.0 / sb).abs();
                let amplification = growth.powf(gap - 1.0);
                if gap <= window_rate_time && time_diff > amplification / g {
                    report.rate_time_ok = false;
                }
                if gap <= window_rate {
                    report.max_drift = report.max_drift.max(rate_diff);
                    if rate_diff > rate_bound {
                        report.rate_ok = false;
                    }
                }
                if gap <= window_anytime && time_diff > delta / ((c2 + 1.0) * g) * amplification {
                    report.anytime_ok = false;
                }
            }
        }
    }
    Ok(report)
}
