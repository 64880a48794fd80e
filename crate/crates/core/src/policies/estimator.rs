//! Discounted service-time statistics with start-time discounting.
//!
//! At the start of slot `t`, for every pair `(i, j)`:
//!
//! ```text
//! M(t)   = M(t-1) + 1                          if I_j(t-1) = i
//! N^(t)  = g N^(t-1)  + g^M(t-1) 1(t-1) eta(t-1)
//! phi(t) = g phi(t-1) + g^M(t-1) 1(t-1) eta(t-1) M(t)
//! M(t)   = 0                                   if 1(t-1) = 1
//! ```
//!
//! with `g` the discount factor. A completed job therefore carries weight
//! `g^(t-1-start)` at slot `t`, which is what [`closed_form_stats`] computes
//! directly.

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::SlotEvents;

#[derive(Clone, Debug, PartialEq)]
pub struct EstimatorState {
    /// Discounted number of completions per pair.
    pub n_hat: Matrix<f64>,
    /// Discounted busy slots per pair.
    pub phi_hat: Matrix<f64>,
    /// Slots served so far of the in-flight job per pair.
    pub served: Matrix<u32>,
    pub gamma: f64,
    pub c1: f64,
    pub service_bound: u32,
}

impl EstimatorState {
    pub fn new(
        num_types: usize,
        num_servers: usize,
        gamma: f64,
        c1: f64,
        service_bound: u32,
    ) -> Result<Self> {
        if !(gamma > 0.0 && gamma <= 1.0) {
            return Err(Error::parameter(format!("gamma {gamma} must lie in (0, 1]")));
        }
        if !(c1 > 0.0) || !c1.is_finite() {
            return Err(Error::parameter(format!("c1 {c1} must be positive")));
        }
        Ok(Self {
            n_hat: Matrix::filled(num_types, num_servers, 0.0),
            phi_hat: Matrix::filled(num_types, num_servers, 0.0),
            served: Matrix::filled(num_types, num_servers, 0),
            gamma,
            c1,
            service_bound,
        })
    }

    /// Forgets all completions; in-flight counters are kept so that jobs
    /// already running are still measured from their start.
    pub fn reset_statistics(&mut self) {
        self.n_hat.fill(0.0);
        self.phi_hat.fill(0.0);
    }

    /// Folds in the events of the previous slot.
    pub fn update(&mut self, events: &SlotEvents) {
        let gamma = self.gamma;
        let (ni, nj) = self.n_hat.shape();
        for j in 0..nj {
            let scheduled = events.scheduled[j];
            let eta = events.nonidle[j];
            for i in 0..ni {
                let prev = self.served[(i, j)];
                let cur = if scheduled == Some(i) { prev + 1 } else { prev };
                let fired = events.completions[(i, j)];
                let (n, phi) = (&mut self.n_hat[(i, j)], &mut self.phi_hat[(i, j)]);
                if gamma < 1.0 {
                    *n *= gamma;
                    *phi *= gamma;
                }
                if fired && eta {
                    let weight = if gamma < 1.0 { gamma.powi(prev as i32) } else { 1.0 };
                    *n += weight;
                    *phi += weight * f64::from(cur);
                }
                self.served[(i, j)] = if fired { 0 } else { cur };
            }
        }
    }

    /// `sum_{tau=0}^{t-1} gamma^tau` in closed form.
    pub fn discounted_horizon_sum(&self, t: u64) -> f64 {
        if self.gamma == 1.0 {
            t as f64
        } else {
            (1.0 - self.gamma.powf(t as f64)) / (1.0 - self.gamma)
        }
    }

    /// `b_{i,j}(t) = c1 U_S sqrt(log(sum_{tau<t} gamma^tau) / N^_{i,j})`,
    /// infinite for unexplored pairs.
    pub fn bonus(&self, i: usize, j: usize, t: u64) -> f64 {
        let n = self.n_hat[(i, j)];
        if n <= 0.0 {
            return f64::INFINITY;
        }
        let log_sum = self.discounted_horizon_sum(t).ln().max(0.0);
        self.c1 * f64::from(self.service_bound) * (log_sum / n).sqrt()
    }

    /// Every bonus at slot `t`.
    pub fn ucb_bonus(&self, t: u64) -> Result<Matrix<f64>> {
        if t == 0 {
            return Err(Error::contract("bonus is undefined at slot 0"));
        }
        let (ni, nj) = self.n_hat.shape();
        Ok(Matrix::from_fn(ni, nj, |i, j| self.bonus(i, j, t)))
    }

    /// Estimated mean service time `phi^/N^` (0 for unexplored pairs).
    pub fn mean_time(&self, i: usize, j: usize) -> f64 {
        let n = self.n_hat[(i, j)];
        if n <= 0.0 {
            0.0
        } else {
            self.phi_hat[(i, j)] / n
        }
    }

    /// Estimated rate `N^/phi^` with the `0/0 = 0` convention.
    pub fn rate(&self, i: usize, j: usize) -> f64 {
        let phi = self.phi_hat[(i, j)];
        if phi <= 0.0 {
            0.0
        } else {
            self.n_hat[(i, j)] / phi
        }
    }

    /// Optimistic mean service time `max{phi^/N^ - b, 1}`; exactly 1 for
    /// pairs without data.
    pub fn optimistic_time(&self, i: usize, j: usize, t: u64) -> f64 {
        if self.n_hat[(i, j)] <= 0.0 {
            return 1.0;
        }
        let b = self.bonus(i, j, t);
        (self.mean_time(i, j) - b).max(1.0)
    }
}

/// Start-time-discounted statistics of completed jobs, computed directly:
/// `N^ = sum_k gamma^(t-1-start_k)`, `phi^ = sum_k gamma^(t-1-start_k) S_k`.
pub fn closed_form_stats(jobs: &[(u64, u32)], t: u64, gamma: f64) -> Result<(f64, f64)> {
    let mut n = 0.0;
    let mut phi = 0.0;
    for &(start, s) in jobs {
        if start + u64::from(s) > t {
            return Err(Error::contract(format!(
                "job started at {start} with length {s} is not complete before slot {t}"
            )));
        }
        let w = gamma.powf((t - 1 - start) as f64);
        n += w;
        phi += w * f64::from(s);
    }
    Ok((n, phi))
}
