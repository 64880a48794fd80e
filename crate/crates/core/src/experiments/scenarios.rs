//! Ready-made instances: the heavy-tailed Weibull benchmark systems and the
//! two-server lock-in example for the empirical-mean scheduler.

use serde::Serialize;

use super::{least_squares_slope, ExperimentPlan, Simulation};
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::SystemConfig;
use crate::policies::PolicyKind;
use crate::stochastic::{
    exact_weibull_mean, ArrivalSpec, Exhaustion, LawSpec, PairSource, ServiceSpec, Timeline,
};

pub const WEIBULL_BETA: f64 = 0.5;
pub const WEIBULL_SERVICE_BOUND: u32 = 100;

/// Success probabilities by (type parity, server parity), counting types and
/// servers from 1: (odd, odd), (odd, even), (even, odd), (even, even).
const IOTA_BEFORE: [f64; 4] = [0.5, 0.7, 0.8, 0.4];
const IOTA_AFTER: [f64; 4] = [0.8, 0.4, 0.5, 0.7];

/// `iota_{i,j}` for a square benchmark system of the given size.
pub fn iota_table(size: usize, switched: bool) -> Matrix<f64> {
    let table = if switched { IOTA_AFTER } else { IOTA_BEFORE };
    Matrix::from_fn(size, size, |i, j| table[2 * (i % 2) + (j % 2)])
}

/// Exact service rates of the benchmark system.
pub fn weibull_rates(size: usize, switched: bool) -> Result<Matrix<f64>> {
    let iota = iota_table(size, switched);
    let mut rates = Matrix::filled(size, size, 0.0);
    for ((i, j), &p) in iota.iter() {
        rates[(i, j)] = 1.0 / exact_weibull_mean(p, WEIBULL_BETA, WEIBULL_SERVICE_BOUND)?;
    }
    Ok(rates)
}

fn weibull_sources(size: usize, switched: bool) -> Matrix<PairSource> {
    iota_table(size, switched).map(|&iota| {
        PairSource::Law(LawSpec::TruncatedWeibull {
            iota,
            beta: WEIBULL_BETA,
        })
    })
}

/// Square benchmark system with Bernoulli arrivals and truncated Weibull
/// service. With `switch_at`, the success probabilities are permuted from
/// that slot on.
pub fn weibull_instance(
    size: usize,
    arrival_rates: &[f64],
    horizon: u64,
    switch_at: Option<u64>,
) -> Result<ExperimentPlan> {
    if arrival_rates.len() != size {
        return Err(Error::dimension(format!(
            "{} arrival rates for {size} types",
            arrival_rates.len()
        )));
    }
    let system = SystemConfig {
        num_types: size,
        num_servers: size,
        arrival_bound: 1,
        service_bound: WEIBULL_SERVICE_BOUND,
        horizon,
    };
    let mut segments = vec![(0, weibull_sources(size, false))];
    if let Some(s) = switch_at {
        segments.push((s, weibull_sources(size, true)));
    }
    let services = ServiceSpec {
        segments: Timeline::new(segments, horizon)?,
    };
    let arrivals = ArrivalSpec::Bernoulli(Timeline::constant(arrival_rates.to_vec(), horizon));
    let plan = ExperimentPlan::new(system, arrivals, services);
    plan.validate()?;
    Ok(plan)
}

/// Two types, two servers. Own-server service takes 1 slot w.p. 0.99 and 100
/// slots w.p. 0.01; cross service always takes 10 slots. One job of each type
/// arrives at every odd slot. With `forced`, the first own-server job of each
/// type takes 100 slots.
pub fn counterexample_instance(horizon: u64, forced: bool) -> Result<ExperimentPlan> {
    let system = SystemConfig {
        num_types: 2,
        num_servers: 2,
        arrival_bound: 1,
        service_bound: 100,
        horizon,
    };
    let own = LawSpec::TwoPoint {
        v1: 1,
        p1: 0.99,
        v2: 100,
        p2: 0.01,
    };
    let sources = Matrix::from_fn(2, 2, |i, j| {
        if i != j {
            PairSource::Law(LawSpec::Constant { value: 10 })
        } else if forced {
            PairSource::Scripted {
                values: vec![100],
                on_exhaustion: Exhaustion::Then(own.clone()),
            }
        } else {
            PairSource::Law(own.clone())
        }
    });
    let plan = ExperimentPlan::new(
        system,
        ArrivalSpec::Pattern(vec![vec![0, 1], vec![0, 1]]),
        ServiceSpec::stationary(sources, horizon),
    );
    plan.validate()?;
    Ok(plan)
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct CounterexampleResult {
    /// Total queue length `Q_1(t) + Q_2(t)` for `t = 0..=horizon`.
    pub totals: Vec<u64>,
    /// Least-squares growth slope over the last half of the horizon.
    pub slope: f64,
    pub transitions_checked: u64,
    pub violations: Vec<String>,
}

impl CounterexampleResult {
    /// Least-squares slope of the total queue over slots `[from, to]`.
    pub fn slope_between(&self, from: u64, to: u64) -> f64 {
        let to = to.min(self.totals.len() as u64 - 1);
        let (xs, ys): (Vec<f64>, Vec<f64>) = (from..=to)
            .map(|t| (t as f64, self.totals[t as usize] as f64))
            .unzip();
        least_squares_slope(&xs, &ys)
    }

    pub fn mean_total(&self) -> f64 {
        self.totals.iter().sum::<u64>() as f64 / self.totals.len() as f64
    }
}

/// Runs the lock-in example under empirical-mean MaxWeight with default rate 1.
pub fn run_counterexample(horizon: u64, forced: bool, seed: u64) -> Result<CounterexampleResult> {
    run_counterexample_with(horizon, forced, seed, &PolicyKind::EmpiricalMean { default_rate: 1.0 })
}

pub fn run_counterexample_with(
    horizon: u64,
    forced: bool,
    seed: u64,
    policy: &PolicyKind,
) -> Result<CounterexampleResult> {
    if horizon < 10_000 {
        return Err(Error::config("counterexample horizon must be at least 10000"));
    }
    let mut plan = counterexample_instance(horizon, forced)?;
    plan.check_invariants = true;
    let mut sim = Simulation::new(&plan, policy, seed)?;
    let mut totals = Vec::with_capacity(horizon as usize + 1);
    totals.push(sim.state().total_queue());
    for _ in 0..horizon {
        sim.step()?;
        totals.push(sim.state().total_queue());
    }
    let monitor = sim.monitor().cloned().unwrap_or_default();
    let mut result = CounterexampleResult {
        totals,
        slope: 0.0,
        transitions_checked: monitor.transitions,
        violations: monitor.violations,
    };
    result.slope = result.slope_between(horizon / 2, horizon);
    Ok(result)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parity_table() {
        let m = iota_table(4, false);
        assert_eq!(m[(0, 0)], 0.5);
        assert_eq!(m[(0, 1)], 0.7);
        assert_eq!(m[(1, 0)], 0.8);
        assert_eq!(m[(1, 1)], 0.4);
        assert_eq!(m[(2, 3)], 0.7);
        let s = iota_table(4, true);
        assert_eq!((s[(0, 0)], s[(0, 1)], s[(1, 0)], s[(1, 1)]), (0.8, 0.4, 0.5, 0.7));
    }

    #[test]
    fn benchmark_rates() {
        let r = weibull_rates(2, false).unwrap();
        assert!((1.0 / r[(0, 0)] - 4.163).abs() < 1e-3);
        assert!((1.0 / r[(1, 1)] - 2.628).abs() < 1e-3);
        assert!((1.0 / r[(1, 0)] - 17.129).abs() < 1e-3);
    }

    #[test]
    fn benchmark_plan_switches() {
        let plan = weibull_instance(4, &[0.15; 4], 1000, Some(500)).unwrap();
        assert_eq!(plan.services.segments.len(), 2);
        assert!(weibull_instance(4, &[0.15; 3], 1000, None).is_err());
    }

    #[test]
    fn forced_lock_in_grows_linearly() {
        let r = run_counterexample(20_000, true, 1).unwrap();
        assert!((0.6..=1.0).contains(&r.slope), "slope {}", r.slope);
        assert_eq!(r.transitions_checked, 20_000);
        assert!(r.violations.is_empty());
    }

    #[test]
    fn oracle_avoids_lock_in() {
        let locked = run_counterexample(20_000, true, 1).unwrap();
        let oracle = run_counterexample_with(20_000, true, 1, &PolicyKind::Oracle { rates: None }).unwrap();
        assert!(oracle.slope.abs() < 0.2, "slope {}", oracle.slope);
        assert!(oracle.mean_total() < 0.25 * locked.mean_total());
    }

    #[test]
    fn short_horizon_rejected() {
        assert!(run_counterexample(100, true, 0).is_err());
    }
}
