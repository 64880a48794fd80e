//! Seeded experiment runner and cross-run statistics.
//!
//! A run is fully determined by `(plan, policy, seed)`. Run `r` of a plan
//! uses seed `root_seed + r`, and every random source inside a run draws from
//! its own stream derived from that seed, so different policies facing the
//! same seed see the same arrivals and the same per-pair service draws in
//! order. Runs are independent and are fanned out across threads; results
//! are always folded in ascending seed order.

pub mod scenarios;
pub mod tail;

use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::Serialize;

pub use scenarios::{
    counterexample_instance, run_counterexample, run_counterexample_with, weibull_instance,
    CounterexampleResult,
};
pub use tail::{
    percentile_thresholds, tail_estimate, tail_from_samples, tail_samples, TailEstimate, TailFit,
};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{advance_slot, InvariantMonitor, SlotEvents, SystemConfig, SystemState};
use crate::policies::{build_policy, random_pick, PickContext, Policy, PolicyKind, TieBreak};
use crate::rng::{stream, StreamRole};
use crate::stochastic::{ArrivalProcess, ArrivalSpec, ServiceProcess, ServiceSpec};

/// Slope magnitude below which a finite-horizon run counts as stable.
pub const STABILITY_SLOPE: f64 = 1e-3;

#[derive(Clone, Debug)]
pub struct ExperimentPlan {
    pub system: SystemConfig,
    pub arrivals: ArrivalSpec,
    pub services: ServiceSpec,
    /// Named policies to compare.
    pub policies: Vec<(String, PolicyKind)>,
    pub num_runs: usize,
    pub root_seed: u64,
    /// Slots between recorded points; `Q(0)` and `Q(horizon)` are always on
    /// the grid when the stride divides the horizon.
    pub sample_stride: u64,
    /// Slots at which `||Q(t)||_2` is recorded for tail estimates.
    pub tail_slots: Vec<u64>,
    pub tie_break: TieBreak,
    /// Check the queue-dynamics invariants at every transition.
    pub check_invariants: bool,
}

impl ExperimentPlan {
    /// A single-policy plan with the usual recording defaults.
    pub fn new(system: SystemConfig, arrivals: ArrivalSpec, services: ServiceSpec) -> Self {
        Self {
            system,
            arrivals,
            services,
            policies: Vec::new(),
            num_runs: 1,
            root_seed: 0,
            sample_stride: 10,
            tail_slots: Vec::new(),
            tie_break: TieBreak::Lowest,
            check_invariants: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.system.validate()?;
        if self.num_runs == 0 {
            return Err(Error::config("num_runs must be at least 1"));
        }
        if self.sample_stride == 0 {
            return Err(Error::config("sample_stride must be at least 1"));
        }
        if let Some(&t) = self.tail_slots.iter().find(|&&t| t > self.system.horizon) {
            return Err(Error::config(format!(
                "tail slot {t} beyond horizon {}",
                self.system.horizon
            )));
        }
        self.arrivals.validate(&self.system)?;
        if let ArrivalSpec::Bernoulli(tl) = &self.arrivals {
            if tl.horizon() < self.system.horizon {
                return Err(Error::config("arrival timeline shorter than the horizon"));
            }
        }
        if self.services.segments.horizon() < self.system.horizon {
            return Err(Error::config("service timeline shorter than the horizon"));
        }
        ServiceProcess::new(&self.services, &self.system, 0)?;
        for (name, kind) in &self.policies {
            kind.validate(&self.system)
                .map_err(|e| Error::Config(format!("policy {name}: {e}")))?;
        }
        Ok(())
    }

    pub fn seed_for_run(&self, run: usize) -> u64 {
        self.root_seed.wrapping_add(run as u64)
    }

    /// Recorded slots: `0, stride, 2 stride, ...` up to the horizon.
    pub fn recording_grid(&self) -> Vec<u64> {
        (0..=self.system.horizon)
            .step_by(self.sample_stride as usize)
            .collect()
    }
}

/// Slot-by-slot driver for one run.
pub struct Simulation {
    config: SystemConfig,
    state: SystemState,
    arrivals: ArrivalProcess,
    services: ServiceProcess,
    policy: Box<dyn Policy>,
    slot_zero: ChaCha8Rng,
    monitor: Option<InvariantMonitor>,
    arrival_buf: Vec<u32>,
}

impl Simulation {
    pub fn new(plan: &ExperimentPlan, policy: &PolicyKind, seed: u64) -> Result<Self> {
        let config = plan.system;
        Ok(Self {
            state: SystemState::empty(&config),
            arrivals: ArrivalProcess::new(plan.arrivals.clone(), &config, seed)?,
            services: ServiceProcess::new(&plan.services, &config, seed)?,
            policy: build_policy(policy, &config, seed, plan.tie_break)?,
            slot_zero: stream(seed, StreamRole::SlotZero, 0, 0),
            monitor: plan.check_invariants.then(InvariantMonitor::default),
            arrival_buf: vec![0; config.num_types],
            config,
        })
    }

    pub fn state(&self) -> &SystemState {
        &self.state
    }

    pub fn monitor(&self) -> Option<&InvariantMonitor> {
        self.monitor.as_ref()
    }

    /// Runs slot `state().t`: picks from `Q(t)`, arrivals, service, then the
    /// policy observes the slot's events.
    pub fn step(&mut self) -> Result<SlotEvents> {
        let t = self.state.t;
        let available: Vec<bool> = self.state.servers.iter().map(|s| s.is_available()).collect();
        let picks = if t == 0 {
            random_pick(self.config.num_types, &available, &mut self.slot_zero)
        } else {
            let ctx = PickContext {
                t,
                queues: &self.state.queues,
                available: &available,
                true_rates: self.services.rates_at(t)?,
            };
            self.policy.pick(&ctx)
        };
        self.arrivals.draw(t, &mut self.arrival_buf)?;
        let before = self.monitor.is_some().then(|| self.state.queues.clone());
        let events = advance_slot(
            &self.config,
            &mut self.state,
            &self.arrival_buf,
            &picks,
            &mut self.services,
        )?;
        if let (Some(monitor), Some(before)) = (self.monitor.as_mut(), before) {
            monitor.check(&self.config, &before, &self.state, &events);
        }
        self.policy.observe(&events);
        Ok(events)
    }
}

/// Recorded output of one run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Trajectory {
    pub seed: u64,
    pub slots: Vec<u64>,
    /// Total queue length `sum_i Q_i(t)` at each recorded slot.
    pub total_queue: Vec<u64>,
    /// `(1/T) sum_{tau=1}^{T} sum_i Q_i(tau)`.
    pub time_avg: f64,
    /// `(t, ||Q(t)||_2)` for each requested tail slot.
    pub tail: Vec<(u64, f64)>,
    pub transitions_checked: u64,
    pub violations: Vec<String>,
}

pub fn run_simulation(plan: &ExperimentPlan, policy: &PolicyKind, seed: u64) -> Result<Trajectory> {
    let mut sim = Simulation::new(plan, policy, seed)?;
    let horizon = plan.system.horizon;
    let stride = plan.sample_stride;
    let mut slots = Vec::with_capacity((horizon / stride + 1) as usize);
    let mut total_queue = Vec::with_capacity(slots.capacity());
    let mut tail = Vec::with_capacity(plan.tail_slots.len());
    let mut sum = 0u128;

    for t in 0..=horizon {
        let state = sim.state();
        let total = state.total_queue();
        if t > 0 {
            sum += u128::from(total);
        }
        if t % stride == 0 {
            slots.push(t);
            total_queue.push(total);
        }
        if plan.tail_slots.contains(&t) {
            tail.push((t, state.queue_l2_norm()));
        }
        if t < horizon {
            sim.step()?;
        }
    }

    let (transitions_checked, violations) = match sim.monitor() {
        Some(m) => (m.transitions, m.violations.clone()),
        None => (0, Vec::new()),
    };
    Ok(Trajectory {
        seed,
        slots,
        total_queue,
        time_avg: if horizon == 0 { 0.0 } else { sum as f64 / horizon as f64 },
        tail,
        transitions_checked,
        violations,
    })
}

/// All runs of one policy, in run order. `threads = None` uses the global
/// thread pool.
pub fn run_policy(plan: &ExperimentPlan, policy: &PolicyKind, threads: Option<usize>) -> Result<Vec<Trajectory>> {
    plan.validate()?;
    let job = || {
        (0..plan.num_runs)
            .into_par_iter()
            .map(|r| run_simulation(plan, policy, plan.seed_for_run(r)))
            .collect::<Result<Vec<_>>>()
    };
    match threads {
        None => job(),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n.max(1))
            .build()
            .map_err(|e| Error::Config(format!("thread pool: {e}")))?
            .install(job),
    }
}

/// Pointwise statistics across runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunAggregate {
    pub runs: usize,
    pub seeds: Vec<u64>,
    pub slots: Vec<u64>,
    pub mean_total: Vec<f64>,
    /// `1.96 s / sqrt(R)` with the sample standard deviation `s`.
    pub half_width: Vec<f64>,
    pub time_avg: f64,
    pub time_avg_half_width: f64,
    /// Every run's `||Q(t)||_2` per tail slot, in seed order.
    pub tail_samples: Vec<(u64, Vec<f64>)>,
    /// Least-squares slope of `mean_total` over the last half of the horizon.
    pub last_half_slope: f64,
}

impl RunAggregate {
    pub fn stable(&self) -> bool {
        self.last_half_slope.abs() < STABILITY_SLOPE
    }

    pub fn final_mean(&self) -> f64 {
        self.mean_total.last().copied().unwrap_or(0.0)
    }

    /// Average of `mean_total` over recorded slots in `[from, to]`.
    pub fn window_mean(&self, from: u64, to: u64) -> f64 {
        let (sum, n) = self
            .slots
            .iter()
            .zip(&self.mean_total)
            .filter(|(&t, _)| t >= from && t <= to)
            .fold((0.0, 0usize), |(s, n), (_, &v)| (s + v, n + 1));
        if n == 0 {
            f64::NAN
        } else {
            sum / n as f64
        }
    }
}

fn mean_and_half_width(values: impl Iterator<Item = f64> + Clone) -> (f64, f64) {
    let n = values.clone().count();
    let mean = values.clone().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let var = values.map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1) as f64;
    (mean, 1.96 * var.sqrt() / (n as f64).sqrt())
}

pub fn aggregate_runs(trajectories: &[Trajectory]) -> Result<RunAggregate> {
    let first = trajectories
        .first()
        .ok_or_else(|| Error::config("no trajectories to aggregate"))?;
    let mut runs: Vec<&Trajectory> = trajectories.iter().collect();
    runs.sort_by_key(|r| r.seed);
    for r in &runs {
        if r.slots != first.slots {
            return Err(Error::dimension(format!("run with seed {} has a different grid", r.seed)));
        }
        if r.tail.iter().map(|p| p.0).ne(first.tail.iter().map(|p| p.0)) {
            return Err(Error::dimension(format!("run with seed {} has different tail slots", r.seed)));
        }
    }

    let mut mean_total = Vec::with_capacity(first.slots.len());
    let mut half_width = Vec::with_capacity(first.slots.len());
    for k in 0..first.slots.len() {
        let (m, h) = mean_and_half_width(runs.iter().map(|r| r.total_queue[k] as f64));
        mean_total.push(m);
        half_width.push(h);
    }
    let (time_avg, time_avg_half_width) = mean_and_half_width(runs.iter().map(|r| r.time_avg));
    let tail_samples = first
        .tail
        .iter()
        .enumerate()
        .map(|(k, &(t, _))| (t, runs.iter().map(|r| r.tail[k].1).collect()))
        .collect();

    let horizon = first.slots.last().copied().unwrap_or(0);
    let (xs, ys): (Vec<f64>, Vec<f64>) = first
        .slots
        .iter()
        .zip(&mean_total)
        .filter(|(&t, _)| 2 * t >= horizon)
        .map(|(&t, &m)| (t as f64, m))
        .unzip();

    Ok(RunAggregate {
        runs: runs.len(),
        seeds: runs.iter().map(|r| r.seed).collect(),
        slots: first.slots.clone(),
        mean_total,
        half_width,
        time_avg,
        time_avg_half_width,
        tail_samples,
        last_half_slope: least_squares_slope(&xs, &ys),
    })
}

/// Ordinary least-squares slope; 0 when `x` has no spread.
pub fn least_squares_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len().min(ys.len());
    if n < 2 {
        return 0.0;
    }
    let mx = xs[..n].iter().sum::<f64>() / n as f64;
    let my = ys[..n].iter().sum::<f64>() / n as f64;
    let (mut sxy, mut sxx) = (0.0, 0.0);
    for (x, y) in xs[..n].iter().zip(&ys[..n]) {
        sxy += (x - mx) * (y - my);
        sxx += (x - mx) * (x - mx);
    }
    if sxx == 0.0 {
        0.0
    } else {
        sxy / sxx
    }
}

/// True rate matrices of a plan's service timeline.
pub fn true_rates(plan: &ExperimentPlan) -> Result<crate::stochastic::Timeline<Matrix<f64>>> {
    plan.services.rates(plan.system.service_bound)
}
