//! Scheduling policies.
//!
//! Every policy sees the queue lengths `Q(t)` at the start of a slot, before
//! that slot's arrivals, and returns one pick per available server. Slot 0 is
//! handled by the runner (uniform random picks); policies are first asked at
//! slot 1. After each slot the runner feeds the slot's events back through
//! [`Policy::observe`].
//!
//! Frame-based MaxWeight and DAM.UCB are reconstructions from one-line
//! descriptions: the former freezes queue lengths and restarts its UCB
//! statistics every frame, the latter fixes a full server-to-type schedule
//! at the start of each epoch.

pub mod estimator;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

pub use estimator::{closed_form_stats, EstimatorState};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{SlotEvents, SystemConfig};
use crate::rng::{stream, StreamRole};

/// Policy selection with its parameters.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PolicyKind {
    /// MaxWeight with discounted UCB, `0 < gamma <= 1`.
    DiscountedUcb { gamma: f64, c1: f64 },
    /// MaxWeight with UCB; the same algorithm at `gamma = 1`.
    Ucb { c1: f64 },
    /// MaxWeight with the true rates. Without an explicit table the rates in
    /// effect at each slot are used.
    Oracle {
        #[serde(default)]
        rates: Option<Vec<Vec<f64>>>,
    },
    /// MaxWeight with plain empirical rates and no exploration bonus.
    EmpiricalMean { default_rate: f64 },
    FrameMaxweight { frame: u64, c1: f64 },
    DamUcb { epoch: u64, c1: f64 },
    Random,
}

impl PolicyKind {
    pub fn validate(&self, config: &SystemConfig) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::parameter(format!("{name} must be positive, got {v}")))
            }
        };
        match self {
            PolicyKind::DiscountedUcb { gamma, c1 } => {
                if !(*gamma > 0.0 && *gamma <= 1.0) {
                    return Err(Error::parameter(format!("gamma {gamma} must lie in (0, 1]")));
                }
                positive("c1", *c1)
            }
            PolicyKind::Ucb { c1 } => positive("c1", *c1),
            PolicyKind::Oracle { rates: Some(rows) } => {
                let m = Matrix::from_rows(rows.clone())?;
                if m.shape() != (config.num_types, config.num_servers) {
                    return Err(Error::dimension("oracle rate table has wrong shape"));
                }
                if m.as_slice().iter().any(|&r| !(r > 0.0 && r <= 1.0)) {
                    return Err(Error::parameter("oracle rates must lie in (0, 1]"));
                }
                Ok(())
            }
            PolicyKind::Oracle { rates: None } | PolicyKind::Random => Ok(()),
            PolicyKind::EmpiricalMean { default_rate } => {
                if *default_rate > 0.0 && *default_rate <= 1.0 {
                    Ok(())
                } else {
                    Err(Error::parameter("default_rate must lie in (0, 1]"))
                }
            }
            PolicyKind::FrameMaxweight { frame: len, c1 } | PolicyKind::DamUcb { epoch: len, c1 } => {
                if *len == 0 {
                    return Err(Error::parameter("frame/epoch length must be at least 1"));
                }
                positive("c1", *c1)
            }
        }
    }
}

/// How equal weights are resolved.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TieBreak {
    #[default]
    Lowest,
    Random,
}

/// Argmax with the configured tie rule.
pub struct TieBreaker {
    rng: Option<ChaCha8Rng>,
    scratch: Vec<usize>,
}

impl TieBreaker {
    pub fn lowest() -> Self {
        Self {
            rng: None,
            scratch: Vec::new(),
        }
    }

    pub fn random(rng: ChaCha8Rng) -> Self {
        Self {
            rng: Some(rng),
            scratch: Vec::new(),
        }
    }

    pub fn argmax(&mut self, weights: &[f64]) -> usize {
        let mut best = 0;
        for (k, &w) in weights.iter().enumerate().skip(1) {
            if w > weights[best] {
                best = k;
            }
        }
        match &mut self.rng {
            None => best,
            Some(rng) => {
                let top = weights[best];
                self.scratch.clear();
                self.scratch
                    .extend((0..weights.len()).filter(|&k| weights[k] == top));
                if self.scratch.len() == 1 {
                    best
                } else {
                    self.scratch[rng.gen_range(0..self.scratch.len())]
                }
            }
        }
    }
}

/// Inputs available to a policy at the start of slot `t`.
pub struct PickContext<'a> {
    pub t: u64,
    pub queues: &'a [u64],
    pub available: &'a [bool],
    /// True rates in effect at `t`, used only by the oracle.
    pub true_rates: &'a Matrix<f64>,
}

pub trait Policy {
    fn pick(&mut self, ctx: &PickContext<'_>) -> Vec<Option<usize>>;
    fn observe(&mut self, events: &SlotEvents);
}

/// Uniform random pick for every available server.
pub fn random_pick(num_types: usize, available: &[bool], rng: &mut ChaCha8Rng) -> Vec<Option<usize>> {
    available
        .iter()
        .map(|&free| free.then(|| rng.gen_range(0..num_types)))
        .collect()
}

/// MaxWeight with optimistic rates:
/// `argmax_i Q_i / max{phi^/N^ - b, 1}` per available server.
pub fn ucb_pick(
    queues: &[u64],
    est: &EstimatorState,
    t: u64,
    available: &[bool],
    tie: &mut TieBreaker,
) -> Vec<Option<usize>> {
    let mut weights = vec![0.0; queues.len()];
    available
        .iter()
        .enumerate()
        .map(|(j, &free)| {
            free.then(|| {
                for (i, w) in weights.iter_mut().enumerate() {
                    *w = queues[i] as f64 / est.optimistic_time(i, j, t);
                }
                tie.argmax(&weights)
            })
        })
        .collect()
}

/// MaxWeight with known rates: `argmax_i Q_i mu_{i,j}`.
pub fn oracle_pick(
    queues: &[u64],
    rates: &Matrix<f64>,
    available: &[bool],
    tie: &mut TieBreaker,
) -> Vec<Option<usize>> {
    let mut weights = vec![0.0; queues.len()];
    available
        .iter()
        .enumerate()
        .map(|(j, &free)| {
            free.then(|| {
                for (i, w) in weights.iter_mut().enumerate() {
                    *w = queues[i] as f64 * rates[(i, j)];
                }
                tie.argmax(&weights)
            })
        })
        .collect()
}

/// MaxWeight with `mu^ = completions / total service time`, falling back to
/// `default_rate` for pairs without samples. `stats` must be undiscounted.
pub fn empirical_mean_pick(
    queues: &[u64],
    stats: &EstimatorState,
    default_rate: f64,
    available: &[bool],
    tie: &mut TieBreaker,
) -> Vec<Option<usize>> {
    let (ni, nj) = stats.n_hat.shape();
    let rates = Matrix::from_fn(ni, nj, |i, j| {
        if stats.n_hat[(i, j)] > 0.0 {
            stats.rate(i, j)
        } else {
            default_rate
        }
    });
    oracle_pick(queues, &rates, available, tie)
}

struct UcbPolicy {
    est: EstimatorState,
    tie: TieBreaker,
}

impl Policy for UcbPolicy {
    fn pick(&mut self, ctx: &PickContext<'_>) -> Vec<Option<usize>> {
        ucb_pick(ctx.queues, &self.est, ctx.t, ctx.available, &mut self.tie)
    }

    fn observe(&mut self, events: &SlotEvents) {
        self.est.update(events);
    }
}

struct OraclePolicy {
    rates: Option<Matrix<f64>>,
    tie: TieBreaker,
}

impl Policy for OraclePolicy {
    fn pick(&mut self, ctx: &PickContext<'_>) -> Vec<Option<usize>> {
        let rates = self.rates.as_ref().unwrap_or(ctx.true_rates);
        oracle_pick(ctx.queues, rates, ctx.available, &mut self.tie)
    }

    fn observe(&mut self, _events: &SlotEvents) {}
}

struct EmpiricalMeanPolicy {
    stats: EstimatorState,
    default_rate: f64,
    tie: TieBreaker,
}

impl Policy for EmpiricalMeanPolicy {
    fn pick(&mut self, ctx: &PickContext<'_>) -> Vec<Option<usize>> {
        empirical_mean_pick(ctx.queues, &self.stats, self.default_rate, ctx.available, &mut self.tie)
    }

    fn observe(&mut self, events: &SlotEvents) {
        self.stats.update(events);
    }
}

/// Queue lengths frozen at each frame boundary; UCB statistics restart with
/// every frame.
pub struct FrameMaxWeight {
    est: EstimatorState,
    frame: u64,
    current: Option<u64>,
    snapshot: Vec<u64>,
    tie: TieBreaker,
}

impl FrameMaxWeight {
    pub fn new(est: EstimatorState, frame: u64, tie: TieBreaker) -> Self {
        Self {
            est,
            frame,
            current: None,
            snapshot: Vec::new(),
            tie,
        }
    }

    pub fn snapshot(&self) -> &[u64] {
        &self.snapshot
    }
}

impl Policy for FrameMaxWeight {
    fn pick(&mut self, ctx: &PickContext<'_>) -> Vec<Option<usize>> {
        let k = ctx.t / self.frame;
        if self.current != Some(k) {
            self.current = Some(k);
            self.snapshot = ctx.queues.to_vec();
            self.est.reset_statistics();
        }
        let local_t = ctx.t - k * self.frame;
        ucb_pick(&self.snapshot, &self.est, local_t, ctx.available, &mut self.tie)
    }

    fn observe(&mut self, events: &SlotEvents) {
        self.est.update(events);
    }
}

/// A complete server-to-type schedule is chosen at each epoch start from
/// cumulative UCB statistics and held for the whole epoch.
pub struct DamUcb {
    est: EstimatorState,
    epoch: u64,
    current: Option<u64>,
    schedule: Vec<usize>,
    tie: TieBreaker,
}

impl DamUcb {
    pub fn new(est: EstimatorState, epoch: u64, tie: TieBreaker) -> Self {
        Self {
            est,
            epoch,
            current: None,
            schedule: Vec::new(),
            tie,
        }
    }

    pub fn schedule(&self) -> &[usize] {
        &self.schedule
    }
}

impl Policy for DamUcb {
    fn pick(&mut self, ctx: &PickContext<'_>) -> Vec<Option<usize>> {
        let k = ctx.t / self.epoch;
        if self.current != Some(k) {
            self.current = Some(k);
            let all = vec![true; ctx.available.len()];
            self.schedule = ucb_pick(ctx.queues, &self.est, ctx.t, &all, &mut self.tie)
                .into_iter()
                .map(|p| p.unwrap_or(0))
                .collect();
        }
        ctx.available
            .iter()
            .zip(&self.schedule)
            .map(|(&free, &i)| free.then_some(i))
            .collect()
    }

    fn observe(&mut self, events: &SlotEvents) {
        self.est.update(events);
    }
}

struct RandomPolicy {
    num_types: usize,
    rng: ChaCha8Rng,
}

impl Policy for RandomPolicy {
    fn pick(&mut self, ctx: &PickContext<'_>) -> Vec<Option<usize>> {
        random_pick(self.num_types, ctx.available, &mut self.rng)
    }

    fn observe(&mut self, _events: &SlotEvents) {}
}

/// Instantiates a policy for one run.
pub fn build_policy(
    kind: &PolicyKind,
    config: &SystemConfig,
    seed: u64,
    tie: TieBreak,
) -> Result<Box<dyn Policy>> {
    kind.validate(config)?;
    let (ni, nj, us) = (config.num_types, config.num_servers, config.service_bound);
    let tie = match tie {
        TieBreak::Lowest => TieBreaker::lowest(),
        TieBreak::Random => TieBreaker::random(stream(seed, StreamRole::TieBreak, 0, 0)),
    };
    Ok(match kind {
        PolicyKind::DiscountedUcb { gamma, c1 } => Box::new(UcbPolicy {
            est: EstimatorState::new(ni, nj, *gamma, *c1, us)?,
            tie,
        }),
        PolicyKind::Ucb { c1 } => Box::new(UcbPolicy {
            est: EstimatorState::new(ni, nj, 1.0, *c1, us)?,
            tie,
        }),
        PolicyKind::Oracle { rates } => Box::new(OraclePolicy {
            rates: rates.clone().map(Matrix::from_rows).transpose()?,
            tie,
        }),
        PolicyKind::EmpiricalMean { default_rate } => Box::new(EmpiricalMeanPolicy {
            stats: EstimatorState::new(ni, nj, 1.0, 1.0, us)?,
            default_rate: *default_rate,
            tie,
        }),
        PolicyKind::FrameMaxweight { frame, c1 } => Box::new(FrameMaxWeight::new(
            EstimatorState::new(ni, nj, 1.0, *c1, us)?,
            *frame,
            tie,
        )),
        PolicyKind::DamUcb { epoch, c1 } => Box::new(DamUcb::new(
            EstimatorState::new(ni, nj, 1.0, *c1, us)?,
            *epoch,
            tie,
        )),
        PolicyKind::Random => Box::new(RandomPolicy {
            num_types: ni,
            rng: stream(seed, StreamRole::Policy, 0, 0),
        }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn est_2x1(mean_times: [f64; 2], counts: [f64; 2], c1: f64) -> EstimatorState {
        let mut est = EstimatorState::new(2, 1, 1.0, c1, 1).unwrap();
        for i in 0..2 {
            est.n_hat[(i, 0)] = counts[i];
            est.phi_hat[(i, 0)] = counts[i] * mean_times[i];
        }
        est
    }

    #[test]
    fn unexplored_pairs_use_unit_denominator() {
        let est = EstimatorState::new(2, 1, 0.9, 1.0, 10).unwrap();
        let picks = ucb_pick(&[0, 5], &est, 3, &[true], &mut TieBreaker::lowest());
        assert_eq!(picks, vec![Some(1)]);
    }

    #[test]
    fn optimistic_denominators_drive_pick() {
        // mean times [2, 4] with bonuses [0.5, 3.5] give denominators [1.5, 1].
        let mut est = est_2x1([2.0, 4.0], [1.0, 1.0], 1.0);
        let t = 3;
        let log_sum = (t as f64).ln();
        // Choose counts so that bonus_i = sqrt(ln t / N_i) hits the targets.
        for (i, b) in [0.5f64, 3.5].into_iter().enumerate() {
            let n = log_sum / (b * b);
            let mean = [2.0, 4.0][i];
            est.n_hat[(i, 0)] = n;
            est.phi_hat[(i, 0)] = n * mean;
        }
        assert!((est.bonus(0, 0, t) - 0.5).abs() < 1e-12);
        assert!((est.optimistic_time(0, 0, t) - 1.5).abs() < 1e-12);
        assert_eq!(est.optimistic_time(1, 0, t), 1.0);
        let picks = ucb_pick(&[4, 4], &est, t, &[true], &mut TieBreaker::lowest());
        assert_eq!(picks, vec![Some(1)]);
    }

    #[test]
    fn ties_go_to_lowest_type() {
        let est = est_2x1([3.0, 3.0], [10.0, 10.0], 1e-9);
        let picks = ucb_pick(&[3, 3], &est, 5, &[true], &mut TieBreaker::lowest());
        assert_eq!(picks, vec![Some(0)]);
    }

    #[test]
    fn busy_servers_get_no_pick() {
        let est = EstimatorState::new(2, 2, 1.0, 1.0, 10).unwrap();
        let picks = ucb_pick(&[1, 2], &est, 1, &[false, true], &mut TieBreaker::lowest());
        assert_eq!(picks, vec![None, Some(1)]);
    }

    #[test]
    fn oracle_examples() {
        let rates = Matrix::from_rows(vec![vec![0.1], vec![1.0]]).unwrap();
        assert_eq!(oracle_pick(&[10, 1], &rates, &[true], &mut TieBreaker::lowest()), vec![Some(0)]);
        assert_eq!(oracle_pick(&[0, 0], &rates, &[true], &mut TieBreaker::lowest()), vec![Some(0)]);
        let halved = rates.map(|r| r * 0.5);
        for q in [[3u64, 1], [10, 2], [1, 7]] {
            assert_eq!(
                oracle_pick(&q, &rates, &[true], &mut TieBreaker::lowest()),
                oracle_pick(&q, &halved, &[true], &mut TieBreaker::lowest())
            );
        }
    }

    #[test]
    fn empirical_mean_without_data_is_oracle_with_default() {
        let stats = EstimatorState::new(2, 2, 1.0, 1.0, 100).unwrap();
        let default = Matrix::filled(2, 2, 1.0);
        for q in [[0u64, 0], [5, 1], [1, 5]] {
            assert_eq!(
                empirical_mean_pick(&q, &stats, 1.0, &[true, true], &mut TieBreaker::lowest()),
                oracle_pick(&q, &default, &[true, true], &mut TieBreaker::lowest())
            );
        }
    }

    #[test]
    fn empirical_mean_locks_into_cross_assignment() {
        // After one 100-slot sample on each own pair only.
        let mut stats = EstimatorState::new(2, 2, 1.0, 1.0, 100).unwrap();
        for i in 0..2 {
            stats.n_hat[(i, i)] = 1.0;
            stats.phi_hat[(i, i)] = 100.0;
        }
        assert!((stats.rate(0, 0) - 0.01).abs() < 1e-15);
        let picks = empirical_mean_pick(&[49, 49], &stats, 1.0, &[true, true], &mut TieBreaker::lowest());
        assert_eq!(picks, vec![Some(1), Some(0)]);
        // Cross pairs then observe S = 10: weights 53 * 0.1 = 5.3 vs 53 * 0.01 = 0.53.
        for (i, j) in [(0, 1), (1, 0)] {
            stats.n_hat[(i, j)] = 1.0;
            stats.phi_hat[(i, j)] = 10.0;
        }
        let picks = empirical_mean_pick(&[53, 53], &stats, 1.0, &[true, true], &mut TieBreaker::lowest());
        assert_eq!(picks, vec![Some(1), Some(0)]);
    }

    fn ctx<'a>(t: u64, q: &'a [u64], avail: &'a [bool], rates: &'a Matrix<f64>) -> PickContext<'a> {
        PickContext {
            t,
            queues: q,
            available: avail,
            true_rates: rates,
        }
    }

    #[test]
    fn unit_frame_is_plain_maxweight_on_current_queues() {
        let est = EstimatorState::new(3, 1, 1.0, 0.01, 10).unwrap();
        let mut frame = FrameMaxWeight::new(est, 1, TieBreaker::lowest());
        let rates = Matrix::filled(3, 1, 1.0);
        for (t, q) in [(1u64, [1u64, 4, 2]), (2, [7, 0, 2]), (3, [0, 0, 9])] {
            let expected = q.iter().enumerate().max_by_key(|(i, &v)| (v, std::cmp::Reverse(*i))).unwrap().0;
            assert_eq!(frame.pick(&ctx(t, &q, &[true], &rates)), vec![Some(expected)]);
            let mut events = SlotEvents {
                t,
                arrivals: vec![0; 3],
                picks: vec![None],
                scheduled: vec![Some(expected)],
                started: vec![],
                completions: Matrix::filled(3, 1, false),
                nonidle: vec![true],
            };
            events.completions[(expected, 0)] = true;
            frame.observe(&events);
        }
    }

    #[test]
    fn frame_ignores_live_queue_within_frame() {
        let est = EstimatorState::new(2, 1, 1.0, 0.01, 10).unwrap();
        let mut frame = FrameMaxWeight::new(est, 100, TieBreaker::lowest());
        let rates = Matrix::filled(2, 1, 1.0);
        let first = frame.pick(&ctx(1, &[9, 1], &[true], &rates));
        let second = frame.pick(&ctx(2, &[0, 50], &[true], &rates));
        assert_eq!(first, second);
        assert_eq!(frame.snapshot(), &[9, 1]);
        let next_frame = frame.pick(&ctx(100, &[0, 50], &[true], &rates));
        assert_eq!(next_frame, vec![Some(1)]);
    }

    #[test]
    fn dam_schedule_is_constant_within_epoch() {
        let est = EstimatorState::new(2, 2, 1.0, 0.01, 10).unwrap();
        let mut dam = DamUcb::new(est, 10, TieBreaker::lowest());
        let rates = Matrix::filled(2, 2, 1.0);
        let a = dam.pick(&ctx(10, &[1, 5], &[true, true], &rates));
        let schedule = dam.schedule().to_vec();
        let b = dam.pick(&ctx(11, &[9, 0], &[true, false], &rates));
        assert_eq!(dam.schedule(), schedule.as_slice());
        assert_eq!(a, vec![Some(1), Some(1)]);
        assert_eq!(b, vec![Some(1), None]);
    }

    #[test]
    fn random_tie_breaking_only_among_maxima() {
        let mut tie = TieBreaker::random(stream(1, StreamRole::TieBreak, 0, 0));
        let mut seen = [0; 4];
        for _ in 0..400 {
            seen[tie.argmax(&[1.0, 3.0, 0.0, 3.0])] += 1;
        }
        assert_eq!(seen[0] + seen[2], 0);
        assert!(seen[1] > 100 && seen[3] > 100);
    }

    #[test]
    fn policy_kind_validation() {
        let cfg = SystemConfig {
            num_types: 2,
            num_servers: 2,
            arrival_bound: 1,
            service_bound: 10,
            horizon: 10,
        };
        assert!(PolicyKind::DiscountedUcb { gamma: 1.5, c1: 1.0 }.validate(&cfg).is_err());
        assert!(PolicyKind::Ucb { c1: -1.0 }.validate(&cfg).is_err());
        assert!(PolicyKind::FrameMaxweight { frame: 0, c1: 1.0 }.validate(&cfg).is_err());
        assert!(PolicyKind::EmpiricalMean { default_rate: 0.0 }.validate(&cfg).is_err());
        assert!(PolicyKind::Oracle { rates: Some(vec![vec![0.5]]) }.validate(&cfg).is_err());
        assert!(PolicyKind::Oracle { rates: Some(vec![vec![0.5; 2]; 2]) }.validate(&cfg).is_ok());
    }

    proptest! {
        #[test]
        fn shrinking_count_never_lowers_weight(mean in 1.0f64..50.0, n in 0.01f64..100.0, shrink in 0.01f64..1.0, t in 2u64..10_000, c1 in 0.001f64..2.0) {
            let mut est = EstimatorState::new(1, 1, 1.0, c1, 100).unwrap();
            est.n_hat[(0, 0)] = n;
            est.phi_hat[(0, 0)] = n * mean;
            let before = 1.0 / est.optimistic_time(0, 0, t);
            est.n_hat[(0, 0)] = n * shrink;
            est.phi_hat[(0, 0)] = n * shrink * mean;
            let after = 1.0 / est.optimistic_time(0, 0, t);
            prop_assert!(after >= before - 1e-12);
        }

        #[test]
        fn picks_invariant_under_queue_scaling(q in proptest::collection::vec(0u64..1000, 3), k in 1u64..50,
                                               means in proptest::collection::vec(1.0f64..20.0, 6),
                                               counts in proptest::collection::vec(0.0f64..30.0, 6)) {
            let mut est = EstimatorState::new(3, 2, 0.99, 0.1, 20).unwrap();
            let rates = Matrix::from_fn(3, 2, |i, j| 1.0 / means[i * 2 + j]);
            for i in 0..3 {
                for j in 0..2 {
                    est.n_hat[(i, j)] = counts[i * 2 + j];
                    est.phi_hat[(i, j)] = counts[i * 2 + j] * means[i * 2 + j];
                }
            }
            let scaled: Vec<u64> = q.iter().map(|&v| v * k).collect();
            let avail = [true, true];
            prop_assert_eq!(ucb_pick(&q, &est, 50, &avail, &mut TieBreaker::lowest()),
                            ucb_pick(&scaled, &est, 50, &avail, &mut TieBreaker::lowest()));
            prop_assert_eq!(oracle_pick(&q, &rates, &avail, &mut TieBreaker::lowest()),
                            oracle_pick(&scaled, &rates, &avail, &mut TieBreaker::lowest()));
            prop_assert_eq!(empirical_mean_pick(&q, &est, 1.0, &avail, &mut TieBreaker::lowest()),
                            empirical_mean_pick(&scaled, &est, 1.0, &avail, &mut TieBreaker::lowest()));
        }
    }
}
