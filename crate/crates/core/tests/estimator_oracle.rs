//! Incremental estimator statistics against the direct start-time-discounted
//! sums over completed jobs, on random trajectories of a real system.

use proptest::prelude::*;

use qsched_core::experiments::{ExperimentPlan, Simulation};
use qsched_core::matrix::Matrix;
use qsched_core::model::SystemConfig;
use qsched_core::policies::{closed_form_stats, EstimatorState, PolicyKind};
use qsched_core::stochastic::{ArrivalSpec, LawSpec, PairSource, ServiceSpec, Timeline};

fn random_plan(horizon: u64, lambda: f64) -> ExperimentPlan {
    let system = SystemConfig {
        num_types: 3,
        num_servers: 3,
        arrival_bound: 1,
        service_bound: 6,
        horizon,
    };
    let law = LawSpec::TruncatedWeibull { iota: 0.6, beta: 0.7 };
    let services = ServiceSpec::stationary(Matrix::filled(3, 3, PairSource::Law(law)), horizon);
    let arrivals = ArrivalSpec::Bernoulli(Timeline::constant(vec![lambda; 3], horizon));
    ExperimentPlan::new(system, arrivals, services)
}

fn close(a: f64, b: f64) -> bool {
    let scale = a.abs().max(b.abs());
    scale < 1e-290 || (a - b).abs() <= 1e-9 * scale
}

fn check(gamma: f64, seed: u64, horizon: u64, lambda: f64) -> Result<(), TestCaseError> {
    let plan = random_plan(horizon, lambda);
    let mut sim = Simulation::new(&plan, &PolicyKind::Random, seed).unwrap();
    let mut est = EstimatorState::new(3, 3, gamma, 0.01, 6).unwrap();
    let mut jobs: Matrix<Vec<(u64, u32)>> = Matrix::filled(3, 3, Vec::new());
    for t in 1..=horizon {
        let events = sim.step().unwrap();
        for &(j, i, s) in &events.started {
            jobs[(i, j)].push((events.t, s));
        }
        est.update(&events);
        for ((i, j), list) in jobs.iter() {
            let done: Vec<(u64, u32)> = list.iter().copied().filter(|&(s, l)| s + u64::from(l) <= t).collect();
            let (n, phi) = closed_form_stats(&done, t, gamma).unwrap();
            prop_assert!(close(est.n_hat[(i, j)], n), "t={t} pair ({i},{j}) n {} vs {n}", est.n_hat[(i, j)]);
            prop_assert!(close(est.phi_hat[(i, j)], phi), "t={t} pair ({i},{j}) phi {} vs {phi}", est.phi_hat[(i, j)]);
        }
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn incremental_matches_closed_form(gamma_idx in 0usize..4, seed in any::<u64>(), lambda in 0.05f64..0.6) {
        let gamma = [0.3, 0.9, 0.999, 1.0][gamma_idx];
        check(gamma, seed, 400, lambda)?;
    }
}

#[test]
fn undiscounted_statistics_are_exact_counts() {
    let plan = random_plan(500, 0.3);
    let mut sim = Simulation::new(&plan, &PolicyKind::Random, 3).unwrap();
    let mut est = EstimatorState::new(3, 3, 1.0, 0.01, 6).unwrap();
    let mut count = Matrix::filled(3, 3, 0u32);
    let mut busy = Matrix::filled(3, 3, 0u32);
    let mut in_flight: Matrix<Option<u32>> = Matrix::filled(3, 3, None);
    for _ in 0..500 {
        let events = sim.step().unwrap();
        for &(j, i, s) in &events.started {
            in_flight[(i, j)] = Some(s);
        }
        for ((i, j), &fired) in events.completions.iter() {
            if fired && events.nonidle[j] {
                if let Some(s) = in_flight[(i, j)].take() {
                    count[(i, j)] += 1;
                    busy[(i, j)] += s;
                }
            }
        }
        est.update(&events);
        for ((i, j), &c) in count.iter() {
            assert_eq!(est.n_hat[(i, j)], f64::from(c));
            assert_eq!(est.phi_hat[(i, j)], f64::from(busy[(i, j)]));
        }
    }
}
