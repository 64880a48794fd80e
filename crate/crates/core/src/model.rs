//! The slotted system state machine.
//!
//! One call to [`advance_slot`] executes a full slot `t`:
//!
//! 1. arrivals `A(t)` join the waiting queues,
//! 2. available servers that picked a type are handed a waiting job in
//!    ascending server order; a server whose picked type has no waiting job
//!    idles and stays available,
//! 3. every busy server serves one slot; a job whose remaining time reaches
//!    zero completes at the end of the slot and frees its server,
//! 4. `Q_i(t+1) = Q_i(t) + A_i(t) - sum_j 1_{i,j}(t) * eta_j(t)`.
//!
//! Picks are decided from `Q(t)` before arrivals are added; the idling test
//! sees `Q~_i(t) + A_i(t)`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::Matrix;

/// Static description of an instance.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub num_types: usize,
    pub num_servers: usize,
    /// Upper bound on arrivals per type per slot.
    pub arrival_bound: u32,
    /// Upper bound on any service time, in slots.
    pub service_bound: u32,
    pub horizon: u64,
}

impl SystemConfig {
    pub fn validate(&self) -> Result<()> {
        if self.num_types == 0 || self.num_servers == 0 {
            return Err(Error::config("num_types and num_servers must be positive"));
        }
        if self.arrival_bound == 0 {
            return Err(Error::config("arrival_bound must be at least 1"));
        }
        if self.service_bound == 0 {
            return Err(Error::config("service_bound must be at least 1"));
        }
        if self.horizon == 0 {
            return Err(Error::config("horizon must be positive"));
        }
        Ok(())
    }
}

/// What a single server is doing at the start of a slot.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct ServerRecord {
    pub assigned_type: Option<usize>,
    /// Slots of the current job already served.
    pub elapsed: u32,
    /// Slots until the current job completes.
    pub remaining: u32,
}

impl ServerRecord {
    pub fn is_available(&self) -> bool {
        self.assigned_type.is_none()
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SystemState {
    pub t: u64,
    /// Jobs of each type in the system, including those in service.
    pub queues: Vec<u64>,
    /// Jobs of each type not yet handed to a server.
    pub waiting: Vec<u64>,
    pub servers: Vec<ServerRecord>,
}

impl SystemState {
    pub fn empty(config: &SystemConfig) -> Self {
        Self {
            t: 0,
            queues: vec![0; config.num_types],
            waiting: vec![0; config.num_types],
            servers: vec![ServerRecord::default(); config.num_servers],
        }
    }

    pub fn total_queue(&self) -> u64 {
        self.queues.iter().sum()
    }

    pub fn queue_l2_norm(&self) -> f64 {
        self.queues
            .iter()
            .map(|&q| (q as f64) * (q as f64))
            .sum::<f64>()
            .sqrt()
    }

    /// Number of servers currently holding a job of type `i`.
    pub fn in_service(&self, i: usize) -> u64 {
        self.servers
            .iter()
            .filter(|s| s.assigned_type == Some(i))
            .count() as u64
    }

    /// Checks the structural invariants of a state.
    pub fn check(&self, config: &SystemConfig) -> Result<()> {
        for s in &self.servers {
            let idle = s.assigned_type.is_none();
            if idle != (s.remaining == 0) || idle != (s.elapsed == 0) {
                return Err(Error::contract(format!("inconsistent server record {s:?}")));
            }
            if s.elapsed + s.remaining > config.service_bound {
                return Err(Error::contract(format!(
                    "server record {s:?} exceeds service bound {}",
                    config.service_bound
                )));
            }
        }
        for i in 0..self.queues.len() {
            let busy = self.in_service(i);
            if self.queues[i] < self.waiting[i]
                || self.queues[i] - self.waiting[i] != busy
                || busy > config.num_servers as u64
            {
                return Err(Error::contract(format!(
                    "type {i}: Q={} Q~={} but {busy} servers busy on it",
                    self.queues[i], self.waiting[i]
                )));
            }
        }
        Ok(())
    }
}

/// Everything that happened during one slot.
#[derive(Clone, Debug, PartialEq)]
pub struct SlotEvents {
    pub t: u64,
    pub arrivals: Vec<u32>,
    /// The pick of each server (`None` for busy servers and servers that
    /// were not asked to pick).
    pub picks: Vec<Option<usize>>,
    /// `I_j(t)`: the type server `j` was scheduled to during the slot,
    /// either through a pick or because it was busy on that type.
    pub scheduled: Vec<Option<usize>>,
    /// `(server, type, service time)` for every job started this slot.
    pub started: Vec<(usize, usize, u32)>,
    /// `1_{i,j}(t)`: job finished at the end of the slot, or the server idled
    /// on its pick.
    pub completions: Matrix<bool>,
    /// `eta_j(t)`: false exactly when server `j` idled.
    pub nonidle: Vec<bool>,
}

impl SlotEvents {
    /// `sum_j 1_{i,j}(t) eta_j(t)`, the number of type `i` jobs that left.
    pub fn departures(&self, i: usize) -> u64 {
        (0..self.nonidle.len())
            .filter(|&j| self.completions[(i, j)] && self.nonidle[j])
            .count() as u64
    }

    /// `sum_j 1_{i,j}(t)` without the idling mask.
    pub fn indicator_count(&self, i: usize) -> u64 {
        (0..self.nonidle.len())
            .filter(|&j| self.completions[(i, j)])
            .count() as u64
    }
}

/// Source of service times. `sample` is called exactly once per started job,
/// at the slot the job is handed to the server.
pub trait ServiceSampler {
    fn sample(&mut self, job_type: usize, server: usize, t: u64) -> Result<u32>;
}

impl<F> ServiceSampler for F
where
    F: FnMut(usize, usize, u64) -> Result<u32>,
{
    fn sample(&mut self, job_type: usize, server: usize, t: u64) -> Result<u32> {
        self(job_type, server, t)
    }
}

/// Indices of servers that may pick a queue at the start of the current slot.
pub fn available_servers(state: &SystemState) -> Vec<usize> {
    state
        .servers
        .iter()
        .enumerate()
        .filter(|(_, s)| s.is_available())
        .map(|(j, _)| j)
        .collect()
}

/// Executes one slot in place and returns its events.
pub fn advance_slot(
    config: &SystemConfig,
    state: &mut SystemState,
    arrivals: &[u32],
    picks: &[Option<usize>],
    sampler: &mut dyn ServiceSampler,
) -> Result<SlotEvents> {
    let (ni, nj) = (config.num_types, config.num_servers);
    if arrivals.len() != ni || picks.len() != nj {
        return Err(Error::dimension(format!(
            "expected {ni} arrivals and {nj} picks, got {} and {}",
            arrivals.len(),
            picks.len()
        )));
    }
    if let Some((i, &a)) = arrivals
        .iter()
        .enumerate()
        .find(|(_, &a)| a > config.arrival_bound)
    {
        return Err(Error::config(format!(
            "arrival {a} for type {i} exceeds bound {}",
            config.arrival_bound
        )));
    }
    for (j, pick) in picks.iter().enumerate() {
        if let Some(i) = *pick {
            if i >= ni {
                return Err(Error::contract(format!("server {j} picked unknown type {i}")));
            }
            if !state.servers[j].is_available() {
                return Err(Error::contract(format!(
                    "server {j} picked type {i} while busy at slot {}",
                    state.t
                )));
            }
        }
    }

    let t = state.t;
    let mut events = SlotEvents {
        t,
        arrivals: arrivals.to_vec(),
        picks: picks.to_vec(),
        scheduled: vec![None; nj],
        started: Vec::new(),
        completions: Matrix::filled(ni, nj, false),
        nonidle: vec![true; nj],
    };

    for (w, &a) in state.waiting.iter_mut().zip(arrivals) {
        *w += u64::from(a);
    }

    for j in 0..nj {
        let server = state.servers[j];
        if let Some(i) = server.assigned_type {
            events.scheduled[j] = Some(i);
            continue;
        }
        match picks[j] {
            Some(i) => {
                events.scheduled[j] = Some(i);
                if state.waiting[i] > 0 {
                    state.waiting[i] -= 1;
                    let s = sampler.sample(i, j, t)?;
                    if s == 0 || s > config.service_bound {
                        return Err(Error::contract(format!(
                            "service time {s} for pair ({i}, {j}) outside [1, {}]",
                            config.service_bound
                        )));
                    }
                    state.servers[j] = ServerRecord {
                        assigned_type: Some(i),
                        elapsed: 0,
                        remaining: s,
                    };
                    events.started.push((j, i, s));
                } else {
                    events.nonidle[j] = false;
                    events.completions[(i, j)] = true;
                }
            }
            None => events.nonidle[j] = false,
        }
    }

    for j in 0..nj {
        let server = &mut state.servers[j];
        if let Some(i) = server.assigned_type {
            server.elapsed += 1;
            server.remaining -= 1;
            if server.remaining == 0 {
                events.completions[(i, j)] = true;
                *server = ServerRecord::default();
            }
        }
    }

    for i in 0..ni {
        let departed = events.departures(i);
        state.queues[i] = state.queues[i] + u64::from(arrivals[i]) - departed;
    }
    state.t += 1;
    Ok(events)
}

/// Per-transition checks of the queue dynamics. Violations are collected as
/// messages rather than panicking so a run can report all of them.
#[derive(Clone, Debug, Default)]
pub struct InvariantMonitor {
    pub transitions: u64,
    pub violations: Vec<String>,
}

impl InvariantMonitor {
    /// Checks one transition `before -> after` with its events:
    ///
    /// - exact conservation `Q(t+1) = Q(t) + A(t) - departures`,
    /// - `Q_i(t+1) <= max{J, Q_i(t) + A_i(t) - sum_j 1_{i,j}(t)}`,
    /// - the one-step form of `Q_i(t) - J tau <= Q_i(t+tau) <= Q_i(t) + tau U_A`,
    ///   which telescopes to every window length,
    /// - structural invariants of the new state.
    pub fn check(
        &mut self,
        config: &SystemConfig,
        before: &[u64],
        after: &SystemState,
        events: &SlotEvents,
    ) {
        self.transitions += 1;
        let j = config.num_servers as i64;
        for i in 0..config.num_types {
            let q0 = before[i] as i64;
            let q1 = after.queues[i] as i64;
            let a = i64::from(events.arrivals[i]);
            let expected = q0 + a - events.departures(i) as i64;
            if q1 != expected {
                self.violations
                    .push(format!("t={} type {i}: conservation {q1} != {expected}", events.t));
            }
            let floor_bound = j.max(q0 + a - events.indicator_count(i) as i64);
            if q1 > floor_bound {
                self.violations
                    .push(format!("t={} type {i}: {q1} > max(J, ...) = {floor_bound}", events.t));
            }
            if q1 < q0 - j || q1 > q0 + i64::from(config.arrival_bound) {
                self.violations
                    .push(format!("t={} type {i}: step {q0} -> {q1} out of band", events.t));
            }
        }
        if let Err(e) = after.check(config) {
            self.violations.push(format!("t={}: {e}", events.t));
        }
    }

    pub fn is_clean(&self) -> bool {
        self.violations.is_empty()
    }
}
