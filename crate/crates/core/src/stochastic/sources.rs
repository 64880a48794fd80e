//! Seeded arrival and service-time sources.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::laws::{DiscreteLaw, LawSpec};
use super::timeline::Timeline;
use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::model::{ServiceSampler, SystemConfig};
use crate::rng::{stream, StreamRole};

/// What a scripted source does once its list runs out.
#[derive(Clone, Debug, PartialEq)]
pub enum Exhaustion {
    Error,
    /// Cycle through the list again.
    Repeat,
    /// Continue with draws from a law.
    Then(LawSpec),
}

/// A fixed list of values handed out in order.
#[derive(Clone, Debug)]
pub struct ScriptedSource {
    values: Vec<u32>,
    next: usize,
    on_exhaustion: ExhaustionState,
}

#[derive(Clone, Debug)]
enum ExhaustionState {
    Error,
    Repeat,
    Then(DiscreteLaw),
}

impl ScriptedSource {
    pub fn new(values: Vec<u32>, on_exhaustion: Exhaustion, service_bound: u32) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::parameter("scripted source needs at least one value"));
        }
        let on_exhaustion = match on_exhaustion {
            Exhaustion::Error => ExhaustionState::Error,
            Exhaustion::Repeat => ExhaustionState::Repeat,
            Exhaustion::Then(spec) => {
                ExhaustionState::Then(DiscreteLaw::from_spec(&spec, service_bound)?)
            }
        };
        Ok(Self {
            values,
            next: 0,
            on_exhaustion,
        })
    }

    pub fn next_value(&mut self, rng: &mut ChaCha8Rng) -> Result<u32> {
        if self.next < self.values.len() {
            self.next += 1;
            return Ok(self.values[self.next - 1]);
        }
        match &self.on_exhaustion {
            ExhaustionState::Error => Err(Error::Exhausted(self.values.len())),
            ExhaustionState::Repeat => {
                self.next = 1;
                Ok(self.values[0])
            }
            ExhaustionState::Then(law) => Ok(law.sample(rng)),
        }
    }

    /// Long-run mean of the values this source produces.
    pub fn long_run_mean(&self) -> f64 {
        match &self.on_exhaustion {
            ExhaustionState::Then(law) => law.mean(),
            _ => self.values.iter().map(|&v| f64::from(v)).sum::<f64>() / self.values.len() as f64,
        }
    }

    pub fn values(&self) -> &[u32] {
        &self.values
    }
}

/// Arrival process specification.
#[derive(Clone, Debug, PartialEq)]
pub enum ArrivalSpec {
    /// Independent Bernoulli arrivals with per-type rates.
    Bernoulli(Timeline<Vec<f64>>),
    /// Deterministic periodic pattern per type: `A_i(t) = pattern_i[t mod len]`.
    Pattern(Vec<Vec<u32>>),
    /// Explicit per-type sequences.
    Scripted { values: Vec<Vec<u32>>, repeat: bool },
}

impl ArrivalSpec {
    pub fn validate(&self, config: &SystemConfig) -> Result<()> {
        let ni = config.num_types;
        match self {
            ArrivalSpec::Bernoulli(rates) => {
                for (start, _, seg) in rates.segments() {
                    if seg.len() != ni {
                        return Err(Error::dimension(format!(
                            "arrival segment at {start} has {} rates for {ni} types",
                            seg.len()
                        )));
                    }
                    if let Some(l) = seg.iter().find(|&&l| !(0.0..=1.0).contains(&l)) {
                        return Err(Error::parameter(format!("bernoulli rate {l} not in [0, 1]")));
                    }
                }
            }
            ArrivalSpec::Pattern(rows) | ArrivalSpec::Scripted { values: rows, .. } => {
                if rows.len() != ni {
                    return Err(Error::dimension(format!(
                        "{} arrival sequences for {ni} types",
                        rows.len()
                    )));
                }
                for row in rows {
                    if row.is_empty() {
                        return Err(Error::parameter("empty arrival sequence"));
                    }
                    if let Some(a) = row.iter().find(|&&a| a > config.arrival_bound) {
                        return Err(Error::parameter(format!(
                            "arrival count {a} exceeds bound {}",
                            config.arrival_bound
                        )));
                    }
                }
            }
        }
        Ok(())
    }

    /// Mean arrival rate vector in effect at slot `t`.
    pub fn mean_rates(&self, t: u64) -> Result<Vec<f64>> {
        match self {
            ArrivalSpec::Bernoulli(rates) => rates.value(t).cloned(),
            ArrivalSpec::Pattern(rows) | ArrivalSpec::Scripted { values: rows, .. } => Ok(rows
                .iter()
                .map(|r| r.iter().map(|&a| f64::from(a)).sum::<f64>() / r.len() as f64)
                .collect()),
        }
    }
}

/// Draws `A(t)` slot by slot. One stream per type.
pub struct ArrivalProcess {
    spec: ArrivalSpec,
    rngs: Vec<ChaCha8Rng>,
    cursors: Vec<usize>,
}

impl ArrivalProcess {
    pub fn new(spec: ArrivalSpec, config: &SystemConfig, seed: u64) -> Result<Self> {
        spec.validate(config)?;
        let rngs = (0..config.num_types)
            .map(|i| stream(seed, StreamRole::Arrival, i, 0))
            .collect();
        Ok(Self {
            spec,
            rngs,
            cursors: vec![0; config.num_types],
        })
    }

    pub fn draw(&mut self, t: u64, out: &mut [u32]) -> Result<()> {
        match &self.spec {
            ArrivalSpec::Bernoulli(rates) => {
                let lambda = rates.value(t)?;
                for (i, a) in out.iter_mut().enumerate() {
                    let u: f64 = self.rngs[i].gen();
                    *a = u32::from(u < lambda[i]);
                }
            }
            ArrivalSpec::Pattern(rows) => {
                for (a, row) in out.iter_mut().zip(rows) {
                    *a = row[(t % row.len() as u64) as usize];
                }
            }
            ArrivalSpec::Scripted { values, repeat } => {
                for (i, a) in out.iter_mut().enumerate() {
                    let row = &values[i];
                    let k = &mut self.cursors[i];
                    if *k == row.len() {
                        if !*repeat {
                            return Err(Error::Exhausted(row.len()));
                        }
                        *k = 0;
                    }
                    *a = row[*k];
                    *k += 1;
                }
            }
        }
        Ok(())
    }
}

/// Source of service times for one (type, server) pair.
#[derive(Clone, Debug, PartialEq)]
pub enum PairSource {
    Law(LawSpec),
    Scripted {
        values: Vec<u32>,
        on_exhaustion: Exhaustion,
    },
}

impl From<LawSpec> for PairSource {
    fn from(spec: LawSpec) -> Self {
        PairSource::Law(spec)
    }
}

/// Per-pair service sources over a timeline of segments.
#[derive(Clone, Debug, PartialEq)]
pub struct ServiceSpec {
    pub segments: Timeline<Matrix<PairSource>>,
}

impl ServiceSpec {
    pub fn stationary(sources: Matrix<PairSource>, horizon: u64) -> Self {
        Self {
            segments: Timeline::constant(sources, horizon),
        }
    }

    /// Mean service time `1/mu_{i,j}` of every segment.
    pub fn mean_times(&self, service_bound: u32) -> Result<Timeline<Matrix<f64>>> {
        self.segments.try_map(|m| {
            let samplers = build_segment(m, service_bound)?;
            Ok(samplers.map(PairSampler::mean))
        })
    }

    /// Service rates `mu_{i,j}` of every segment.
    pub fn rates(&self, service_bound: u32) -> Result<Timeline<Matrix<f64>>> {
        Ok(self.mean_times(service_bound)?.map(|m| m.map(|&s| 1.0 / s)))
    }
}

#[derive(Clone, Debug)]
enum PairSampler {
    Law(DiscreteLaw),
    Scripted(ScriptedSource),
}

impl PairSampler {
    fn mean(&self) -> f64 {
        match self {
            PairSampler::Law(l) => l.mean(),
            PairSampler::Scripted(s) => s.long_run_mean(),
        }
    }
}

fn build_segment(m: &Matrix<PairSource>, service_bound: u32) -> Result<Matrix<PairSampler>> {
    let rows = m
        .to_rows()
        .iter()
        .map(|row| {
            row.iter()
                .map(|src| match src {
                    PairSource::Law(spec) => {
                        DiscreteLaw::from_spec(spec, service_bound).map(PairSampler::Law)
                    }
                    PairSource::Scripted {
                        values,
                        on_exhaustion,
                    } => {
                        if let Some(v) = values.iter().find(|&&v| v == 0 || v > service_bound) {
                            return Err(Error::parameter(format!(
                                "scripted service time {v} outside [1, {service_bound}]"
                            )));
                        }
                        ScriptedSource::new(values.clone(), on_exhaustion.clone(), service_bound)
                            .map(PairSampler::Scripted)
                    }
                })
                .collect::<Result<Vec<_>>>()
        })
        .collect::<Result<Vec<_>>>()?;
    Matrix::from_rows(rows)
}

/// Stateful service-time generator implementing [`ServiceSampler`].
///
/// Each pair owns one stream that persists across segments; the law used is
/// the one in effect at the slot the job starts.
pub struct ServiceProcess {
    segments: Timeline<Matrix<PairSampler>>,
    rates: Timeline<Matrix<f64>>,
    rngs: Matrix<ChaCha8Rng>,
}

impl ServiceProcess {
    pub fn new(spec: &ServiceSpec, config: &SystemConfig, seed: u64) -> Result<Self> {
        for (start, _, m) in spec.segments.segments() {
            if m.shape() != (config.num_types, config.num_servers) {
                return Err(Error::dimension(format!(
                    "service segment at {start} is {:?}, expected {:?}",
                    m.shape(),
                    (config.num_types, config.num_servers)
                )));
            }
        }
        let segments = spec
            .segments
            .try_map(|m| build_segment(m, config.service_bound))?;
        let rates = segments.map(|m| m.map(|s| 1.0 / s.mean()));
        let rngs = Matrix::from_fn(config.num_types, config.num_servers, |i, j| {
            stream(seed, StreamRole::Service, i, j)
        });
        Ok(Self {
            segments,
            rates,
            rngs,
        })
    }

    /// True rate matrix `mu(t)`.
    pub fn rates_at(&self, t: u64) -> Result<&Matrix<f64>> {
        self.rates.value(t)
    }
}

impl ServiceSampler for ServiceProcess {
    fn sample(&mut self, job_type: usize, server: usize, t: u64) -> Result<u32> {
        let k = self.segments.segment_index(t)?;
        let rng = &mut self.rngs[(job_type, server)];
        let sampler = &mut self.segments.values_mut()[k][(job_type, server)];
        match sampler {
            PairSampler::Law(law) => Ok(law.sample(rng)),
            PairSampler::Scripted(src) => src.next_value(rng),
        }
    }
}
