//! Experiment configuration files.
//!
//! A config is a TOML document:
//!
//! ```toml
//! schema_version = 1
//!
//! [system]
//! num_types = 2
//! num_servers = 2
//! arrival_bound = 1
//! service_bound = 100
//! horizon = 50000
//!
//! [arrivals]
//! kind = "bernoulli"
//! rates = [0.15, 0.15]
//!
//! [[services.segments]]
//! start = 0
//! iota = [[0.5, 0.7], [0.8, 0.4]]
//! beta = 0.5
//!
//! [policies.discounted_ucb]
//! kind = "discounted_ucb"
//! gamma = 0.999
//! c1 = 0.01
//!
//! [experiment]
//! runs = 20
//! seed = 1
//! ```
//!
//! Unknown keys are rejected everywhere. Errors found after parsing are
//! reported against the line of the section they concern.

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use toml::Spanned;

use qsched_core::capacity::scale_to_slackness;
use qsched_core::experiments::ExperimentPlan;
use qsched_core::matrix::Matrix;
use qsched_core::model::SystemConfig;
use qsched_core::policies::{PolicyKind, TieBreak};
use qsched_core::stochastic::{ArrivalSpec, Exhaustion, LawSpec, PairSource, ServiceSpec, Timeline};

use crate::CliError;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigFile {
    pub schema_version: Spanned<u32>,
    pub system: Spanned<SystemSection>,
    pub arrivals: Spanned<ArrivalsSection>,
    pub services: Spanned<ServicesSection>,
    #[serde(default)]
    pub policies: BTreeMap<String, Spanned<PolicyKind>>,
    #[serde(default)]
    pub experiment: Option<Spanned<ExperimentSection>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SystemSection {
    pub num_types: usize,
    pub num_servers: usize,
    pub arrival_bound: u32,
    pub service_bound: u32,
    pub horizon: u64,
}

#[derive(Debug, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ArrivalsSection {
    /// Constant `rates`, or piecewise `segments`. With `target_slackness`,
    /// the constant rates are only a direction and get rescaled so that the
    /// first service segment has exactly that slackness.
    Bernoulli {
        #[serde(default)]
        rates: Option<Vec<f64>>,
        #[serde(default)]
        segments: Option<Vec<RateSegment>>,
        #[serde(default)]
        target_slackness: Option<f64>,
    },
    Pattern {
        pattern: Vec<Vec<u32>>,
    },
    Scripted {
        values: Vec<Vec<u32>>,
        #[serde(default)]
        repeat: bool,
    },
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RateSegment {
    pub start: u64,
    pub rates: Vec<f64>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServicesSection {
    pub segments: Vec<Spanned<ServiceSegment>>,
}

/// One service segment: either a full `laws` matrix, or an `iota` matrix of
/// truncated-Weibull success probabilities sharing one `beta`. `scripted`
/// entries override single pairs.
#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ServiceSegment {
    pub start: u64,
    #[serde(default)]
    pub laws: Option<Vec<Vec<LawSpec>>>,
    #[serde(default)]
    pub iota: Option<Vec<Vec<f64>>>,
    #[serde(default)]
    pub beta: Option<f64>,
    #[serde(default)]
    pub scripted: Vec<ScriptedPair>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ScriptedPair {
    pub job_type: usize,
    pub server: usize,
    pub values: Vec<u32>,
    /// Law used once `values` runs out; without it the list repeats when
    /// `repeat` is set and is an error otherwise.
    #[serde(default)]
    pub then: Option<LawSpec>,
    #[serde(default)]
    pub repeat: bool,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentSection {
    #[serde(default = "one")]
    pub runs: usize,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "ten")]
    pub sample_stride: u64,
    #[serde(default)]
    pub tail_slots: Vec<u64>,
    #[serde(default)]
    pub tie_break: TieBreak,
    #[serde(default)]
    pub check_invariants: bool,
}

fn one() -> usize {
    1
}

fn ten() -> u64 {
    10
}

impl Default for ExperimentSection {
    fn default() -> Self {
        Self {
            runs: 1,
            seed: 0,
            sample_stride: 10,
            tail_slots: Vec::new(),
            tie_break: TieBreak::Lowest,
            check_invariants: false,
        }
    }
}

/// Parsed and validated configuration.
#[derive(Debug)]
pub struct LoadedConfig {
    pub plan: ExperimentPlan,
    /// Policy names in file order of their keys (sorted).
    pub policy_names: Vec<String>,
}

impl LoadedConfig {
    pub fn policy(&self, name: &str) -> Result<&PolicyKind, CliError> {
        self.plan
            .policies
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, k)| k)
            .ok_or_else(|| {
                CliError::Config(format!(
                    "unknown policy `{name}`; the config defines: {}",
                    self.policy_names.join(", ")
                ))
            })
    }
}

struct Source<'a> {
    name: &'a str,
    text: &'a str,
}

impl Source<'_> {
    fn line(&self, offset: usize) -> usize {
        self.text[..offset.min(self.text.len())].matches('\n').count() + 1
    }

    fn err<T>(&self, span: std::ops::Range<usize>, msg: impl std::fmt::Display) -> Result<T, CliError> {
        Err(CliError::Config(format!("{}:{}: {msg}", self.name, self.line(span.start))))
    }
}

pub fn load(path: &Path) -> Result<LoadedConfig, CliError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    parse(&text, &path.display().to_string())
}

pub fn parse(text: &str, name: &str) -> Result<LoadedConfig, CliError> {
    let file: ConfigFile =
        toml::from_str(text).map_err(|e| CliError::Config(format!("{name}: {e}")))?;
    let src = Source { name, text };

    if *file.schema_version.get_ref() != SCHEMA_VERSION {
        return src.err(
            file.schema_version.span(),
            format!(
                "unsupported schema_version {}, expected {SCHEMA_VERSION}",
                file.schema_version.get_ref()
            ),
        );
    }

    let sys = file.system.get_ref();
    let system = SystemConfig {
        num_types: sys.num_types,
        num_servers: sys.num_servers,
        arrival_bound: sys.arrival_bound,
        service_bound: sys.service_bound,
        horizon: sys.horizon,
    };
    if let Err(e) = system.validate() {
        return src.err(file.system.span(), e);
    }

    let services = build_services(&file.services, &system, &src)?;
    let arrivals = build_arrivals(&file.arrivals, &system, &services, &src)?;

    let mut plan = ExperimentPlan::new(system, arrivals, services);
    if let Err(e) = plan.arrivals.validate(&system) {
        return src.err(file.arrivals.span(), e);
    }

    let mut policy_names = Vec::new();
    for (name, kind) in &file.policies {
        if let Err(e) = kind.get_ref().validate(&system) {
            return src.err(kind.span(), format!("policy `{name}`: {e}"));
        }
        policy_names.push(name.clone());
        plan.policies.push((name.clone(), kind.get_ref().clone()));
    }

    let (exp, exp_span) = match &file.experiment {
        Some(s) => (s.get_ref(), s.span()),
        None => (&ExperimentSection::default(), 0..0),
    };
    plan.num_runs = exp.runs;
    plan.root_seed = exp.seed;
    plan.sample_stride = exp.sample_stride;
    plan.tail_slots = exp.tail_slots.clone();
    plan.tie_break = exp.tie_break;
    plan.check_invariants = exp.check_invariants;
    if let Err(e) = plan.validate() {
        return src.err(exp_span, e);
    }

    Ok(LoadedConfig { plan, policy_names })
}

fn build_services(
    section: &Spanned<ServicesSection>,
    system: &SystemConfig,
    src: &Source<'_>,
) -> Result<ServiceSpec, CliError> {
    let (ni, nj) = (system.num_types, system.num_servers);
    let mut segments = Vec::new();
    if section.get_ref().segments.is_empty() {
        return src.err(section.span(), "at least one service segment is required");
    }
    for seg in &section.get_ref().segments {
        let span = seg.span();
        let seg = seg.get_ref();
        let mut sources: Matrix<PairSource> = match (&seg.laws, &seg.iota, seg.beta) {
            (Some(laws), None, None) => {
                if laws.len() != ni || laws.iter().any(|r| r.len() != nj) {
                    return src.err(span, format!("`laws` must be a {ni}x{nj} matrix"));
                }
                Matrix::from_fn(ni, nj, |i, j| PairSource::Law(laws[i][j].clone()))
            }
            (None, Some(iota), Some(beta)) => {
                if iota.len() != ni || iota.iter().any(|r| r.len() != nj) {
                    return src.err(span, format!("`iota` must be a {ni}x{nj} matrix"));
                }
                Matrix::from_fn(ni, nj, |i, j| {
                    PairSource::Law(LawSpec::TruncatedWeibull {
                        iota: iota[i][j],
                        beta,
                    })
                })
            }
            _ => {
                return src.err(span, "a segment needs either `laws`, or `iota` together with `beta`");
            }
        };
        for s in &seg.scripted {
            if s.job_type >= ni || s.server >= nj {
                return src.err(span, format!("scripted pair ({}, {}) out of range", s.job_type, s.server));
            }
            let on_exhaustion = match (&s.then, s.repeat) {
                (Some(law), false) => Exhaustion::Then(law.clone()),
                (None, true) => Exhaustion::Repeat,
                (None, false) => Exhaustion::Error,
                (Some(_), true) => return src.err(span, "`then` and `repeat` are mutually exclusive"),
            };
            sources[(s.job_type, s.server)] = PairSource::Scripted {
                values: s.values.clone(),
                on_exhaustion,
            };
        }
        segments.push((seg.start, sources));
    }
    let spec = ServiceSpec {
        segments: Timeline::new(segments, system.horizon).or_else(|e| src.err(section.span(), e))?,
    };
    if let Err(e) = spec.mean_times(system.service_bound) {
        return src.err(section.span(), e);
    }
    Ok(spec)
}

fn build_arrivals(
    section: &Spanned<ArrivalsSection>,
    system: &SystemConfig,
    services: &ServiceSpec,
    src: &Source<'_>,
) -> Result<ArrivalSpec, CliError> {
    let span = section.span();
    Ok(match section.get_ref() {
        ArrivalsSection::Bernoulli {
            rates,
            segments,
            target_slackness,
        } => match (rates, segments, target_slackness) {
            (Some(r), None, None) => ArrivalSpec::Bernoulli(Timeline::constant(r.clone(), system.horizon)),
            (Some(r), None, Some(target)) => {
                let mu = services
                    .rates(system.service_bound)
                    .or_else(|e| src.err(span.clone(), e))?;
                let mu0 = &mu.values()[0];
                if r.len() != mu0.rows() {
                    return src.err(span, format!("{} rates for {} types", r.len(), mu0.rows()));
                }
                let scaled = scale_to_slackness(r, mu0, *target).or_else(|e| src.err(span.clone(), e))?;
                ArrivalSpec::Bernoulli(Timeline::constant(scaled, system.horizon))
            }
            (None, Some(segs), None) => {
                let tl = Timeline::new(
                    segs.iter().map(|s| (s.start, s.rates.clone())).collect(),
                    system.horizon,
                )
                .or_else(|e| src.err(span.clone(), e))?;
                ArrivalSpec::Bernoulli(tl)
            }
            _ => {
                return src.err(
                    span,
                    "bernoulli arrivals need either `rates` (optionally with `target_slackness`) or `segments`",
                )
            }
        },
        ArrivalsSection::Pattern { pattern } => ArrivalSpec::Pattern(pattern.clone()),
        ArrivalsSection::Scripted { values, repeat } => ArrivalSpec::Scripted {
            values: values.clone(),
            repeat: *repeat,
        },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    const MINIMAL: &str = r#"
schema_version = 1

[system]
num_types = 2
num_servers = 2
arrival_bound = 1
service_bound = 10
horizon = 1000

[arrivals]
kind = "bernoulli"
rates = [0.1, 0.2]

[[services.segments]]
start = 0
laws = [[{ kind = "constant", value = 2 }, { kind = "constant", value = 5 }],
        [{ kind = "constant", value = 5 }, { kind = "two_point", v1 = 1, p1 = 0.5, v2 = 3, p2 = 0.5 }]]

[policies.ucb]
kind = "ucb"
c1 = 0.01

[policies.oracle]
kind = "oracle"

[experiment]
runs = 3
seed = 42
"#;

    #[test]
    fn parses_minimal_config() {
        let cfg = parse(MINIMAL, "t.toml").unwrap();
        assert_eq!(cfg.policy_names, vec!["oracle", "ucb"]);
        assert_eq!(cfg.plan.num_runs, 3);
        assert_eq!(cfg.plan.root_seed, 42);
        assert_eq!(cfg.plan.sample_stride, 10);
        assert!(matches!(cfg.policy("ucb").unwrap(), PolicyKind::Ucb { .. }));
        assert!(cfg.policy("nope").is_err());
    }

    #[test]
    fn unknown_key_is_rejected_with_line() {
        let text = MINIMAL.replace("runs = 3", "runs = 3\nbogus = 1");
        let err = parse(&text, "t.toml").unwrap_err().to_string();
        assert!(err.contains("bogus"), "{err}");
        assert!(err.contains("line"), "{err}");
    }

    #[test]
    fn semantic_errors_point_at_the_section() {
        let text = MINIMAL.replace("rates = [0.1, 0.2]", "rates = [0.1, 1.5]");
        let err = parse(&text, "t.toml").unwrap_err().to_string();
        let line = MINIMAL.lines().position(|l| l == "[arrivals]").unwrap() + 1;
        assert!(err.starts_with(&format!("t.toml:{line}:")), "{err}");

        let text = MINIMAL.replace("c1 = 0.01", "c1 = -1.0");
        let err = parse(&text, "t.toml").unwrap_err().to_string();
        assert!(err.contains("policy `ucb`"), "{err}");
    }

    #[test]
    fn schema_version_is_checked() {
        let text = MINIMAL.replace("schema_version = 1", "schema_version = 7");
        assert!(parse(&text, "t.toml").is_err());
    }

    #[test]
    fn iota_shorthand_and_slackness_target() {
        let text = r#"
schema_version = 1
[system]
num_types = 2
num_servers = 2
arrival_bound = 1
service_bound = 100
horizon = 100
[arrivals]
kind = "bernoulli"
rates = [1.0, 1.0]
target_slackness = 0.05
[[services.segments]]
start = 0
iota = [[0.5, 0.7], [0.8, 0.4]]
beta = 0.5
[[services.segments]]
start = 50
iota = [[0.8, 0.4], [0.5, 0.7]]
beta = 0.5
scripted = [{ job_type = 0, server = 0, values = [100], then = { kind = "constant", value = 3 } }]
"#;
        let cfg = parse(text, "w.toml").unwrap();
        let ArrivalSpec::Bernoulli(tl) = &cfg.plan.arrivals else {
            panic!("expected bernoulli arrivals")
        };
        let rates = tl.value(0).unwrap();
        let mu = cfg.plan.services.rates(100).unwrap();
        let delta = qsched_core::capacity::max_slackness(rates, &mu.values()[0]).unwrap().delta;
        assert!((delta - 0.05).abs() < 1e-4);
        assert_eq!(cfg.plan.services.segments.len(), 2);
    }

    #[test]
    fn segment_needs_one_description() {
        let text = MINIMAL.replace("start = 0\n", "start = 0\nbeta = 0.5\n");
        assert!(parse(&text, "t.toml").is_err());
    }
}
