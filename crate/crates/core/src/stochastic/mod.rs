//! Randomness and workload descriptions: service-time laws, arrival and
//! service sources, piecewise-constant timelines, and drift validators.

pub mod drift;
pub mod laws;
pub mod sources;
pub mod timeline;

pub use drift::{discount_horizon, validate_drift_assumptions, DriftReport};
pub use laws::{exact_weibull_mean, truncated_weibull_pmf, DiscreteLaw, LawSpec};
pub use sources::{
    ArrivalProcess, ArrivalSpec, Exhaustion, PairSource, ScriptedSource, ServiceProcess, ServiceSpec,
};
pub use timeline::Timeline;
