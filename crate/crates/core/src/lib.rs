//! Discrete-time multi-server queueing simulator.
//!
//! The crate models `I` job types, each with its own queue, served
//! nonpreemptively by `J` heterogeneous servers. Service times depend on the
//! (type, server) pair and are unknown to the scheduler, which has to learn
//! them while scheduling. The main policy is MaxWeight driven by a discounted
//! upper-confidence-bound estimate of the per-pair service rates; several
//! baselines are provided for comparison.
//!
//! Module map:
//!
//! - [`model`]: the exact per-slot state machine (arrivals, picks, service,
//!   completions, queue update).
//! - [`stochastic`]: seeded arrival and service sources, piecewise-constant
//!   timelines and the drift-assumption validators.
//! - [`policies`]: the estimator and every scheduling policy.
//! - [`capacity`]: the stationary traffic-slackness linear program.
//! - [`experiments`]: seeded runner, cross-run aggregation and tail fits.

pub mod capacity;
pub mod error;
pub mod experiments;
pub mod matrix;
pub mod model;
pub mod policies;
pub mod rng;
pub mod stochastic;

pub use error::{Error, Result};
pub use matrix::Matrix;
