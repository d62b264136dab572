//! Speculation Game: an agent-based market of round-trip speculators.
//!
//! The crate is split along the lines of the work it does:
//!
//! - [`engine`]: the seedable market simulation (strategies, order flow,
//!   cognitive price, round-trip settlement, player replacement).
//! - [`stats`]: pure time-series diagnostics used to measure stylized facts
//!   of the simulated returns.
//! - [`fitting`]: maximum-likelihood estimators (power-law and exponential
//!   tails, Vuong's test, GARCH(1,1)).
//! - [`harness`]: experiment configuration, multi-trial orchestration,
//!   CSV/JSON outputs and the stylized-facts report.

pub mod engine;
pub mod fitting;
pub mod harness;
pub mod rng;
pub mod stats;

pub use engine::{run_trial, GameConfig, Market, StepRecord, TrialOutput};
pub use harness::{run_experiment, ExperimentSpec, StylizedFactReport};

