//! Discrete-time simulator for backpressure routing with adaptive
//! redundancy in intermittently connected mobile networks.
//!
//! The network is cell-partitioned: `N` nodes land i.i.d.-uniformly in one
//! of `C` cells each slot, and each cell carries at most one transmission
//! per slot. Nodes pair up (node `2i` with `2i+1`) and receive Bernoulli
//! arrivals destined for their partner. Six protocol variants share the
//! engine:
//!
//! - `RB` — classical queue-differential backpressure;
//! - `RB-DA` — backpressure with destination advantage;
//! - `BWAR-IM` / `BWAR-ID` — adaptive redundancy with ideal removal,
//!   duplicating into the receiver's or the sender's duplicate buffer;
//! - `BWAR-TD` — adaptive redundancy with timeout-based removal;
//! - `SNW` — binary Spray and Wait, as the redundancy baseline.
//!
//! Runs are deterministic per `(config, seed)`: identical inputs give
//! byte-identical CSV. See [`config::SimConfig`] for the knobs,
//! [`engine::run`] for single runs, [`metrics::estimate_stability_threshold`]
//! for capacity sweeps, and [`cli`] for the command-line front end.

pub mod cli;
pub mod config;
pub mod duplicates;
pub mod engine;
pub mod metrics;
pub mod mobility;
pub mod policy;
pub mod presets;
pub mod rng;
pub mod types;

pub use config::{recommended_nodes, validate_config, ConfigError, SimConfig, Variant};
pub use engine::{run, run_audited, AuditReport, SimState};
pub use metrics::{
    estimate_stability_threshold, MetricsReport, RunRecord, SweepPoint, SweepResult,
    ThresholdEstimate,
};
pub use presets::Preset;
