//! Experiment harness: TOML-configured runs, CSV diagnostics, binary field
//! snapshots and the sweep drivers used by the `bsq` command-line tool.
//!
//! Every run is deterministic given its configuration and seed; the
//! resolved configuration, the seed and the library version are embedded
//! in the run summary so results can be reproduced byte for byte.

mod config;
mod runs;
mod snapshot;

pub use config::{
    build_initial, ExperimentConfig, GridSpec, InitialSpec, LifespanSpec, ModelSpec,
};
pub use runs::{
    run_convergence, run_estimates, run_lifespan, run_simulate, ConvergenceSummary,
    EstimatesSummary, LifespanPoint, LifespanStatus, LifespanSummary, SimulateSummary,
};
pub use snapshot::{read_snapshot, write_snapshot, Snapshot, SNAPSHOT_MAGIC, SNAPSHOT_VERSION};
