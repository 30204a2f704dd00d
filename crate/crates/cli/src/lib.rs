//! Batch experiment runner for the repeater-chain simulator: named presets
//! and sweeps that regenerate the reference tables and curves as CSV with a
//! JSON sidecar, plus a `verify` command running the independent oracle
//! suites.

pub mod experiments;
pub mod output;
pub mod pool;
pub mod presets;
pub mod verify;

pub use experiments::{run_experiment, ExperimentKind, ExperimentOutput, RunError, RunOptions};
