//! Scenarios, configuration files and CSV output.

pub mod config;
pub mod output;
pub mod scenario;

pub use config::{load_config, RunConfig, ScenarioSpec};
pub use output::{read_run, read_snapshot_csv, snapshot_csv, write_run, write_snapshot_csv};
pub use scenario::{preset, preset_names, riemann_on_torus, Preset, PrimitiveSide};
