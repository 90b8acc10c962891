//! Experiment orchestration: JSON configuration, deterministic parallel
//! sweeps and CSV/JSON output for each dataset the command-line tool
//! produces.

mod commands;
mod config;
mod sweep;
mod table;

pub use commands::{
    cmd_calibrate, cmd_gme, cmd_otoc, cmd_sense, cmd_sensitivity, read_columns, run_and_write, CalibrationKind,
    CalibrationReport, Command,
};
pub use config::{
    load_config, parse_config, CalibrationOptions, ExperimentConfig, ExplicitGraph, GraphSpec, NoiseSpec, PhiCount,
    PhiGrid, TimeGrid, TimeRange, CONFIG_SCHEMA, DEFAULT_OUT_DIR, OUT_DIR_ENV,
};
pub use sweep::{derive_seed, run_sweep};
pub use table::{Column, ResultTable, Value, TOOL_VERSION};

#[cfg(test)]
mod tests;
