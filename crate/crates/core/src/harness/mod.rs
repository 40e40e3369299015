//! Configuration, subcommands and run persistence.

mod commands;
mod config;

pub use commands::{
    build_initial, euler_check, interface_distance, mollify_study, run_config, simulate, sweep, trajectory_distance,
    EulerRow, EulerTable, HarnessError, RunRecord, RunSummary, StudyRow, StudyTable, SweepCell, SweepResult,
    VerifyOutcome,
};
pub use commands::verify;
pub use config::{ConfigError, Ini, Origin, SimConfig, StepChoice, KEYS, SECTIONS};
