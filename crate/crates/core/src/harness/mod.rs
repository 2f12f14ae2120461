//! Configuration, deterministic parallel trial execution, persistence, and
//! the end-to-end verification battery.

pub mod config;
pub mod grid;
pub mod trial;
pub mod verify;

pub use config::{ExperimentConfig, NFormula, NRule, OutputFormat};
pub use grid::{
    records_to_csv, report_path, report_to_csv, run_grid, trace_cov_statistic,
    vol_radius_statistic, write_outputs, GridOutput, ReportRow,
};
pub use trial::{check_regime, run_trial, verify_coupling, CouplingOutcome, TrialRecord};
pub use verify::{verify_suite, CheckResult, VerifyReport};
