//! Scenario-driven experiments for `equilib`: load a system description,
//! sweep its parameters, check every applicable bound and write CSV or JSON
//! reports.

pub mod error;
pub mod output;
pub mod runner;
pub mod scenario;
pub mod suite;

pub use error::{BenchError, Result};
pub use output::{emit_report, read_json, Format, CSV_COLUMNS};
pub use runner::{
    build_classical_pure, build_quantum, exit_status, run_scenario, run_single, BoundCheck,
    BoundChecks, BoundStatus, RunOptions, RunRecord, BOUND_SIGMAS,
};
pub use scenario::{Params, Scenario, ScenarioKind, SweepValue};
