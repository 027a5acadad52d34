//! Scenario files, scenario runs and the experiment drivers behind the CLI.

mod config;
mod experiments;
mod scenario;

pub use config::{
    generate_bunch, BunchSpec, ControlSpec, DiagnosticsSpec, Distribution, ExperimentSpec,
    IntegratorSpec, MethodName, Scenario, Species,
};
pub use experiments::{
    emittance_error, experiment_error_vs_work, experiment_mts_vs_stale, ExperimentReport,
    ReportRow, RunSummary, WorkMethod,
};
pub use scenario::{run_scenario, run_with, write_csv, RunOutput};
