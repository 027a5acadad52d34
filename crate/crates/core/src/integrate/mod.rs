//! Time integrators built from drift and kick sub-flows.

mod control;
mod push;
mod run;
mod steps;

pub use control::{g_function, StepControl, ACCEL_FLOOR};
pub use push::{drift, kick};
pub use run::{
    integrate, run_amts, substeps_for, AmtsConfig, IntegratorConfig, Method, StepRecord,
    StepTrace,
};
pub use steps::{step_bb, step_bb_external, step_bb_stale, step_mts, StaleSelfField};
