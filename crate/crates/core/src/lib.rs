//! Boris-Buneman time integration for charged particle bunches with space
//! charge, including multiple time stepping (MTS) and an adaptive variant
//! (AMTS) whose outer step follows the strength of the self field.

pub mod bunch;
pub mod constants;
pub mod diagnostics;
pub mod error;
pub mod fields;
pub mod harness;
pub mod integrate;
pub mod model1d;

pub use bunch::{lorentz_gamma, Bunch, Vec3};
pub use diagnostics::{mean_kinetic_energy, rms_emittance, Axis, DiagnosticsRow};
pub use error::{Error, Result};
pub use fields::{
    acceleration, solve_self_field, ExternalField, FieldSample, SelfFieldConfig, SelfFieldResult,
    SelfFieldSolver, SolverKind,
};
pub use harness::{run_scenario, ExperimentReport, Scenario};
pub use integrate::{
    integrate, run_amts, AmtsConfig, IntegratorConfig, Method, StepControl, StepRecord, StepTrace,
};
pub use model1d::{adaptive_verlet, beta_sweep, exact_solution, State1D, SundmanG1D};
