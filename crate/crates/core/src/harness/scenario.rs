use std::path::Path;

use serde::Serialize;

use super::config::Scenario;
use crate::bunch::Bunch;
use crate::diagnostics::DiagnosticsRow;
use crate::error::Result;
use crate::fields::{SelfFieldConfig, SelfFieldSolver};
use crate::integrate::{integrate, IntegratorConfig, StepTrace};

/// Result of one scenario run.
#[derive(Clone, Debug)]
pub struct RunOutput {
    pub bunch: Bunch,
    /// Initial row followed by one row per diagnostics stop.
    pub diagnostics: Vec<DiagnosticsRow>,
    pub trace: StepTrace,
    pub self_solves: u64,
}

/// Runs `bunch` with an explicit integrator and self-field configuration,
/// recording diagnostics at `stops` (which should end at `t_end`).
pub fn run_with(
    scenario: &Scenario,
    mut bunch: Bunch,
    self_field: &SelfFieldConfig,
    integrator: &IntegratorConfig,
    stops: &[f64],
) -> Result<RunOutput> {
    let mut solver = SelfFieldSolver::new(self_field.clone())?;
    let mut diagnostics = vec![DiagnosticsRow::capture(&bunch, 0.0, 0, 0, 0.0)?];
    let trace = integrate(
        &mut bunch,
        &scenario.external,
        &mut solver,
        integrator,
        stops,
        |b, rec| {
            diagnostics.push(DiagnosticsRow::capture(b, rec.h, rec.m, rec.self_solves, rec.max_accel)?);
            Ok(())
        },
    )?;
    Ok(RunOutput {
        bunch,
        diagnostics,
        trace,
        self_solves: solver.solves(),
    })
}

/// Runs a scenario as configured.
pub fn run_scenario(scenario: &Scenario) -> Result<RunOutput> {
    run_with(
        scenario,
        scenario.initial_bunch()?,
        &scenario.self_field,
        &scenario.integrator,
        &scenario.diagnostic_times(),
    )
}

/// Writes serializable rows as CSV with a fixed header.
pub fn write_csv<T: Serialize>(path: &Path, rows: &[T]) -> Result<()> {
    let mut w = csv::Writer::from_path(path)?;
    for row in rows {
        w.serialize(row)?;
    }
    w.flush()?;
    Ok(())
}

impl RunOutput {
    /// Writes `diagnostics.csv` and `trace.csv` into `dir`.
    pub fn write(&self, dir: &Path) -> Result<()> {
        std::fs::create_dir_all(dir)?;
        write_csv(&dir.join("diagnostics.csv"), &self.diagnostics)?;
        write_csv(&dir.join("trace.csv"), &self.trace.records)
    }
}
