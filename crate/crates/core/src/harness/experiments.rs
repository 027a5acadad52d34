//! Error-vs-work and MTS-vs-stale-reuse experiments.

use std::path::Path;
use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use super::config::Scenario;
use super::scenario::{run_with, write_csv, RunOutput};
use crate::diagnostics::DiagnosticsRow;
use crate::error::{Error, Result};
use crate::fields::SelfFieldConfig;
use crate::integrate::{substeps_for, AmtsConfig, IntegratorConfig, Method, StepControl};

/// One row of an experiment table.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ReportRow {
    pub method: String,
    /// Self-solve budget, substep count or reuse period.
    pub parameter: usize,
    pub outer_steps: usize,
    pub self_solves: u64,
    /// Maximal relative transverse emittance error against the reference.
    pub rel_error: f64,
}

#[derive(Clone, Debug)]
pub struct RunSummary {
    pub row: ReportRow,
    pub diagnostics: Vec<DiagnosticsRow>,
    pub wall_seconds: f64,
}

#[derive(Clone, Debug)]
pub struct ExperimentReport {
    pub reference: RunSummary,
    pub runs: Vec<RunSummary>,
}

#[derive(Serialize)]
struct TimingRow<'a> {
    method: &'a str,
    parameter: usize,
    wall_seconds: f64,
}

impl ExperimentReport {
    pub fn rows(&self) -> impl Iterator<Item = &ReportRow> {
        std::iter::once(&self.reference.row).chain(self.runs.iter().map(|r| &r.row))
    }

    /// Rows of one method, in run order.
    pub fn method_rows<'a>(&'a self, method: &'a str) -> impl Iterator<Item = &'a ReportRow> + 'a {
        self.rows().filter(move |r| r.method == method)
    }

    pub fn find(&self, method: &str, parameter: usize) -> Option<&ReportRow> {
        self.rows().find(|r| r.method == method && r.parameter == parameter)
    }

    /// Writes `report.csv`, `timings.csv` and one diagnostics file per run
    /// under `runs/`. Only the timings differ between identical reruns.
    pub fn write(&self, dir: &Path) -> Result<()> {
        let runs_dir = dir.join("runs");
        std::fs::create_dir_all(&runs_dir)?;
        let all: Vec<&RunSummary> = std::iter::once(&self.reference).chain(&self.runs).collect();
        let rows: Vec<&ReportRow> = all.iter().map(|r| &r.row).collect();
        write_csv(&dir.join("report.csv"), &rows)?;
        let timings: Vec<TimingRow> = all
            .iter()
            .map(|r| TimingRow {
                method: &r.row.method,
                parameter: r.row.parameter,
                wall_seconds: r.wall_seconds,
            })
            .collect();
        write_csv(&dir.join("timings.csv"), &timings)?;
        for (i, r) in all.iter().enumerate() {
            let name = format!("{i:02}-{}-{}.csv", r.row.method, r.row.parameter);
            write_csv(&runs_dir.join(name), &r.diagnostics)?;
        }
        Ok(())
    }
}

/// Largest relative transverse emittance error over matching rows, skipping the initial row.
pub fn emittance_error(run: &[DiagnosticsRow], reference: &[DiagnosticsRow]) -> f64 {
    run.iter()
        .zip(reference)
        .skip(1)
        .flat_map(|(a, r)| {
            [
                ((a.emit_x - r.emit_x) / r.emit_x).abs(),
                ((a.emit_y - r.emit_y) / r.emit_y).abs(),
            ]
        })
        .fold(0.0, f64::max)
}

fn timed_run(
    scenario: &Scenario,
    self_field: &SelfFieldConfig,
    integrator: &IntegratorConfig,
    stops: &[f64],
) -> Result<(RunOutput, f64)> {
    let start = Instant::now();
    let out = run_with(scenario, scenario.initial_bunch()?, self_field, integrator, stops)?;
    Ok((out, start.elapsed().as_secs_f64()))
}

fn summarize(
    method: String,
    parameter: usize,
    (out, wall_seconds): (RunOutput, f64),
    reference: &[DiagnosticsRow],
) -> RunSummary {
    RunSummary {
        row: ReportRow {
            method,
            parameter,
            outer_steps: out.trace.records.len(),
            self_solves: out.self_solves,
            rel_error: emittance_error(&out.diagnostics, reference),
        },
        diagnostics: out.diagnostics,
        wall_seconds,
    }
}

/// Methods compared by the error-vs-work experiment.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum WorkMethod {
    Mts,
    Amts(StepControl),
}

impl WorkMethod {
    /// Fixed MTS, AMTS with `beta` in {0.5, 1, 1.5} and AMTS driven by the beam size.
    pub fn all() -> Vec<WorkMethod> {
        let mut v = vec![WorkMethod::Mts];
        for beta in [0.5, 1.0, 1.5] {
            v.push(WorkMethod::Amts(StepControl::MaxAcceleration { beta }));
        }
        v.push(WorkMethod::Amts(StepControl::BeamSize));
        v
    }

    /// `mts`, `amts-beta-<beta>` or `amts-beam-size`.
    pub fn label(&self) -> String {
        match self {
            WorkMethod::Mts => "mts".into(),
            WorkMethod::Amts(StepControl::MaxAcceleration { beta }) => format!("amts-beta-{beta}"),
            WorkMethod::Amts(StepControl::BeamSize) => "amts-beam-size".into(),
        }
    }

    pub fn parse(s: &str) -> Option<WorkMethod> {
        match s {
            "mts" => Some(WorkMethod::Mts),
            "amts-beam-size" => Some(WorkMethod::Amts(StepControl::BeamSize)),
            _ => {
                let beta: f64 = s.strip_prefix("amts-beta-")?.parse().ok()?;
                (beta > 0.0 && beta.is_finite()).then_some(WorkMethod::Amts(StepControl::MaxAcceleration { beta }))
            }
        }
    }
}

/// Inner step and AMTS limits taken from the scenario's integrator.
fn inner_settings(scenario: &Scenario) -> Result<AmtsConfig> {
    match &scenario.integrator.method {
        Method::Amts(a) => Ok(a.clone()),
        Method::Mts { h, substeps } => Ok(AmtsConfig::new(*h, h / *substeps as f64)),
        _ => Err(Error::InvalidConfig(
            "error-vs-work needs an mts or amts integrator to fix the inner step".into(),
        )),
    }
}

/// AMTS run whose initial outer step is tuned so the run takes `budget` outer
/// steps, or the most steps below it when no setting hits it exactly.
fn calibrated_amts(
    scenario: &Scenario,
    base: &AmtsConfig,
    control: StepControl,
    budget: usize,
    stops: &[f64],
) -> Result<(RunOutput, f64)> {
    let t_end = scenario.integrator.t_end;
    let run = |dt: f64| {
        let mut cfg = base.clone().with_control(control);
        cfg.dt_outer_init = dt.max(cfg.dt_inner);
        timed_run(scenario, &scenario.self_field, &IntegratorConfig::new(Method::Amts(cfg), t_end), stops)
    };
    let target = budget as f64;
    // bracket in log(dt): `fine` takes too many steps, `coarse` at most `budget`
    let mut fine: Option<f64> = None;
    let mut coarse: Option<(f64, (RunOutput, f64))> = None;
    let mut log_dt = (t_end / target).ln();
    for _ in 0..40 {
        let result = run(log_dt.exp())?;
        let steps = result.0.trace.records.len();
        if steps == budget {
            return Ok(result);
        }
        if steps > budget {
            fine = Some(log_dt);
        } else if coarse.as_ref().is_none_or(|(c, _)| log_dt < *c) {
            coarse = Some((log_dt, result));
        }
        log_dt = match (fine, &coarse) {
            (Some(f), Some((c, _))) => {
                if (c - f).abs() < 1e-9 {
                    break;
                }
                0.5 * (f + c)
            }
            // steps scale roughly like 1/dt
            _ => log_dt + (steps as f64 / target).ln(),
        };
    }
    coarse.map(|(_, r)| r).ok_or_else(|| Error::Breakdown {
        step: 0,
        reason: format!("no AMTS setting reaches {budget} outer steps"),
    })
}

/// Final transverse emittance error against an MTS `m = 1` reference for
/// every method and self-solve budget.
///
/// Fixed MTS at budget `S` takes `S` outer steps of `t_end / S`; AMTS runs are
/// tuned to `S` outer steps. Both then use `S + 1` solves.
pub fn experiment_error_vs_work(scenario: &Scenario, methods: &[WorkMethod]) -> Result<ExperimentReport> {
    let base = inner_settings(scenario)?;
    let t_end = scenario.integrator.t_end;
    let stops = [t_end];
    let ref_steps = scenario.experiment.reference_steps;
    let reference_cfg = IntegratorConfig::new(
        Method::Mts {
            h: t_end / ref_steps as f64,
            substeps: 1,
        },
        t_end,
    );
    let reference_run = timed_run(scenario, &scenario.self_field, &reference_cfg, &stops)?;
    let reference_diag = reference_run.0.diagnostics.clone();
    let reference = summarize("reference".into(), ref_steps, reference_run, &reference_diag);

    let jobs: Vec<(WorkMethod, usize)> = methods
        .iter()
        .flat_map(|&m| scenario.experiment.budgets.iter().map(move |&s| (m, s)))
        .collect();
    let runs = jobs
        .par_iter()
        .map(|&(method, budget)| {
            let result = match method {
                WorkMethod::Mts => {
                    let h = t_end / budget as f64;
                    let cfg = IntegratorConfig::new(
                        Method::Mts {
                            h,
                            substeps: substeps_for(h, base.dt_inner),
                        },
                        t_end,
                    );
                    timed_run(scenario, &scenario.self_field, &cfg, &stops)?
                }
                WorkMethod::Amts(control) => calibrated_amts(scenario, &base, control, budget, &stops)?,
            };
            Ok(summarize(method.label(), budget, result, &reference_diag))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport { reference, runs })
}

/// Base step of the MTS-vs-stale experiment: the scenario's fixed (inner) step.
fn base_step(scenario: &Scenario) -> Result<f64> {
    match &scenario.integrator.method {
        Method::Bb { h } | Method::BbStale { h, .. } => Ok(*h),
        Method::Mts { h, substeps } => Ok(h / *substeps as f64),
        Method::Amts(_) => Err(Error::InvalidConfig(
            "mts-vs-stale needs a fixed-step integrator to fix the base step".into(),
        )),
    }
}

/// Compares MTS with `m` substeps against Boris-Buneman reusing the self field
/// for `n = m` steps, sampling the emittance error at the diagnostics rows.
///
/// Both families take the scenario's base step for the external field and
/// solve the self field every `m` base steps. The reference is MTS with
/// `m = 1`; the `no-space-charge` row drops the self field altogether.
pub fn experiment_mts_vs_stale(scenario: &Scenario) -> Result<ExperimentReport> {
    let h = base_step(scenario)?;
    let t_end = scenario.integrator.t_end;
    let stops = scenario.diagnostic_times();
    let interval = t_end / scenario.diagnostics.rows as f64;
    for &m in &scenario.experiment.periods {
        let per = interval / (m as f64 * h);
        if (per - per.round()).abs() > 1e-6 {
            log::warn!("diagnostics interval is not a multiple of {m} base steps");
        }
    }
    let mts = |m: usize| IntegratorConfig::new(Method::Mts { h: m as f64 * h, substeps: m }, t_end);
    let reference_run = timed_run(scenario, &scenario.self_field, &mts(1), &stops)?;
    let reference_diag = reference_run.0.diagnostics.clone();
    let reference = summarize("mts".into(), 1, reference_run, &reference_diag);

    #[derive(Clone, Copy)]
    enum Job {
        Mts(usize),
        Stale(usize),
        NoSpaceCharge,
    }
    let mut jobs: Vec<Job> = scenario
        .experiment
        .periods
        .iter()
        .filter(|&&m| m != 1)
        .map(|&m| Job::Mts(m))
        .collect();
    jobs.extend(scenario.experiment.periods.iter().map(|&n| Job::Stale(n)));
    jobs.push(Job::NoSpaceCharge);

    let runs = jobs
        .par_iter()
        .map(|job| {
            let (label, parameter, self_field, cfg) = match *job {
                Job::Mts(m) => ("mts", m, scenario.self_field.clone(), mts(m)),
                Job::Stale(n) => (
                    "bb-stale",
                    n,
                    scenario.self_field.clone(),
                    IntegratorConfig::new(Method::BbStale { h, period: n }, t_end),
                ),
                Job::NoSpaceCharge => ("no-space-charge", 1, SelfFieldConfig::disabled(), mts(1)),
            };
            let result = timed_run(scenario, &self_field, &cfg, &stops)?;
            Ok(summarize(label.into(), parameter, result, &reference_diag))
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(ExperimentReport { reference, runs })
}
