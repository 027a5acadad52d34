//! Error of adaptive Verlet as a function of the Sundman exponent.

use serde::Serialize;

use super::analytic::{exact_solution, incoming_start};
use super::verlet::{adaptive_verlet, SundmanG1D, VerletOutcome};
use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SweepConfig {
    pub energies: Vec<f64>,
    pub betas: Vec<f64>,
    pub target_steps: usize,
    pub t_end: f64,
    /// Time at which every scenario reaches its turning point.
    pub t_turn: f64,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            energies: vec![1.0, 10.0, 100.0],
            betas: (0..=8).map(|i| 0.25 * i as f64).collect(),
            target_steps: 1000,
            t_end: 20.0,
            t_turn: 10.0,
        }
    }
}

/// One `(H, beta)` cell of the sweep. Error fields are empty when the run broke down.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct SweepRow {
    #[serde(rename = "H")]
    pub energy: f64,
    pub beta: f64,
    pub steps_taken: Option<usize>,
    pub dt0: Option<f64>,
    pub err_x: Option<f64>,
    pub err_v: Option<f64>,
    pub err_max: Option<f64>,
    pub broke_down: bool,
}

impl SweepRow {
    /// Error with breakdowns ranked worst.
    pub fn error_or_inf(&self) -> f64 {
        self.err_max.unwrap_or(f64::INFINITY)
    }
}

/// Finds `dt0` so the run takes `target` steps (within one).
///
/// Secant iteration on `log(steps)` against `log(dt0)`, kept inside a bracket
/// and falling back to bisection when the secant step leaves it.
pub fn calibrate_dt0(
    x0: f64,
    v0: f64,
    t_end: f64,
    g: SundmanG1D,
    target: usize,
) -> Result<(f64, VerletOutcome)> {
    let run = |dt: f64| adaptive_verlet(x0, v0, t_end, g, dt);
    let goal = (target as f64).ln();
    // (log dt, log steps) pairs on either side of the target
    let mut too_fine: Option<(f64, f64)> = None;
    let mut too_coarse: Option<(f64, f64)> = None;
    let mut prev: Option<(f64, f64)> = None;
    let mut log_dt = (t_end / target as f64).ln();

    for _ in 0..80 {
        let out = run(log_dt.exp())?;
        if out.steps.abs_diff(target) <= 1 {
            return Ok((log_dt.exp(), out));
        }
        let point = (log_dt, (out.steps as f64).ln());
        if out.steps > target {
            too_fine = Some(point);
        } else {
            too_coarse = Some(point);
        }
        let secant = match prev {
            Some((a, fa)) if (point.1 - fa).abs() > 0.0 => {
                Some(point.0 + (goal - point.1) * (point.0 - a) / (point.1 - fa))
            }
            _ => None,
        };
        // steps scale roughly like 1/dt
        let mut proposal = secant.unwrap_or(point.0 + point.1 - goal);
        if let (Some((lo, _)), Some((hi, _))) = (too_fine, too_coarse) {
            if !(proposal > lo && proposal < hi) {
                proposal = 0.5 * (lo + hi);
            }
            if (hi - lo).abs() < 1e-15 {
                break;
            }
        }
        prev = Some(point);
        log_dt = proposal;
    }
    Err(Error::Breakdown {
        step: 0,
        reason: format!("could not calibrate {target} steps for beta = {}", g.beta),
    })
}

fn relative(a: f64, b: f64) -> f64 {
    ((a - b) / b).abs()
}

/// Runs every `(H, beta)` pair of the sweep.
///
/// Each scenario starts on the incoming branch so that it turns at `t_turn`.
/// Errors compare the final state with the exact solution at the clock value
/// the run actually stopped at.
pub fn beta_sweep(cfg: &SweepConfig) -> Result<Vec<SweepRow>> {
    let mut rows = Vec::with_capacity(cfg.energies.len() * cfg.betas.len());
    for &energy in &cfg.energies {
        let (x0, v0) = incoming_start(energy, cfg.t_turn)?;
        for &beta in &cfg.betas {
            let g = SundmanG1D::new(beta);
            let row = match calibrate_dt0(x0, v0, cfg.t_end, g, cfg.target_steps) {
                Ok((dt0, out)) => {
                    let exact = exact_solution(x0, v0, out.state.t)?;
                    let err_x = relative(out.state.x, exact.x);
                    let err_v = relative(out.state.v, exact.v);
                    SweepRow {
                        energy,
                        beta,
                        steps_taken: Some(out.steps),
                        dt0: Some(dt0),
                        err_x: Some(err_x),
                        err_v: Some(err_v),
                        err_max: Some(err_x.max(err_v)),
                        broke_down: false,
                    }
                }
                Err(Error::Breakdown { .. }) => SweepRow {
                    energy,
                    beta,
                    steps_taken: None,
                    dt0: None,
                    err_x: None,
                    err_v: None,
                    err_max: None,
                    broke_down: true,
                },
                Err(e) => return Err(e),
            };
            rows.push(row);
        }
    }
    Ok(rows)
}

/// Exponent with the smallest error at one energy level.
pub fn best_beta(rows: &[SweepRow], energy: f64) -> Option<f64> {
    rows.iter()
        .filter(|r| r.energy == energy && !r.broke_down)
        .min_by(|a, b| a.error_or_inf().total_cmp(&b.error_or_inf()))
        .map(|r| r.beta)
}
