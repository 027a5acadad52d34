//! Integration driver: runs any of the four methods up to a final time,
//! landing exactly on requested stop times.

use serde::Serialize;

use super::control::StepControl;
use super::steps::{step_bb, step_bb_stale, step_mts, StaleSelfField};
use crate::bunch::Bunch;
use crate::error::{Error, Result};
use crate::fields::{ExternalField, SelfFieldConfig, SelfFieldResult, SelfFieldSolver};

/// Relative slack under which the remaining time to a stop is taken in one step.
const LANDING_SLACK: f64 = 1e-9;

#[derive(Clone, Debug, PartialEq)]
pub struct AmtsConfig {
    /// First outer step; fixes the fictitious step `dtau = dt_outer_init / lambda_0`.
    pub dt_outer_init: f64,
    /// Target inner (external field) step.
    pub dt_inner: f64,
    pub control: StepControl,
    pub h_min: f64,
    pub h_max: f64,
}

impl AmtsConfig {
    /// Defaults: `beta = 1`, `h_min = dt_inner`, `h_max = 1e4 * dt_inner`.
    pub fn new(dt_outer_init: f64, dt_inner: f64) -> Self {
        AmtsConfig {
            dt_outer_init,
            dt_inner,
            control: StepControl::default(),
            h_min: dt_inner,
            h_max: 1e4 * dt_inner,
        }
    }

    pub fn with_control(mut self, control: StepControl) -> Self {
        self.control = control;
        self
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Method {
    Bb { h: f64 },
    BbStale { h: f64, period: usize },
    Mts { h: f64, substeps: usize },
    Amts(AmtsConfig),
}

impl Method {
    pub fn name(&self) -> &'static str {
        match self {
            Method::Bb { .. } => "bb",
            Method::BbStale { .. } => "bb-stale",
            Method::Mts { .. } => "mts",
            Method::Amts(_) => "amts",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct IntegratorConfig {
    pub method: Method,
    /// Final time [s].
    pub t_end: f64,
}

impl IntegratorConfig {
    pub fn new(method: Method, t_end: f64) -> Self {
        IntegratorConfig { method, t_end }
    }

    pub fn validate(&self) -> Result<()> {
        let positive = |name: &str, v: f64| {
            if v > 0.0 && v.is_finite() {
                Ok(())
            } else {
                Err(Error::InvalidConfig(format!("{name} must be positive and finite, got {v}")))
            }
        };
        positive("t_end", self.t_end)?;
        match &self.method {
            Method::Bb { h } => positive("h", *h),
            Method::BbStale { h, period } => {
                positive("h", *h)?;
                if *period == 0 {
                    return Err(Error::InvalidConfig("period must be at least 1".into()));
                }
                Ok(())
            }
            Method::Mts { h, substeps } => {
                positive("h", *h)?;
                if *substeps == 0 {
                    return Err(Error::InvalidConfig("substeps must be at least 1".into()));
                }
                Ok(())
            }
            Method::Amts(a) => {
                positive("dt_outer_init", a.dt_outer_init)?;
                positive("dt_inner", a.dt_inner)?;
                positive("h_min", a.h_min)?;
                positive("h_max", a.h_max)?;
                if a.h_min > a.h_max {
                    return Err(Error::InvalidConfig(format!(
                        "h_min ({}) exceeds h_max ({})",
                        a.h_min, a.h_max
                    )));
                }
                if a.dt_inner > a.dt_outer_init {
                    return Err(Error::InvalidConfig(format!(
                        "dt_inner ({}) exceeds dt_outer_init ({})",
                        a.dt_inner, a.dt_outer_init
                    )));
                }
                if let StepControl::MaxAcceleration { beta } = a.control {
                    positive("beta", beta)?;
                }
                Ok(())
            }
        }
    }
}

/// One outer step of a run.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct StepRecord {
    pub step: usize,
    /// Clock at the end of the step.
    pub t: f64,
    pub h: f64,
    pub m: usize,
    /// Step factor; 1 for the fixed-step methods.
    pub lambda: f64,
    /// Largest self-field acceleration of the fields driving the leading kick.
    pub max_accel: f64,
    /// The step deviates from the step law (clamped or shortened to land on a stop).
    pub clamped: bool,
    /// Self-field solves so far, including the initial one.
    pub self_solves: u64,
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct StepTrace {
    pub records: Vec<StepRecord>,
    /// Fictitious-time step of an adaptive run.
    pub dtau: Option<f64>,
}

/// Number of inner steps keeping `h / m` near `dt_inner`.
pub fn substeps_for(h: f64, dt_inner: f64) -> usize {
    ((h / dt_inner).round() as usize).max(1)
}

enum State {
    Bb,
    Stale(StaleSelfField),
    Mts(SelfFieldResult),
    Amts { cached: SelfFieldResult, dtau: f64 },
}

/// Integrates `bunch` from its current clock to `cfg.t_end`.
///
/// Steps are shortened to land exactly on every time in `stops` that lies
/// inside the run and on `t_end`; `on_stop` sees the bunch at each of them.
pub fn integrate<F>(
    bunch: &mut Bunch,
    external: &ExternalField,
    solver: &mut SelfFieldSolver,
    cfg: &IntegratorConfig,
    stops: &[f64],
    mut on_stop: F,
) -> Result<StepTrace>
where
    F: FnMut(&Bunch, &StepRecord) -> Result<()>,
{
    cfg.validate()?;
    bunch.validate()?;
    let t_end = cfg.t_end;
    if t_end <= bunch.time {
        return Err(Error::InvalidConfig(format!(
            "t_end ({t_end}) must lie after the bunch clock ({})",
            bunch.time
        )));
    }
    let mut targets: Vec<f64> = stops
        .iter()
        .copied()
        .filter(|&t| t > bunch.time && t < t_end)
        .collect();
    targets.sort_by(f64::total_cmp);
    targets.dedup();
    targets.push(t_end);

    let mut trace = StepTrace::default();
    let mut state = match &cfg.method {
        Method::Bb { .. } => State::Bb,
        Method::BbStale { period, .. } => State::Stale(StaleSelfField::new(*period)),
        Method::Mts { .. } => State::Mts(solver.solve(bunch)?),
        Method::Amts(a) => {
            let cached = solver.solve(bunch)?;
            let lambda0 = a.control.factor(bunch, &cached);
            if !lambda0.is_finite() || lambda0 <= 0.0 {
                return Err(Error::AdaptiveFailure { step: 0, lambda: lambda0 });
            }
            let dtau = a.dt_outer_init / lambda0;
            trace.dtau = Some(dtau);
            State::Amts { cached, dtau }
        }
    };

    let mut next = 0;
    let mut step = 0;
    while next < targets.len() {
        let target = targets[next];
        let remaining = target - bunch.time;

        let (nominal, lambda, mut clamped) = match (&cfg.method, &state) {
            (Method::Bb { h }, _) | (Method::BbStale { h, .. }, _) | (Method::Mts { h, .. }, _) => {
                (*h, 1.0, false)
            }
            (Method::Amts(a), State::Amts { cached, dtau }) => {
                let lambda = a.control.factor(bunch, cached);
                if !lambda.is_finite() || lambda <= 0.0 {
                    return Err(Error::AdaptiveFailure { step, lambda });
                }
                let h = lambda * dtau;
                let limited = h.clamp(a.h_min, a.h_max);
                (limited, lambda, limited != h)
            }
            _ => unreachable!("state always matches the method"),
        };
        let landing = remaining <= nominal * (1.0 + LANDING_SLACK);
        let h = if landing { remaining } else { nominal };
        clamped |= landing && h != nominal;

        let (m, max_accel) = match (&cfg.method, &mut state) {
            (Method::Bb { .. }, State::Bb) => (1, step_bb(h, bunch, external, solver)?.max_accel),
            (Method::BbStale { .. }, State::Stale(stale)) => {
                (1, step_bb_stale(h, bunch, external, solver, stale)?)
            }
            (Method::Mts { substeps, .. }, State::Mts(cached)) => {
                let leading = cached.max_accel;
                *cached = step_mts(h, *substeps, bunch, external, solver, cached)?;
                (*substeps, leading)
            }
            (Method::Amts(a), State::Amts { cached, .. }) => {
                let m = substeps_for(h, a.dt_inner);
                let leading = cached.max_accel;
                *cached = step_mts(h, m, bunch, external, solver, cached)?;
                (m, leading)
            }
            _ => unreachable!("state always matches the method"),
        };

        if landing {
            bunch.time = target;
        }
        if !bunch.is_finite() {
            return Err(Error::Breakdown {
                step,
                reason: "non-finite particle state".into(),
            });
        }
        let record = StepRecord {
            step,
            t: bunch.time,
            h,
            m,
            lambda,
            max_accel,
            clamped,
            self_solves: solver.solves(),
        };
        if landing {
            on_stop(bunch, &record)?;
            next += 1;
        }
        trace.records.push(record);
        step += 1;
    }
    Ok(trace)
}

/// Adaptive multiple-time-stepping run to `cfg.t_end` with a fresh solver.
pub fn run_amts(
    mut bunch: Bunch,
    external: &ExternalField,
    self_config: &SelfFieldConfig,
    cfg: &IntegratorConfig,
) -> Result<(Bunch, StepTrace)> {
    if !matches!(cfg.method, Method::Amts(_)) {
        return Err(Error::InvalidConfig("run_amts needs the amts method".into()));
    }
    let mut solver = SelfFieldSolver::new(self_config.clone())?;
    let trace = integrate(&mut bunch, external, &mut solver, cfg, &[], |_, _| Ok(()))?;
    Ok((bunch, trace))
}
