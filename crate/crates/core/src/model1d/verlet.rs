//! Adaptive Verlet integration of the model problem under the Sundman
//! transformation `dt/dtau = g(x)`.

use super::analytic::State1D;
use crate::error::{Error, Result};

/// Runs are abandoned after this many steps.
pub const MAX_STEPS: usize = 10_000_000;

/// Time transformation `g(x) = x^beta`, i.e. `(x'')^(-beta/2)` for `x'' = 1/x^2`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SundmanG1D {
    pub beta: f64,
}

impl SundmanG1D {
    pub fn new(beta: f64) -> Self {
        SundmanG1D { beta }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        x.powf(self.beta)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct VerletOutcome {
    /// State at the end of the first step reaching `t_end`.
    pub state: State1D,
    pub steps: usize,
}

/// Reciprocal step-factor update; a fixed point when `g(x) = lambda`.
#[inline]
pub fn update_lambda(g: f64, lambda: f64) -> f64 {
    1.0 / (2.0 / g - 1.0 / lambda)
}

/// Integrates from `(x0, v0)` at `t = 0` until the clock first reaches `t_end`.
///
/// `dt0` is the first real-time step; the fictitious step is `dt0 / g(x0)`.
/// Each step is a half kick, half drift, step-factor update, half drift, half kick.
pub fn adaptive_verlet(x0: f64, v0: f64, t_end: f64, g: SundmanG1D, dt0: f64) -> Result<VerletOutcome> {
    if !(x0 > 0.0) {
        return Err(Error::Domain { what: "x0", value: x0 });
    }
    if !(dt0 > 0.0) {
        return Err(Error::Domain { what: "dt0", value: dt0 });
    }
    let mut lambda = g.eval(x0);
    let dtau = dt0 / lambda;
    let (mut x, mut v, mut t) = (x0, v0, 0.0);
    let mut steps = 0;
    let breakdown = |step: usize, reason: String| Error::Breakdown { step, reason };

    while t < t_end {
        if steps == MAX_STEPS {
            return Err(breakdown(steps, "step limit reached".into()));
        }
        let half = 0.5 * dtau * lambda;
        v += half / (x * x);
        x += half * v;
        t += half;
        if !(x > 0.0) {
            return Err(breakdown(steps, format!("position {x} left the domain")));
        }
        lambda = update_lambda(g.eval(x), lambda);
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(breakdown(steps, format!("step factor {lambda} is not positive")));
        }
        let half = 0.5 * dtau * lambda;
        x += half * v;
        if !(x > 0.0) {
            return Err(breakdown(steps, format!("position {x} left the domain")));
        }
        v += half / (x * x);
        t += half;
        steps += 1;
    }
    Ok(VerletOutcome {
        state: State1D { x, v, t },
        steps,
    })
}
