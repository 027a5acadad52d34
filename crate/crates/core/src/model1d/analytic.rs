//! Exact solution of `x'' = 1 / x^2` for `x > 0`.
//!
//! With energy `H = v^2/2 + 1/x` the particle turns around at `x_L = 1/H`.
//! The time from the turning point to `x` is known in closed form; its
//! inverse is found by bisection.

use crate::error::{Error, Result};

/// State of the model problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct State1D {
    pub x: f64,
    pub v: f64,
    pub t: f64,
}

impl State1D {
    pub fn energy(&self) -> f64 {
        energy(self.x, self.v)
    }
}

pub fn energy(x: f64, v: f64) -> f64 {
    0.5 * v * v + 1.0 / x
}

/// Turning point `2 x0 / (2 + v0^2 x0)` reached from `(x0, v0)`.
pub fn x_lowest(x0: f64, v0: f64) -> Result<f64> {
    if !(x0 > 0.0) {
        return Err(Error::Domain { what: "x0", value: x0 });
    }
    Ok(2.0 * x0 / (2.0 + v0 * v0 * x0))
}

fn check_above(x: f64, x_l: f64) -> Result<()> {
    if !(x_l > 0.0) {
        return Err(Error::Domain { what: "x_L", value: x_l });
    }
    if !(x >= x_l) {
        return Err(Error::Domain { what: "x", value: x });
    }
    Ok(())
}

/// Speed `sqrt(2 (1/x_L - 1/x))` at `x >= x_L`.
pub fn velocity_at(x: f64, x_l: f64) -> Result<f64> {
    check_above(x, x_l)?;
    Ok((2.0 * (1.0 / x_l - 1.0 / x)).max(0.0).sqrt())
}

/// Time to travel from the turning point `x_L` out to `x`.
pub fn time_from_lowest(x: f64, x_l: f64) -> Result<f64> {
    check_above(x, x_l)?;
    Ok(time_unchecked(x, x_l))
}

fn time_unchecked(x: f64, x_l: f64) -> f64 {
    let d = (x - x_l).max(0.0);
    let log = ((d.sqrt() + x.sqrt()) / x_l.sqrt()).ln();
    (0.5 * x_l).sqrt() * ((x * d).sqrt() + x_l * log)
}

/// Position reached a time `t` after the turning point.
///
/// Bisects `T(x) = t` on `[x_L, x_L + t^2 / x_L^2]`; if the bracket is too
/// narrow its width is multiplied by 16 and the search is retried, twice at most.
pub fn invert_time(t: f64, x_l: f64) -> Result<f64> {
    if !(x_l > 0.0) {
        return Err(Error::Domain { what: "x_L", value: x_l });
    }
    if !(t >= 0.0) || !t.is_finite() {
        return Err(Error::Domain { what: "t", value: t });
    }
    if t == 0.0 {
        return Ok(x_l);
    }
    // a few ulps at least, so times within rounding of zero still bracket
    let mut width = (t * t / (x_l * x_l)).max(8.0 * f64::EPSILON * x_l);
    let mut hi = x_l + width;
    let mut widenings = 0;
    while time_unchecked(hi, x_l) < t {
        if widenings == 2 {
            return Err(Error::Bracket { t });
        }
        widenings += 1;
        width *= 16.0;
        hi = x_l + width;
    }
    let mut lo = x_l;
    loop {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if time_unchecked(mid, x_l) < t {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // pick whichever end is closer in time
    let (tl, th) = (time_unchecked(lo, x_l), time_unchecked(hi, x_l));
    Ok(if (t - tl).abs() <= (th - t).abs() { lo } else { hi })
}

/// Exact state at time `t` for the start `(x0, v0)` at time 0.
pub fn exact_solution(x0: f64, v0: f64, t: f64) -> Result<State1D> {
    let x_l = x_lowest(x0, v0)?;
    let t0 = time_unchecked(x0, x_l);
    let t_l = if v0 > 0.0 { -t0 } else { t0 };
    let x = invert_time((t - t_l).abs(), x_l)?;
    let speed = velocity_at(x, x_l)?;
    let v = if t > t_l { speed } else { -speed };
    Ok(State1D { x, v, t })
}

/// Start that reaches the turning point at time `t_l` with energy `energy`.
pub fn incoming_start(energy: f64, t_l: f64) -> Result<(f64, f64)> {
    if !(energy > 0.0) {
        return Err(Error::Domain { what: "H", value: energy });
    }
    let x_l = 1.0 / energy;
    let x0 = invert_time(t_l, x_l)?;
    Ok((x0, -velocity_at(x0, x_l)?))
}
