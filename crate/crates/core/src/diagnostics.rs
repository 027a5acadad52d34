//! Beam statistics: rms sizes, normalized rms emittances, kinetic energy.

use serde::Serialize;

use crate::bunch::{lorentz_gamma, Bunch};
use crate::constants::{ELEMENTARY_CHARGE, SPEED_OF_LIGHT};
use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Axis {
    X,
    Y,
    Z,
}

impl Axis {
    pub const ALL: [Axis; 3] = [Axis::X, Axis::Y, Axis::Z];

    #[inline]
    pub fn index(self) -> usize {
        match self {
            Axis::X => 0,
            Axis::Y => 1,
            Axis::Z => 2,
        }
    }
}

/// Centered second moments `(<u^2>, <p^2>, <u p>)` along one axis.
fn centered_moments(bunch: &Bunch, axis: Axis) -> (f64, f64, f64) {
    let k = axis.index();
    let n = bunch.len() as f64;
    let (su, sp) = bunch
        .positions
        .iter()
        .zip(&bunch.momenta)
        .fold((0.0, 0.0), |(su, sp), (x, p)| (su + x[k], sp + p[k]));
    let (mu, mp) = (su / n, sp / n);
    let (uu, pp, up) = bunch.positions.iter().zip(&bunch.momenta).fold(
        (0.0, 0.0, 0.0),
        |(uu, pp, up), (x, p)| {
            let du = x[k] - mu;
            let dp = p[k] - mp;
            (uu + du * du, pp + dp * dp, up + du * dp)
        },
    );
    (uu / n, pp / n, up / n)
}

/// Normalized rms emittance `sqrt(<u^2><p^2> - <u p>^2) / (m c)` from centered moments.
pub fn rms_emittance(bunch: &Bunch, axis: Axis) -> Result<f64> {
    if bunch.len() < 2 {
        return Err(Error::DegenerateInput(
            "emittance needs at least two particles".into(),
        ));
    }
    let (uu, pp, up) = centered_moments(bunch, axis);
    // Rounding can push a perfectly correlated beam slightly negative.
    let det = (uu * pp - up * up).max(0.0);
    Ok(det.sqrt() / (bunch.mass * SPEED_OF_LIGHT))
}

/// Rms size `sqrt(<u^2>)` about the centroid.
pub fn rms_size(bunch: &Bunch, axis: Axis) -> f64 {
    centered_moments(bunch, axis).0.sqrt()
}

/// Rms distance of the particles from the centroid.
pub fn rms_radius(bunch: &Bunch) -> f64 {
    Axis::ALL
        .iter()
        .map(|&a| centered_moments(bunch, a).0)
        .sum::<f64>()
        .sqrt()
}

/// Mean of `(gamma_i - 1) m c^2` over particles, in eV.
pub fn mean_kinetic_energy(bunch: &Bunch) -> f64 {
    let mc2 = bunch.mass * SPEED_OF_LIGHT * SPEED_OF_LIGHT;
    let total: f64 = bunch
        .momenta
        .iter()
        .map(|p| kinetic_from_gamma(lorentz_gamma(p, bunch.mass), mc2))
        .sum();
    total / bunch.len() as f64 / ELEMENTARY_CHARGE
}

// gamma - 1 loses everything for slow particles; p^2/(m^2c^2) / (gamma + 1) does not.
fn kinetic_from_gamma(gamma: f64, mc2: f64) -> f64 {
    (gamma * gamma - 1.0) / (gamma + 1.0) * mc2
}

/// One row of the diagnostics stream written by scenario runs.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct DiagnosticsRow {
    pub t: f64,
    pub h: f64,
    pub m: usize,
    pub self_solves: u64,
    pub rms_x: f64,
    pub rms_y: f64,
    pub rms_z: f64,
    pub emit_x: f64,
    pub emit_y: f64,
    pub emit_z: f64,
    pub mean_energy_ev: f64,
    pub max_accel: f64,
}

impl DiagnosticsRow {
    pub fn capture(
        bunch: &Bunch,
        h: f64,
        m: usize,
        self_solves: u64,
        max_accel: f64,
    ) -> Result<Self> {
        Ok(DiagnosticsRow {
            t: bunch.time,
            h,
            m,
            self_solves,
            rms_x: rms_size(bunch, Axis::X),
            rms_y: rms_size(bunch, Axis::Y),
            rms_z: rms_size(bunch, Axis::Z),
            emit_x: rms_emittance(bunch, Axis::X)?,
            emit_y: rms_emittance(bunch, Axis::Y)?,
            emit_z: rms_emittance(bunch, Axis::Z)?,
            mean_energy_ev: mean_kinetic_energy(bunch),
            max_accel,
        })
    }
}
