//! Field models: analytic external fields and the space-charge self field.

mod direct;
mod external;
mod mesh;
mod self_field;

use std::ops::{Add, AddAssign};

use crate::bunch::{lorentz_gamma, Vec3};
use crate::constants::SPEED_OF_LIGHT;

pub use external::ExternalField;
pub use self_field::{
    solve_self_field, SelfFieldConfig, SelfFieldResult, SelfFieldSolver, SolverKind,
    DEFAULT_SOFTENING,
};

/// Electric and magnetic field seen by one particle.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct FieldSample {
    pub e: Vec3,
    pub b: Vec3,
}

impl FieldSample {
    pub fn new(e: Vec3, b: Vec3) -> Self {
        FieldSample { e, b }
    }

    pub fn zero() -> Self {
        Self::default()
    }

    /// Lorentz force `q (e + v x b)` on a particle with momentum `p`.
    pub fn force(&self, charge: f64, p: &Vec3, mass: f64) -> Vec3 {
        let v = p / (mass * lorentz_gamma(p, mass));
        charge * (self.e + v.cross(&self.b))
    }
}

impl Add for FieldSample {
    type Output = FieldSample;

    fn add(self, rhs: FieldSample) -> FieldSample {
        FieldSample {
            e: self.e + rhs.e,
            b: self.b + rhs.b,
        }
    }
}

impl AddAssign for FieldSample {
    fn add_assign(&mut self, rhs: FieldSample) {
        self.e += rhs.e;
        self.b += rhs.b;
    }
}

/// Coordinate acceleration `d^2x/dt^2` produced by a force `f` on a particle
/// with momentum `p`:
///
/// `a = (f - p (p.f) / (m^2 c^2 gamma^2)) / (m gamma)`
///
/// The projection term removes the part of the force that only raises gamma,
/// so a longitudinal force sees the mass `gamma^3 m` and a transverse one `gamma m`.
pub fn acceleration(p: &Vec3, force: &Vec3, mass: f64) -> Vec3 {
    let gamma = lorentz_gamma(p, mass);
    let mcg = mass * SPEED_OF_LIGHT * gamma;
    (force - p * (p.dot(force) / (mcg * mcg))) / (mass * gamma)
}
