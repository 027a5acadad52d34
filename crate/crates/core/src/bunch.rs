use nalgebra::Vector3;

use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

pub type Vec3 = Vector3<f64>;

/// Lorentz factor `sqrt(1 + |p|^2 / (m c)^2)` of a particle with momentum `p`.
#[inline]
pub fn lorentz_gamma(p: &Vec3, mass: f64) -> f64 {
    let mc = mass * SPEED_OF_LIGHT;
    (1.0 + p.norm_squared() / (mc * mc)).sqrt()
}

/// Velocity `p / (m gamma)`.
#[inline]
pub fn velocity(p: &Vec3, mass: f64) -> Vec3 {
    p / (mass * lorentz_gamma(p, mass))
}

/// A bunch of identical macroparticles sharing one clock.
#[derive(Clone, Debug, PartialEq)]
pub struct Bunch {
    pub positions: Vec<Vec3>,
    pub momenta: Vec<Vec3>,
    /// Charge of one macroparticle [C].
    pub charge: f64,
    /// Rest mass of one macroparticle [kg].
    pub mass: f64,
    /// Simulation clock [s].
    pub time: f64,
}

impl Bunch {
    pub fn new(positions: Vec<Vec3>, momenta: Vec<Vec3>, charge: f64, mass: f64) -> Result<Self> {
        let bunch = Bunch {
            positions,
            momenta,
            charge,
            mass,
            time: 0.0,
        };
        bunch.validate()?;
        Ok(bunch)
    }

    pub fn validate(&self) -> Result<()> {
        if self.positions.is_empty() {
            return Err(Error::DegenerateInput("bunch has no particles".into()));
        }
        if self.positions.len() != self.momenta.len() {
            return Err(Error::DegenerateInput(format!(
                "{} positions but {} momenta",
                self.positions.len(),
                self.momenta.len()
            )));
        }
        if !(self.mass > 0.0 && self.mass.is_finite()) {
            return Err(Error::DegenerateInput(format!("mass must be positive, got {}", self.mass)));
        }
        if !self.charge.is_finite() || !self.time.is_finite() {
            return Err(Error::DegenerateInput("charge and time must be finite".into()));
        }
        if !self.is_finite() {
            return Err(Error::DegenerateInput("non-finite particle coordinates".into()));
        }
        Ok(())
    }

    pub fn len(&self) -> usize {
        self.positions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.positions.is_empty()
    }

    pub fn is_finite(&self) -> bool {
        self.positions
            .iter()
            .chain(&self.momenta)
            .all(|v| v.iter().all(|c| c.is_finite()))
    }

    pub fn gamma(&self, i: usize) -> f64 {
        lorentz_gamma(&self.momenta[i], self.mass)
    }

    pub fn mean_position(&self) -> Vec3 {
        mean(&self.positions)
    }

    pub fn mean_momentum(&self) -> Vec3 {
        mean(&self.momenta)
    }

    pub fn mean_gamma(&self) -> f64 {
        self.momenta
            .iter()
            .map(|p| lorentz_gamma(p, self.mass))
            .sum::<f64>()
            / self.len() as f64
    }
}

pub(crate) fn mean(vs: &[Vec3]) -> Vec3 {
    vs.iter().fold(Vec3::zeros(), |acc, v| acc + v) / vs.len() as f64
}
