use serde::Deserialize;

use super::{acceleration, direct, mesh, FieldSample};
use crate::bunch::{lorentz_gamma, Bunch, Vec3};
use crate::constants::SPEED_OF_LIGHT;
use crate::error::{Error, Result};

/// Default Plummer softening length for the direct sum [m].
pub const DEFAULT_SOFTENING: f64 = 1e-6;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SolverKind {
    /// Softened pairwise Coulomb sum, O(N^2).
    DirectSum,
    /// Cloud-in-cell deposit, open-boundary FFT Poisson solve, CIC gather.
    MeshPic,
    /// No space charge. Solves still count but return zero fields.
    Disabled,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SelfFieldConfig {
    pub solver: SolverKind,
    /// Softening length of the direct sum [m].
    pub softening: f64,
    /// Mesh nodes per axis (before the doubling for open boundaries).
    pub grid: [usize; 3],
    /// Fractional margin added on each side of the rest-frame bounding box.
    pub padding: f64,
}

impl Default for SelfFieldConfig {
    fn default() -> Self {
        SelfFieldConfig {
            solver: SolverKind::DirectSum,
            softening: DEFAULT_SOFTENING,
            grid: [32, 32, 32],
            padding: 0.05,
        }
    }
}

impl SelfFieldConfig {
    pub fn direct_sum(softening: f64) -> Self {
        SelfFieldConfig {
            solver: SolverKind::DirectSum,
            softening,
            ..Default::default()
        }
    }

    pub fn mesh_pic(grid: [usize; 3]) -> Self {
        SelfFieldConfig {
            solver: SolverKind::MeshPic,
            grid,
            ..Default::default()
        }
    }

    pub fn disabled() -> Self {
        SelfFieldConfig {
            solver: SolverKind::Disabled,
            ..Default::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.softening > 0.0 && self.softening.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "softening must be positive, got {}",
                self.softening
            )));
        }
        if self.grid.iter().any(|&n| n < 8 || n % 2 != 0) {
            return Err(Error::InvalidConfig(format!(
                "grid dimensions must be even and at least 8, got {:?}",
                self.grid
            )));
        }
        if !(self.padding >= 0.0 && self.padding.is_finite()) {
            return Err(Error::InvalidConfig(format!(
                "padding must be nonnegative, got {}",
                self.padding
            )));
        }
        Ok(())
    }
}

/// Lab-frame self fields at every particle plus the largest self-field acceleration.
#[derive(Clone, Debug, PartialEq)]
pub struct SelfFieldResult {
    pub fields: Vec<FieldSample>,
    pub max_accel: f64,
}

impl SelfFieldResult {
    pub fn zeros(n: usize) -> Self {
        SelfFieldResult {
            fields: vec![FieldSample::zero(); n],
            max_accel: 0.0,
        }
    }

    pub fn e(&self, i: usize) -> Vec3 {
        self.fields[i].e
    }

    pub fn b(&self, i: usize) -> Vec3 {
        self.fields[i].b
    }
}

/// Frame moving with the mean momentum of the bunch.
pub(super) struct RestFrame {
    /// Unit vector along the mean momentum (x if the bunch is at rest).
    pub axis: Vec3,
    pub gamma: f64,
    /// Velocity of the frame [m/s].
    pub velocity: Vec3,
    pub origin: Vec3,
}

impl RestFrame {
    pub fn of(bunch: &Bunch) -> Self {
        let p = bunch.mean_momentum();
        let gamma = lorentz_gamma(&p, bunch.mass);
        let norm = p.norm();
        let axis = if norm > 0.0 { p / norm } else { Vec3::x() };
        RestFrame {
            axis,
            gamma,
            velocity: p / (bunch.mass * gamma),
            origin: bunch.mean_position(),
        }
    }

    /// Rest-frame position of a lab position taken at the common lab time.
    /// The longitudinal coordinate is stretched by gamma.
    pub fn boost(&self, x: &Vec3) -> Vec3 {
        let d = x - self.origin;
        let par = d.dot(&self.axis);
        d + self.axis * ((self.gamma - 1.0) * par)
    }

    /// Lab-frame fields from a purely electric rest-frame field.
    pub fn unboost(&self, e_rest: &Vec3) -> FieldSample {
        let par = self.axis * e_rest.dot(&self.axis);
        let e = par + (e_rest - par) * self.gamma;
        let b = self.velocity.cross(&e) / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
        FieldSample { e, b }
    }
}

/// Space-charge fields of `bunch` in the quasi-static approximation: boost to
/// the mean rest frame, solve the electrostatic problem there, transform back.
pub fn solve_self_field(bunch: &Bunch, config: &SelfFieldConfig) -> Result<SelfFieldResult> {
    let n = bunch.len();
    if n == 1 || config.solver == SolverKind::Disabled {
        return Ok(SelfFieldResult::zeros(n));
    }
    let frame = RestFrame::of(bunch);
    let rest: Vec<Vec3> = bunch.positions.iter().map(|x| frame.boost(x)).collect();
    let e_rest = match config.solver {
        SolverKind::DirectSum => direct::electric_field(&rest, bunch.charge, config.softening),
        SolverKind::MeshPic => mesh::electric_field(&rest, bunch.charge, config.grid, config.padding)?,
        SolverKind::Disabled => unreachable!(),
    };
    let fields: Vec<FieldSample> = e_rest.iter().map(|e| frame.unboost(e)).collect();
    let max_accel = max_acceleration(bunch, &fields);
    Ok(SelfFieldResult { fields, max_accel })
}

/// Largest `|a_i|` over particles for the self-field force `q (e + v x b)`.
pub fn max_acceleration(bunch: &Bunch, fields: &[FieldSample]) -> f64 {
    bunch
        .momenta
        .iter()
        .zip(fields)
        .map(|(p, f)| acceleration(p, &f.force(bunch.charge, p, bunch.mass), bunch.mass).norm())
        .fold(0.0, f64::max)
}

/// Self-field solver that counts how often it is asked for a solve.
#[derive(Clone, Debug)]
pub struct SelfFieldSolver {
    config: SelfFieldConfig,
    solves: u64,
}

impl SelfFieldSolver {
    pub fn new(config: SelfFieldConfig) -> Result<Self> {
        config.validate()?;
        Ok(SelfFieldSolver { config, solves: 0 })
    }

    pub fn config(&self) -> &SelfFieldConfig {
        &self.config
    }

    pub fn solves(&self) -> u64 {
        self.solves
    }

    pub fn solve(&mut self, bunch: &Bunch) -> Result<SelfFieldResult> {
        self.solves += 1;
        solve_self_field(bunch, &self.config)
    }
}
