use serde::Deserialize;

use super::FieldSample;
use crate::bunch::{Bunch, Vec3};
use crate::constants::SPEED_OF_LIGHT;

/// Analytic external field models.
#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum ExternalField {
    UniformE { e: [f64; 3] },
    UniformB { b: [f64; 3] },
    /// Ideal solenoid: uniform field `strength` along the unit vector `axis`.
    Solenoid { axis: [f64; 3], strength: f64 },
    /// Hard-edged accelerating gap on the z axis with `E_z = E0 cos(wt + phi)`
    /// for `|z - z0| <= length / 2`. Off axis the gap carries the azimuthal
    /// magnetic field required by Ampere's law.
    RfGap {
        center: f64,
        gradient: f64,
        omega: f64,
        phase: f64,
        length: f64,
    },
    Superposition { parts: Vec<ExternalField> },
}

impl ExternalField {
    pub fn none() -> Self {
        ExternalField::Superposition { parts: Vec::new() }
    }

    pub fn eval(&self, x: &Vec3, t: f64) -> FieldSample {
        match self {
            ExternalField::UniformE { e } => FieldSample::new(Vec3::from(*e), Vec3::zeros()),
            ExternalField::UniformB { b } => FieldSample::new(Vec3::zeros(), Vec3::from(*b)),
            ExternalField::Solenoid { axis, strength } => {
                let axis = Vec3::from(*axis);
                FieldSample::new(Vec3::zeros(), axis.normalize() * *strength)
            }
            ExternalField::RfGap {
                center,
                gradient,
                omega,
                phase,
                length,
            } => {
                if (x.z - center).abs() > 0.5 * length {
                    return FieldSample::zero();
                }
                let arg = omega * t + phase;
                let ez = gradient * arg.cos();
                // B_phi = (r / 2c^2) dE_z/dt, written in cartesian components.
                let k = -0.5 * gradient * omega * arg.sin() / (SPEED_OF_LIGHT * SPEED_OF_LIGHT);
                FieldSample::new(Vec3::new(0.0, 0.0, ez), Vec3::new(-k * x.y, k * x.x, 0.0))
            }
            ExternalField::Superposition { parts } => parts
                .iter()
                .fold(FieldSample::zero(), |acc, part| acc + part.eval(x, t)),
        }
    }

    /// Fields at every particle of the bunch, evaluated at the bunch clock.
    pub fn sample(&self, bunch: &Bunch) -> Vec<FieldSample> {
        bunch
            .positions
            .iter()
            .map(|x| self.eval(x, bunch.time))
            .collect()
    }

    /// Whether the model is valid: finite parameters, nonzero solenoid axis.
    pub fn validate(&self) -> Result<(), String> {
        let finite = |vals: &[f64]| vals.iter().all(|v| v.is_finite());
        match self {
            ExternalField::UniformE { e } if !finite(e) => Err("uniform-e: non-finite field".into()),
            ExternalField::UniformB { b } if !finite(b) => Err("uniform-b: non-finite field".into()),
            ExternalField::Solenoid { axis, strength } => {
                if !finite(axis) || !strength.is_finite() || Vec3::from(*axis).norm() == 0.0 {
                    Err("solenoid: axis must be a finite nonzero vector".into())
                } else {
                    Ok(())
                }
            }
            ExternalField::RfGap {
                center,
                gradient,
                omega,
                phase,
                length,
            } => {
                if !finite(&[*center, *gradient, *omega, *phase, *length]) || *length <= 0.0 {
                    Err("rf-gap: parameters must be finite with positive length".into())
                } else {
                    Ok(())
                }
            }
            ExternalField::Superposition { parts } => parts.iter().try_for_each(|p| p.validate()),
            _ => Ok(()),
        }
    }
}
