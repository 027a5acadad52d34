//! Step-size factors for the adaptive integrator.

use crate::bunch::Bunch;
use crate::diagnostics::rms_radius;
use crate::fields::SelfFieldResult;

/// Accelerations below this floor [m/s^2] are treated as the floor, so a
/// vanishing self field yields a large but finite step factor.
pub const ACCEL_FLOOR: f64 = 1e-20;

/// Smallest beam size [m] used by [`StepControl::BeamSize`].
pub const SIZE_FLOOR: f64 = 1e-30;

/// `(max |a|)^(-beta/2)` with the acceleration floored at [`ACCEL_FLOOR`].
pub fn g_function(max_accel: f64, beta: f64) -> f64 {
    max_accel.max(ACCEL_FLOOR).powf(-0.5 * beta)
}

/// How the adaptive integrator maps the current state to the step factor.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum StepControl {
    /// Proportional to a power of the largest self-field acceleration.
    MaxAcceleration { beta: f64 },
    /// Proportional to the rms radius of the bunch.
    BeamSize,
}

impl Default for StepControl {
    fn default() -> Self {
        StepControl::MaxAcceleration { beta: 1.0 }
    }
}

impl StepControl {
    pub fn factor(&self, bunch: &Bunch, self_field: &SelfFieldResult) -> f64 {
        match *self {
            StepControl::MaxAcceleration { beta } => g_function(self_field.max_accel, beta),
            StepControl::BeamSize => rms_radius(bunch).max(SIZE_FLOOR),
        }
    }
}
