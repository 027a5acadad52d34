//! One-dimensional inverse-square repulsion, the model problem used to pick
//! the exponent of the adaptive step law.

mod analytic;
mod sweep;
mod verlet;

pub use analytic::{
    energy, exact_solution, incoming_start, invert_time, time_from_lowest, velocity_at, x_lowest,
    State1D,
};
pub use sweep::{beta_sweep, best_beta, calibrate_dt0, SweepConfig, SweepRow};
pub use verlet::{adaptive_verlet, update_lambda, SundmanG1D, VerletOutcome, MAX_STEPS};
