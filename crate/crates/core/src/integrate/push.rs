//! The two exact sub-flows the integrators are composed from.

use crate::bunch::{lorentz_gamma, Bunch};
use crate::fields::FieldSample;

/// Moves every particle along its velocity for a time `h` and advances the clock.
pub fn drift(h: f64, bunch: &mut Bunch) {
    let mass = bunch.mass;
    for (x, p) in bunch.positions.iter_mut().zip(&bunch.momenta) {
        let gamma = lorentz_gamma(p, mass);
        *x += p * (h / (mass * gamma));
    }
    bunch.time += h;
}

/// Boris momentum update over `h`: half electric kick, magnetic rotation that
/// keeps `|p|`, half electric kick. Positions and clock are untouched.
pub fn kick(h: f64, bunch: &mut Bunch, fields: &[FieldSample]) {
    assert_eq!(fields.len(), bunch.len(), "one field sample per particle");
    let (q, mass) = (bunch.charge, bunch.mass);
    let half = 0.5 * h * q;
    for (p, f) in bunch.momenta.iter_mut().zip(fields) {
        *p += f.e * half;
        let gamma = lorentz_gamma(p, mass);
        let r = f.b * (half / (mass * gamma));
        let w = *p + p.cross(&r);
        let s = r * (2.0 / (1.0 + r.norm_squared()));
        *p += w.cross(&s);
        *p += f.e * half;
    }
}
