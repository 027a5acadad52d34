//! The worked examples of the operation contracts, one check per operation.

use amts_core::constants::{ELEMENTARY_CHARGE, SPEED_OF_LIGHT};
use amts_core::diagnostics::{mean_kinetic_energy, rms_emittance, Axis};
use amts_core::fields::{solve_self_field, ExternalField, FieldSample, SelfFieldConfig, SelfFieldResult, SelfFieldSolver};
use amts_core::harness::{
    experiment_error_vs_work, experiment_mts_vs_stale, run_scenario, Scenario, WorkMethod,
};
use amts_core::integrate::{
    drift, g_function, integrate, kick, run_amts, step_bb, step_bb_external, step_bb_stale, step_mts,
    substeps_for, AmtsConfig, IntegratorConfig, Method, StaleSelfField, StepControl, ACCEL_FLOOR,
};
use amts_core::model1d::{
    adaptive_verlet, beta_sweep, exact_solution, incoming_start, invert_time, time_from_lowest,
    update_lambda, velocity_at, x_lowest, SundmanG1D, SweepConfig,
};
use amts_core::{acceleration, lorentz_gamma, Bunch, Vec3};
use nalgebra::{Rotation3, Vector3};

use super::support::*;

type R = Result<(), String>;

fn gamma() -> R {
    close("gamma(0)", lorentz_gamma(&Vec3::zeros(), MASS), 1.0, 0.0)?;
    close("gamma(mc)", lorentz_gamma(&Vec3::new(MC, 0.0, 0.0), MASS), 2f64.sqrt(), 1e-15)?;
    close("gamma(3mc)", lorentz_gamma(&Vec3::new(0.0, 3.0 * MC, 0.0), MASS), 10f64.sqrt(), 1e-15)
}

fn emittance() -> R {
    let xs: Vec<Vec3> = (0..7).map(|i| Vec3::new(1e-3 * i as f64, -2e-4 * i as f64, 0.0)).collect();
    let cold = particles(xs.clone(), vec![Vec3::new(0.1 * MC, 0.0, 0.3 * MC); 7], Q);
    for axis in Axis::ALL {
        close("cold emittance", rms_emittance(&cold, axis).unwrap(), 0.0, 0.0)?;
    }
    let k = 40.0 * MC;
    let correlated = particles(xs.clone(), xs.iter().map(|x| x * k).collect(), Q);
    // sqrt(<uu><pp>) / mc sets the scale of a rounding-level determinant
    let scale = 1e-3 * 2f64.sqrt() * 40.0 * 1e-3;
    close("correlated emittance", rms_emittance(&correlated, Axis::X).unwrap() / scale, 0.0, 1e-6)?;
    let (a, b) = (2e-3, 3e-2);
    let four = Bunch::new(
        vec![Vec3::new(a, 0.0, 0.0), Vec3::new(-a, 0.0, 0.0), Vec3::zeros(), Vec3::zeros()],
        vec![Vec3::zeros(), Vec3::zeros(), Vec3::new(b, 0.0, 0.0), Vec3::new(-b, 0.0, 0.0)],
        1.0,
        1.0 / SPEED_OF_LIGHT,
    )
    .unwrap();
    close("four-point emittance", rms_emittance(&four, Axis::X).unwrap(), a * b / 2.0, 1e-14)
}

fn kinetic_energy() -> R {
    let rest_ev = MASS * SPEED_OF_LIGHT * SPEED_OF_LIGHT / ELEMENTARY_CHARGE;
    let at_rest = particles(vec![Vec3::zeros(); 3], vec![Vec3::zeros(); 3], Q);
    close("energy at rest", mean_kinetic_energy(&at_rest), 0.0, 0.0)?;
    let two = single(Vec3::zeros(), Vec3::new(0.0, 0.0, 3f64.sqrt() * MC), Q);
    close("gamma 2", mean_kinetic_energy(&two), rest_ev, 1e-12)?;
    let pair = particles(
        vec![Vec3::zeros(); 2],
        vec![Vec3::zeros(), Vec3::new(8f64.sqrt() * MC, 0.0, 0.0)],
        Q,
    );
    close("gamma 1 and 3", mean_kinetic_energy(&pair), rest_ev, 1e-12)
}

fn external_fields() -> R {
    let x = Vec3::new(1e-3, -2e-3, 0.01);
    let b0 = [0.1, -0.2, 0.3];
    let s = ExternalField::UniformB { b: b0 }.eval(&x, 3e-9);
    ensure(s.e == Vec3::zeros() && s.b == Vec3::from(b0), || format!("uniform B gave {s:?}"))?;
    let gap = ExternalField::RfGap {
        center: 0.0,
        gradient: 1e6,
        omega: 1e9,
        phase: std::f64::consts::FRAC_PI_2,
        length: 0.1,
    };
    let on_axis = gap.eval(&Vec3::new(0.0, 0.0, 0.01), 0.0);
    close("gap at zero crossing", on_axis.e.z / 1e6, 0.0, 1e-15)?;
    let e0 = [1e3, -2e3, 5e2];
    let sum = ExternalField::Superposition {
        parts: vec![ExternalField::UniformE { e: e0 }, ExternalField::UniformE { e: e0 }],
    };
    let s = sum.eval(&x, 0.0);
    ensure(s.e == Vec3::from(e0) * 2.0, || format!("superposition gave {:?}", s.e))
}

fn self_field() -> R {
    for cfg in [SelfFieldConfig::direct_sum(1e-6), SelfFieldConfig::mesh_pic([16; 3])] {
        let one = single(Vec3::new(1e-3, 0.0, 0.0), Vec3::new(0.0, 0.0, MC), Q);
        let r = solve_self_field(&one, &cfg).unwrap();
        ensure(r.e(0) == Vec3::zeros() && r.b(0) == Vec3::zeros() && r.max_accel == 0.0, || {
            format!("single particle field {:?}", r.fields)
        })?;
    }
    let d = 1e-2;
    let q = -1e-12;
    let pair = particles(
        vec![Vec3::new(-0.5 * d, 0.0, 0.0), Vec3::new(0.5 * d, 0.0, 0.0)],
        vec![Vec3::zeros(); 2],
        q,
    );
    let r = solve_self_field(&pair, &SelfFieldConfig::direct_sum(d / 100.0)).unwrap();
    let coulomb = q.abs() / (4.0 * std::f64::consts::PI * amts_core::constants::EPSILON_0 * d * d);
    // like charges push apart: the field on the right charge points along q * x
    close("pair field magnitude", r.e(1).norm(), coulomb, 0.01)?;
    ensure(r.e(1).x * q > 0.0 && r.e(0).x * q < 0.0, || "pair field not repulsive".into())?;
    let ball = amts_core::harness::generate_bunch(&amts_core::harness::BunchSpec {
        distribution: amts_core::harness::Distribution::Gaussian {
            sigma: [1e-3; 3],
            momentum_spread: [0.0; 3],
        },
        particles: 2000,
        total_charge: -1e-10,
        kinetic_energy: 0.0,
        species: amts_core::harness::Species::Electron,
        seed: 11,
    })
    .unwrap();
    let r = solve_self_field(&ball, &SelfFieldConfig::direct_sum(1e-4)).unwrap();
    let n = ball.len() as f64;
    let mean = r.fields.iter().map(|f| f.e).sum::<Vec3>() / n;
    let rms = (r.fields.iter().map(|f| f.e.norm_squared()).sum::<f64>() / n).sqrt();
    ensure(mean.norm() <= 0.01 * rms, || format!("mean field {} vs rms {rms}", mean.norm()))
}

fn accelerations() -> R {
    let f = Vec3::new(1e-15, -2e-15, 3e-15);
    let a = acceleration(&Vec3::zeros(), &f, MASS);
    close("a at rest", (a - f / MASS).norm(), 0.0, 1e-15 * (f / MASS).norm())?;
    let p = Vec3::new(0.0, 0.0, 2.0 * MC);
    let perp = Vec3::new(1e-15, 2e-15, 0.0);
    let g = lorentz_gamma(&p, MASS);
    close("transverse", (acceleration(&p, &perp, MASS) - perp / (MASS * g)).norm(), 0.0, 1e-15 * (perp / MASS).norm())?;
    let p = Vec3::new(MC, 0.0, 0.0);
    let par = Vec3::new(4e-15, 0.0, 0.0);
    close("longitudinal", acceleration(&p, &par, MASS).norm(), par.norm() / (MASS * 2.0 * 2f64.sqrt()), 1e-14)
}

fn drifts() -> R {
    let mut b = particles(vec![Vec3::new(1.0, 2.0, 3.0); 2], vec![Vec3::zeros(); 2], Q);
    let start = b.clone();
    drift(1e-9, &mut b);
    ensure(b.positions == start.positions && b.time == 1e-9, || "rest drift moved".into())?;
    let mut b = particles(
        vec![Vec3::new(1e-3, -2e-3, 0.5), Vec3::new(0.0, 1e-2, 0.0)],
        vec![Vec3::new(0.3 * MC, 0.0, 2.0 * MC), Vec3::new(-MC, 0.5 * MC, 0.0)],
        Q,
    );
    let start = b.clone();
    drift(2e-9, &mut b);
    drift(-2e-9, &mut b);
    for (x, x0) in b.positions.iter().zip(&start.positions) {
        close("reversed drift", (x - x0).norm() / x0.norm(), 0.0, 1e-15)?;
    }
    let mut b = single(Vec3::zeros(), Vec3::new(MC, 0.0, 0.0), Q);
    drift(1.0, &mut b);
    close("drift at p = mc", b.positions[0].x, SPEED_OF_LIGHT / 2f64.sqrt(), 1e-15)?;
    close("drift at p = mc (y, z)", b.positions[0].yz().norm(), 0.0, 0.0)
}

fn kicks() -> R {
    let e = Vec3::new(1e5, -3e4, 2e5);
    let p0 = Vec3::new(0.1 * MC, 0.2 * MC, 0.0);
    let mut b = single(Vec3::zeros(), p0, Q);
    kick(1e-11, &mut b, &[FieldSample::new(e, Vec3::zeros())]);
    let expect = p0 + e * (1e-11 * Q);
    close("electric kick", (b.momenta[0] - expect).norm() / expect.norm(), 0.0, 1e-15)?;

    let mut b = single(Vec3::zeros(), Vec3::new(0.3 * MC, -0.4 * MC, 1.2 * MC), Q);
    let field = [FieldSample::new(Vec3::zeros(), Vec3::new(0.3, -1.0, 2.0))];
    let norm0 = b.momenta[0].norm();
    for _ in 0..1000 {
        kick(1e-11, &mut b, &field);
    }
    close("|p| under magnetic kicks", b.momenta[0].norm(), norm0, 1e-13)?;

    let (bz, h) = (0.5, 2e-11);
    let p0 = Vec3::new(1.5 * MC, 0.0, 0.0);
    let mut b = single(Vec3::zeros(), p0, Q);
    let gamma = b.gamma(0);
    kick(h, &mut b, &[FieldSample::new(Vec3::zeros(), Vec3::new(0.0, 0.0, bz))]);
    let theta = 2.0 * (h * Q * bz / (2.0 * MASS * gamma)).atan();
    let rot = Rotation3::from_axis_angle(&Vector3::z_axis(), -theta);
    close("Boris rotation", (b.momenta[0] - rot * p0).norm() / p0.norm(), 0.0, 1e-14)
}

fn bb_steps() -> R {
    // gyration: radius p_perp / |qB| and second-order closure after one period
    let (start, _) = gyro_start();
    let radius = start.momenta[0].x / (Q * GYRO_B).abs();
    let centre = Vec3::new(0.0, -radius * Q.signum(), 0.0);
    let (mut b, omega) = gyro_start();
    let ext = ExternalField::UniformB { b: [0.0, 0.0, GYRO_B] };
    let h = 2.0 * std::f64::consts::PI / omega.abs() / 400.0;
    let mut worst: f64 = 0.0;
    for _ in 0..400 {
        step_bb_external(h, &mut b, &ext);
        worst = worst.max(((b.positions[0] - centre).xy().norm() - radius).abs() / radius);
    }
    ensure(worst < 1e-4, || format!("orbit radius deviates by {worst:e}"))?;
    let (_, c1) = gyro_errors(200);
    let (_, c2) = gyro_errors(400);
    ensure((3.5..4.5).contains(&(c1 / c2)), || format!("closure ratio {}", c1 / c2))?;
    let (e1, _) = gyro_errors(200);
    let (e2, _) = gyro_errors(400);
    ensure((3.6..4.4).contains(&(e1 / e2)), || format!("max error ratio {}", e1 / e2))?;

    // no fields: a drift
    let mut b = particles(
        vec![Vec3::new(1e-3, 0.0, 0.0), Vec3::new(0.0, 2e-3, 0.0)],
        vec![Vec3::new(0.1 * MC, 0.0, 0.3 * MC), Vec3::new(0.0, -0.2 * MC, 0.0)],
        0.0,
    );
    let mut d = b.clone();
    let mut solver = SelfFieldSolver::new(SelfFieldConfig::disabled()).unwrap();
    step_bb(1e-11, &mut b, &ExternalField::none(), &mut solver).unwrap();
    drift(1e-11, &mut d);
    ensure(b.momenta == d.momenta, || "momenta changed".into())?;
    for (x, y) in b.positions.iter().zip(&d.positions) {
        close("bb vs drift", (x - y).norm(), 0.0, 1e-18)?;
    }
    Ok(())
}

fn pair(charge: f64) -> Bunch {
    particles(
        vec![Vec3::new(-5e-4, 0.0, 0.0), Vec3::new(5e-4, 0.0, 0.0)],
        vec![Vec3::new(0.0, 1e-25, 0.0), Vec3::zeros()],
        charge,
    )
}

fn direct() -> SelfFieldSolver {
    SelfFieldSolver::new(SelfFieldConfig::direct_sum(1e-7)).unwrap()
}

fn stale_steps() -> R {
    let ext = ExternalField::Solenoid { axis: [0.0, 0.0, 1.0], strength: 0.05 };
    let run = |charge: f64, n: usize, steps: usize, h: f64, ext: &ExternalField| {
        let mut b = pair(charge);
        let mut s = direct();
        let mut stale = StaleSelfField::new(n);
        for _ in 0..steps {
            step_bb_stale(h, &mut b, ext, &mut s, &mut stale).unwrap();
        }
        b
    };
    let mut plain = pair(Q * 1e4);
    let mut s = direct();
    for _ in 0..50 {
        step_bb(1e-12, &mut plain, &ext, &mut s).unwrap();
    }
    ensure(run(Q * 1e4, 1, 50, 1e-12, &ext) == plain, || "period 1 differs from BB".into())?;
    ensure(run(0.0, 1, 30, 1e-12, &ext) == run(0.0, 5, 30, 1e-12, &ext), || {
        "period matters without charge".into()
    })?;
    let none = ExternalField::none();
    let fresh = run(Q * 1e5, 1, 40, 2e-11, &none).momenta[1].x;
    let reused = run(Q * 1e5, 2, 40, 2e-11, &none).momenta[1].x;
    ensure(reused > fresh && fresh > 0.0, || format!("stale {reused:e} vs fresh {fresh:e}"))
}

/// Largest position and momentum differences of two bunches relative to the largest magnitudes.
pub fn relative_difference(a: &Bunch, b: &Bunch) -> (f64, f64) {
    let span = |v: &[Vec3]| v.iter().map(|x| x.norm()).fold(0.0, f64::max);
    let diff = |u: &[Vec3], v: &[Vec3]| u.iter().zip(v).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max);
    (
        diff(&a.positions, &b.positions) / span(&a.positions),
        diff(&a.momenta, &b.momenta) / span(&a.momenta),
    )
}

/// Runs `steps` MTS steps with `m` substeps on a 64-particle bunch without external fields.
pub fn mts_free_run(m: usize, steps: usize) -> Bunch {
    let mut b = amts_core::harness::generate_bunch(&amts_core::harness::BunchSpec {
        distribution: amts_core::harness::Distribution::Gaussian {
            sigma: [1e-3, 1e-3, 2e-3],
            momentum_spread: [1e-3; 3],
        },
        particles: 64,
        total_charge: -1e-11,
        kinetic_energy: 1000.0,
        species: amts_core::harness::Species::Electron,
        seed: 4,
    })
    .unwrap();
    let mut s = SelfFieldSolver::new(SelfFieldConfig::direct_sum(1e-5)).unwrap();
    let h = 1e-11;
    let cfg = IntegratorConfig::new(Method::Mts { h, substeps: m }, steps as f64 * h);
    integrate(&mut b, &ExternalField::none(), &mut s, &cfg, &[], |_, _| Ok(())).unwrap();
    b
}

fn mts_steps() -> R {
    let (dx, dp) = relative_difference(&mts_free_run(1, 20), &mts_free_run(8, 20));
    ensure(dx < 1e-12 && dp < 1e-12, || format!("m = 1 vs 8: {dx:e}, {dp:e}"))?;

    // m = 1 with uniform electric fields: O(h^3) local difference from BB
    let e_ext = Vec3::new(0.0, 3e6, 0.0);
    let e_self = FieldSample::new(Vec3::new(2e6, 0.0, 0.0), Vec3::zeros());
    let ext = ExternalField::UniformE { e: e_ext.into() };
    let local = |h: f64| {
        let start = single(Vec3::zeros(), Vec3::new(0.0, 0.0, 0.5 * MC), Q);
        let mut bb = start.clone();
        drift(0.5 * h, &mut bb);
        kick(h, &mut bb, &[FieldSample::new(e_ext + e_self.e, Vec3::zeros())]);
        drift(0.5 * h, &mut bb);
        let mut mts = start;
        let cached = SelfFieldResult { fields: vec![e_self], max_accel: 0.0 };
        kick(0.5 * h, &mut mts, &cached.fields);
        step_bb_external(h, &mut mts, &ext);
        kick(0.5 * h, &mut mts, &cached.fields);
        (bb.positions[0] - mts.positions[0]).norm()
    };
    let ratio = local(1e-12) / local(0.5e-12);
    ensure((6.0..10.0).contains(&ratio), || format!("local error ratio {ratio}"))?;

    // no charge: MTS is BB on the external field with step h / m
    let ext = ExternalField::UniformB { b: [0.0, 0.0, 0.2] };
    let mut a = pair(Q);
    let mut b = a.clone();
    let mut s = SelfFieldSolver::new(SelfFieldConfig::disabled()).unwrap();
    let mut cached = s.solve(&a).unwrap();
    for _ in 0..10 {
        cached = step_mts(1e-12, 4, &mut a, &ext, &mut s, &cached).unwrap();
        for _ in 0..4 {
            step_bb_external(0.25e-12, &mut b, &ext);
        }
    }
    ensure(a.momenta == b.momenta, || "momenta differ".into())?;
    for (x, y) in a.positions.iter().zip(&b.positions) {
        close("mts vs substep bb", (x - y).norm(), 0.0, 1e-18)?;
    }
    Ok(())
}

fn step_factor() -> R {
    close("g(4)", g_function(4.0, 1.0), 0.5, 0.0)?;
    close("g(a), beta 2", g_function(3.7e14, 2.0) * 3.7e14, 1.0, 1e-15)?;
    let one = single(Vec3::zeros(), Vec3::zeros(), Q);
    let mut s = direct();
    let r = s.solve(&one).unwrap();
    for beta in [0.5, 1.0, 1.5] {
        let lambda = StepControl::MaxAcceleration { beta }.factor(&one, &r);
        close("floored factor", lambda, ACCEL_FLOOR.powf(-beta / 2.0), 1e-15)?;
    }
    Ok(())
}

fn adaptive_runs() -> R {
    // no charge: constant outer step and substep count
    let b = particles(
        vec![Vec3::zeros(), Vec3::new(1e-3, 0.0, 0.0)],
        vec![Vec3::new(0.1 * MC, 0.0, 0.0), Vec3::new(0.0, 0.1 * MC, 0.0)],
        Q,
    );
    let ext = ExternalField::UniformB { b: [0.0, 0.0, 0.1] };
    let cfg = IntegratorConfig::new(Method::Amts(AmtsConfig::new(1.3e-12, 5e-13)), 1.3e-10);
    let (_, trace) = run_amts(b, &ext, &SelfFieldConfig::disabled(), &cfg).unwrap();
    ensure(trace.records.len() == 100, || format!("{} steps", trace.records.len()))?;
    for r in &trace.records[..99] {
        close("constant h", r.h, 1.3e-12, 1e-12)?;
        ensure(r.m == 3, || format!("m = {}", r.m))?;
    }
    ensure(substeps_for(1.3e-12, 5e-13) == 3, || "rounding".into())?;
    close("inner step", 1.3e-12 / 3.0, 4.33e-13, 1e-3)?;

    // expanding cold sphere: falling max_accel, growing h
    let text = r#"
[bunch]
particles = 200
total_charge = -5e-11
seed = 9
[bunch.distribution]
type = "cold-sphere"
radius = 1e-3
[self_field]
softening = 1e-4
[integrator]
method = "amts"
t_end = 2e-9
dt_outer_init = 2e-12
dt_inner = 1e-13
[diagnostics]
rows = 1
"#;
    let s = Scenario::parse(text).unwrap();
    let out = run_scenario(&s).unwrap();
    let free: Vec<_> = out.trace.records.iter().filter(|r| !r.clamped).collect();
    for w in free.windows(2) {
        if w[1].max_accel < w[0].max_accel {
            ensure(w[1].h > w[0].h, || format!("h fell at step {}", w[1].step))?;
        }
    }
    for w in free.windows(2).filter(|w| w[0].step >= 5) {
        ensure(w[1].h > w[0].h, || format!("h not increasing at step {}", w[1].step))?;
    }
    Ok(())
}

fn model_oracle() -> R {
    close("x_L at rest", x_lowest(1.0, 0.0).unwrap(), 1.0, 0.0)?;
    close("x_L for H = 1", x_lowest(2.0, -1.0).unwrap(), 1.0, 1e-15)?;
    close("x_L for H = 100", x_lowest(0.02, -10.0).unwrap(), 0.01, 1e-14)?;
    close("V(x_L)", velocity_at(0.3, 0.3).unwrap(), 0.0, 0.0)?;
    close("V(inf)", velocity_at(1e12, 1.0).unwrap(), 2f64.sqrt(), 1e-9)?;
    close("V(2)", velocity_at(2.0, 1.0).unwrap(), 1.0, 1e-15)?;
    close("T(x_L)", time_from_lowest(0.7, 0.7).unwrap(), 0.0, 0.0)?;
    for x_l in [0.01, 0.3, 1.0, 5.0] {
        let (a, b) = (time_from_lowest(1.5 * x_l, x_l).unwrap(), time_from_lowest(2.0 * x_l, x_l).unwrap());
        ensure(a < b, || format!("T not increasing at x_L = {x_l}"))?;
    }
    close("T(2; 1)", time_from_lowest(2.0, 1.0).unwrap(), 1.623_225_240_140_230_5, 1e-14)?;
    close("inverse at 0", invert_time(0.0, 0.4).unwrap(), 0.4, 0.0)?;
    close("inverse of T(2)", invert_time(1.623_225_240_140_230_5, 1.0).unwrap(), 2.0, 1e-12)?;

    let (x0, v0) = (3.0, -0.4);
    let x_l = x_lowest(x0, v0).unwrap();
    let t_l = time_from_lowest(x0, x_l).unwrap();
    let at = exact_solution(x0, v0, t_l).unwrap();
    close("turning point x", at.x, x_l, 1e-12)?;
    close("turning point v", at.v, 0.0, 1e-6)?;
    for s in [0.1, 1.0, 7.5] {
        let (a, b) = (exact_solution(x0, v0, t_l + s).unwrap(), exact_solution(x0, v0, t_l - s).unwrap());
        close("time symmetry", a.x, b.x, 1e-12)?;
    }
    for energy in [1.0, 10.0, 100.0] {
        let (x0, v0) = incoming_start(energy, 10.0).unwrap();
        let s = exact_solution(x0, v0, 10.0).unwrap();
        close("v(10)", s.v / energy.sqrt(), 0.0, 1e-5)?;
    }
    Ok(())
}

fn model_integrator() -> R {
    let err = |dt: f64| {
        let out = adaptive_verlet(2.0, -1.0, 4.0, SundmanG1D::new(0.0), dt).unwrap();
        let exact = exact_solution(2.0, -1.0, out.state.t).unwrap();
        (out.state.x - exact.x).abs().max((out.state.v - exact.v).abs())
    };
    let (e1, e2, e3) = (err(0.02), err(0.01), err(0.005));
    for slope in [(e1 / e2).log2(), (e2 / e3).log2()] {
        ensure((1.9..=2.1).contains(&slope), || format!("fixed-step slope {slope}"))?;
    }
    for lambda in [0.1, 1.0, 3.7] {
        close("lambda fixed point", update_lambda(lambda, lambda), lambda, 1e-15)?;
    }
    let cfg = SweepConfig {
        energies: vec![1.0],
        betas: vec![0.0, 1.0],
        ..SweepConfig::default()
    };
    let rows = beta_sweep(&cfg).unwrap();
    let (e0, e1) = (rows[0].err_max.unwrap(), rows[1].err_max.unwrap());
    ensure(e1 < e0, || format!("H = 1: beta 1 {e1:e} vs beta 0 {e0:e}"))?;

    // beta = 0 sweep entry is plain fixed-step Verlet
    let (x0, v0) = incoming_start(1.0, 10.0).unwrap();
    let fixed = adaptive_verlet(x0, v0, 20.0, SundmanG1D::new(0.0), rows[0].dt0.unwrap()).unwrap();
    let exact = exact_solution(x0, v0, fixed.state.t).unwrap();
    close("beta 0 entry", rows[0].err_x.unwrap(), ((fixed.state.x - exact.x) / exact.x).abs(), 0.0)
}

fn scenario_runs() -> R {
    let gyro = r#"
[bunch]
particles = 30
total_charge = 0.0
kinetic_energy = 20000.0
seed = 5
[bunch.distribution]
type = "gaussian"
sigma = [1e-3, 1e-3, 1e-3]
momentum_spread = [5e-2, 5e-2, 5e-2]
[[external]]
type = "uniform-b"
b = [0.0, 0.0, 0.2]
[integrator]
method = "bb"
t_end = 5e-9
h = 2e-12
[diagnostics]
rows = 20
"#;
    let s = Scenario::parse(gyro).unwrap();
    let out = run_scenario(&s).unwrap();
    let e0 = out.diagnostics[0].mean_energy_ev;
    for row in &out.diagnostics {
        close("energy in magnetic field", row.mean_energy_ev, e0, 1e-9)?;
    }
    let dirs = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    out.write(dirs.0.path()).unwrap();
    run_scenario(&s).unwrap().write(dirs.1.path()).unwrap();
    for f in ["diagnostics.csv", "trace.csv"] {
        let (a, b) = (std::fs::read(dirs.0.path().join(f)).unwrap(), std::fs::read(dirs.1.path().join(f)).unwrap());
        ensure(a == b, || format!("{f} differs between runs"))?;
    }
    Ok(())
}

fn experiment_references() -> R {
    let text = r#"
[bunch]
particles = 32
total_charge = -1e-12
kinetic_energy = 1000.0
seed = 3
[bunch.distribution]
type = "gaussian"
sigma = [1e-3, 1e-3, 1e-3]
momentum_spread = [1e-3, 1e-3, 0.0]
[[external]]
type = "uniform-b"
b = [0.0, 0.0, 0.01]
[self_field]
softening = 1e-4
[integrator]
method = "mts"
t_end = 2e-9
h = 5e-11
substeps = 1
[diagnostics]
rows = 4
[experiment]
budgets = [40]
reference_steps = 40
periods = [1, 2]
"#;
    let s = Scenario::parse(text).unwrap();
    let work = experiment_error_vs_work(&s, &[WorkMethod::Mts]).unwrap();
    let row = work.find("mts", 40).unwrap();
    close("work point equal to reference", row.rel_error, 0.0, 0.0)?;
    let stale = experiment_mts_vs_stale(&s).unwrap();
    close("m = 1 row", stale.find("mts", 1).unwrap().rel_error, 0.0, 0.0)
}

/// Every worked example; returns the number of checks that passed.
pub fn run_all() -> Result<usize, String> {
    let checks: [(&str, fn() -> R); 17] = [
        ("lorentz_gamma", gamma),
        ("rms_emittance", emittance),
        ("mean_kinetic_energy", kinetic_energy),
        ("external fields", external_fields),
        ("self field", self_field),
        ("acceleration", accelerations),
        ("drift", drifts),
        ("kick", kicks),
        ("step_bb", bb_steps),
        ("step_bb_stale", stale_steps),
        ("step_mts", mts_steps),
        ("g_function", step_factor),
        ("run_amts", adaptive_runs),
        ("1D oracle", model_oracle),
        ("adaptive Verlet and sweep", model_integrator),
        ("run_scenario", scenario_runs),
        ("experiment references", experiment_references),
    ];
    let mut failures = Vec::new();
    for (name, check) in checks {
        let result = check();
        let line = match &result {
            Ok(()) => format!("    ok   {name}"),
            Err(e) => format!("    FAIL {name}: {e}"),
        };
        let _ = std::io::Write::write_all(&mut std::io::stderr(), format!("{line}\n").as_bytes());
        if let Err(e) = result {
            failures.push(format!("{name}: {e}"));
        }
    }
    if failures.is_empty() {
        Ok(checks.len())
    } else {
        Err(failures.join("; "))
    }
}
