//! Scenario files: TOML with `[bunch]`, `[[external]]`, `[self_field]`,
//! `[integrator]`, `[diagnostics]` and `[experiment]` sections.

use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution as _, StandardNormal, Uniform};
use serde::Deserialize;

use crate::bunch::{Bunch, Vec3};
use crate::constants::{ELECTRON_MASS, ELEMENTARY_CHARGE, PROTON_MASS, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::fields::{ExternalField, SelfFieldConfig, SolverKind};
use crate::integrate::{AmtsConfig, IntegratorConfig, Method, StepControl};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Species {
    #[default]
    Electron,
    Proton,
}

impl Species {
    pub fn mass(self) -> f64 {
        match self {
            Species::Electron => ELECTRON_MASS,
            Species::Proton => PROTON_MASS,
        }
    }

    pub fn charge(self) -> f64 {
        match self {
            Species::Electron => -ELEMENTARY_CHARGE,
            Species::Proton => ELEMENTARY_CHARGE,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(tag = "type", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Distribution {
    /// Gaussian in each coordinate; `momentum_spread` is the rms of `p / (m c)`.
    Gaussian {
        sigma: [f64; 3],
        #[serde(default)]
        momentum_spread: [f64; 3],
    },
    /// Uniformly filled ball with every particle at the reference momentum.
    ColdSphere { radius: f64 },
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BunchSpec {
    pub distribution: Distribution,
    pub particles: usize,
    /// Total charge [C]; its sign must match the species. Zero gives test
    /// particles of the species with the self field switched off.
    pub total_charge: f64,
    /// Kinetic energy of the reference particle [eV], directed along +z.
    #[serde(default)]
    pub kinetic_energy: f64,
    #[serde(default)]
    pub species: Species,
    #[serde(default)]
    pub seed: u64,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ControlSpec {
    #[default]
    MaxAcceleration,
    BeamSize,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MethodName {
    Bb,
    BbStale,
    Mts,
    Amts,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IntegratorSpec {
    pub method: MethodName,
    pub t_end: f64,
    pub h: Option<f64>,
    pub period: Option<usize>,
    pub substeps: Option<usize>,
    pub dt_outer_init: Option<f64>,
    pub dt_inner: Option<f64>,
    pub h_min: Option<f64>,
    pub h_max: Option<f64>,
    #[serde(default)]
    pub control: ControlSpec,
    pub beta: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct DiagnosticsSpec {
    /// Equally spaced rows after the initial one; the last is at `t_end`.
    pub rows: usize,
}

impl Default for DiagnosticsSpec {
    fn default() -> Self {
        DiagnosticsSpec { rows: 10 }
    }
}

#[derive(Clone, Debug, PartialEq, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct ExperimentSpec {
    /// Self-solve budgets of the error-vs-work experiment.
    pub budgets: Vec<usize>,
    /// Outer steps of the error-vs-work reference run.
    pub reference_steps: usize,
    /// Reuse periods of the MTS-vs-stale experiment.
    pub periods: Vec<usize>,
}

impl Default for ExperimentSpec {
    fn default() -> Self {
        ExperimentSpec {
            budgets: vec![25, 50, 100, 200],
            reference_steps: 2000,
            periods: vec![1, 2, 4, 10, 20, 100],
        }
    }
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct ScenarioFile {
    bunch: BunchSpec,
    #[serde(default)]
    external: Vec<ExternalField>,
    #[serde(default)]
    self_field: SelfFieldConfig,
    integrator: IntegratorSpec,
    #[serde(default)]
    diagnostics: DiagnosticsSpec,
    #[serde(default)]
    experiment: ExperimentSpec,
}

/// A validated scenario.
#[derive(Clone, Debug, PartialEq)]
pub struct Scenario {
    pub bunch: BunchSpec,
    pub external: ExternalField,
    pub self_field: SelfFieldConfig,
    pub integrator: IntegratorConfig,
    pub diagnostics: DiagnosticsSpec,
    pub experiment: ExperimentSpec,
}

impl Scenario {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        Self::parse(&text)
    }

    /// Parses and validates a scenario. Errors carry the line of the offending key.
    pub fn parse(text: &str) -> Result<Self> {
        let file: ScenarioFile = toml::from_str(text).map_err(|e| {
            let (line, column) = e
                .span()
                .map(|s| line_column(text, s.start))
                .unwrap_or((0, 0));
            Error::ConfigParse {
                line,
                column,
                message: e.message().to_string(),
            }
        })?;
        let invalid = |section: &str, key: &str, message: String| {
            let (line, column) = locate(text, section, key);
            Error::ConfigParse {
                line,
                column,
                message: format!("{section}.{key}: {message}"),
            }
        };

        validate_bunch(&file.bunch).map_err(|(key, msg)| invalid("bunch", key, msg))?;
        for part in &file.external {
            part.validate().map_err(|msg| invalid("external", "type", msg))?;
        }
        file.self_field
            .validate()
            .map_err(|e| invalid("self_field", "solver", e.to_string()))?;
        let integrator = integrator_config(&file.integrator)
            .map_err(|(key, msg)| invalid("integrator", key, msg))?;
        if file.diagnostics.rows == 0 {
            return Err(invalid("diagnostics", "rows", "must be at least 1".into()));
        }
        let exp = &file.experiment;
        if exp.budgets.contains(&0) {
            return Err(invalid("experiment", "budgets", "budgets must be positive".into()));
        }
        if exp.periods.contains(&0) {
            return Err(invalid("experiment", "periods", "periods must be positive".into()));
        }
        if exp.reference_steps == 0 {
            return Err(invalid("experiment", "reference_steps", "must be positive".into()));
        }

        let self_field = if file.bunch.total_charge == 0.0 {
            SelfFieldConfig {
                solver: SolverKind::Disabled,
                ..file.self_field
            }
        } else {
            file.self_field
        };
        Ok(Scenario {
            bunch: file.bunch,
            external: ExternalField::Superposition { parts: file.external },
            self_field,
            integrator,
            diagnostics: file.diagnostics,
            experiment: file.experiment,
        })
    }

    /// Stop times of the diagnostics rows, excluding the initial row.
    pub fn diagnostic_times(&self) -> Vec<f64> {
        let k = self.diagnostics.rows;
        let t_end = self.integrator.t_end;
        (1..=k).map(|i| t_end * i as f64 / k as f64).collect()
    }

    pub fn initial_bunch(&self) -> Result<Bunch> {
        generate_bunch(&self.bunch)
    }
}

fn line_column(text: &str, offset: usize) -> (usize, usize) {
    let before = &text[..offset.min(text.len())];
    let line = before.matches('\n').count() + 1;
    let column = before.len() - before.rfind('\n').map_or(0, |i| i + 1) + 1;
    (line, column)
}

/// Line and column of `key` inside `[section]`, or of the section header when
/// the key is absent. `(0, 0)` if neither appears.
fn locate(text: &str, section: &str, key: &str) -> (usize, usize) {
    let mut current = String::new();
    let mut header = (0, 0);
    for (i, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.starts_with('[') {
            current = line.trim_matches(|c| c == '[' || c == ']').trim().to_string();
            if current == section && header == (0, 0) {
                header = (i + 1, 1);
            }
            continue;
        }
        let in_section = current == section || current.starts_with(&format!("{section}."));
        if in_section {
            if let Some((k, _)) = line.split_once('=') {
                if k.trim() == key {
                    return (i + 1, raw.find(key).map_or(1, |c| c + 1));
                }
            }
        }
    }
    header
}

type KeyError = (&'static str, String);

fn validate_bunch(b: &BunchSpec) -> std::result::Result<(), KeyError> {
    if b.particles == 0 {
        return Err(("particles", "must be at least 1".into()));
    }
    if !b.total_charge.is_finite() {
        return Err(("total_charge", "must be finite".into()));
    }
    if b.total_charge * b.species.charge() < 0.0 {
        return Err(("total_charge", format!("sign disagrees with species {:?}", b.species)));
    }
    if !(b.kinetic_energy >= 0.0 && b.kinetic_energy.is_finite()) {
        return Err(("kinetic_energy", "must be non-negative".into()));
    }
    match &b.distribution {
        Distribution::Gaussian { sigma, momentum_spread } => {
            if sigma.iter().any(|s| !(*s > 0.0 && s.is_finite())) {
                return Err(("sigma", "all widths must be positive".into()));
            }
            if momentum_spread.iter().any(|s| !(*s >= 0.0 && s.is_finite())) {
                return Err(("momentum_spread", "must be non-negative".into()));
            }
        }
        Distribution::ColdSphere { radius } => {
            if !(*radius > 0.0 && radius.is_finite()) {
                return Err(("radius", "must be positive".into()));
            }
        }
    }
    Ok(())
}

fn integrator_config(s: &IntegratorSpec) -> std::result::Result<IntegratorConfig, KeyError> {
    fn need<T: Copy>(v: Option<T>, key: &'static str) -> std::result::Result<T, KeyError> {
        v.ok_or((key, "required by this method".into()))
    }
    let positive = |v: f64, key: &'static str| {
        if v > 0.0 && v.is_finite() {
            Ok(v)
        } else {
            Err((key, format!("must be positive and finite, got {v}")))
        }
    };
    positive(s.t_end, "t_end")?;
    let method = match s.method {
        MethodName::Bb => Method::Bb { h: positive(need(s.h, "h")?, "h")? },
        MethodName::BbStale => Method::BbStale {
            h: positive(need(s.h, "h")?, "h")?,
            period: need(s.period, "period")?,
        },
        MethodName::Mts => Method::Mts {
            h: positive(need(s.h, "h")?, "h")?,
            substeps: need(s.substeps, "substeps")?,
        },
        MethodName::Amts => {
            let dt_inner = positive(need(s.dt_inner, "dt_inner")?, "dt_inner")?;
            let dt_outer_init = positive(need(s.dt_outer_init, "dt_outer_init")?, "dt_outer_init")?;
            let control = match s.control {
                ControlSpec::MaxAcceleration => StepControl::MaxAcceleration {
                    beta: positive(s.beta.unwrap_or(1.0), "beta")?,
                },
                ControlSpec::BeamSize => StepControl::BeamSize,
            };
            let mut a = AmtsConfig::new(dt_outer_init, dt_inner).with_control(control);
            if let Some(h_min) = s.h_min {
                a.h_min = positive(h_min, "h_min")?;
            }
            if let Some(h_max) = s.h_max {
                a.h_max = positive(h_max, "h_max")?;
            }
            Method::Amts(a)
        }
    };
    let cfg = IntegratorConfig::new(method, s.t_end);
    if let Err(e) = cfg.validate() {
        let msg = e.to_string();
        let key = ["period", "substeps", "h_min", "dt_inner", "beta"]
            .into_iter()
            .find(|k| msg.contains(k))
            .unwrap_or("method");
        return Err((key, msg));
    }
    Ok(cfg)
}

/// Builds the macroparticle bunch of a scenario.
///
/// Each macroparticle carries `Q / N` and a mass keeping the species'
/// charge-to-mass ratio, so trajectories do not depend on `N`. With `Q = 0`
/// the particles are plain members of the species. The bunch is
/// centred on the origin. Samples come from ChaCha8 seeded with `seed`, so the
/// same seed gives the same bunch on every platform.
pub fn generate_bunch(spec: &BunchSpec) -> Result<Bunch> {
    let n = spec.particles;
    let (charge, mass) = if spec.total_charge == 0.0 {
        (spec.species.charge(), spec.species.mass())
    } else {
        let q = spec.total_charge / n as f64;
        (q, spec.species.mass() * (q / spec.species.charge()))
    };
    let mc = mass * SPEED_OF_LIGHT;
    let gamma = 1.0 + spec.kinetic_energy / (spec.species.mass() * SPEED_OF_LIGHT.powi(2) / ELEMENTARY_CHARGE);
    let p0 = Vec3::new(0.0, 0.0, mc * (gamma * gamma - 1.0).sqrt());

    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut normal = || -> f64 { StandardNormal.sample(&mut rng) };
    let (positions, momenta): (Vec<Vec3>, Vec<Vec3>) = match &spec.distribution {
        Distribution::Gaussian { sigma, momentum_spread } => (0..n)
            .map(|_| {
                let x = Vec3::new(sigma[0] * normal(), sigma[1] * normal(), sigma[2] * normal());
                let dp = Vec3::new(
                    momentum_spread[0] * normal(),
                    momentum_spread[1] * normal(),
                    momentum_spread[2] * normal(),
                );
                (x, p0 + dp * mc)
            })
            .unzip(),
        Distribution::ColdSphere { radius } => {
            let unit = Uniform::new_inclusive(-1.0, 1.0).expect("valid range");
            let mut points = Vec::with_capacity(n);
            while points.len() < n {
                let x = Vec3::new(unit.sample(&mut rng), unit.sample(&mut rng), unit.sample(&mut rng));
                if x.norm_squared() <= 1.0 {
                    points.push(x * *radius);
                }
            }
            let momenta = vec![p0; n];
            (points, momenta)
        }
    };
    let mut bunch = Bunch::new(positions, momenta, charge, mass)?;
    let centre = bunch.mean_position();
    for x in &mut bunch.positions {
        *x -= centre;
    }
    Ok(bunch)
}
