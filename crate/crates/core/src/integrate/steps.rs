//! Single outer steps of the four integrators.

use super::push::{drift, kick};
use crate::bunch::Bunch;
use crate::error::Result;
use crate::fields::{ExternalField, FieldSample, SelfFieldResult, SelfFieldSolver};

fn add_fields(external: Vec<FieldSample>, own: &[FieldSample]) -> Vec<FieldSample> {
    external.into_iter().zip(own).map(|(a, b)| a + *b).collect()
}

/// One Boris-Buneman step: half drift, kick with external plus a fresh self
/// field, half drift. Returns the self field used by the kick.
pub fn step_bb(
    h: f64,
    bunch: &mut Bunch,
    external: &ExternalField,
    solver: &mut SelfFieldSolver,
) -> Result<SelfFieldResult> {
    drift(0.5 * h, bunch);
    let own = solver.solve(bunch)?;
    let fields = add_fields(external.sample(bunch), &own.fields);
    kick(h, bunch, &fields);
    drift(0.5 * h, bunch);
    Ok(own)
}

/// Self field refreshed only every `period`-th step and reused in between.
#[derive(Clone, Debug)]
pub struct StaleSelfField {
    period: usize,
    step: usize,
    cached: Option<SelfFieldResult>,
}

impl StaleSelfField {
    pub fn new(period: usize) -> Self {
        assert!(period >= 1, "stale period must be at least 1");
        StaleSelfField {
            period,
            step: 0,
            cached: None,
        }
    }

    pub fn period(&self) -> usize {
        self.period
    }
}

/// Boris-Buneman step that solves for the self field only on steps divisible
/// by the period of `stale` and reuses the cached fields otherwise.
pub fn step_bb_stale(
    h: f64,
    bunch: &mut Bunch,
    external: &ExternalField,
    solver: &mut SelfFieldSolver,
    stale: &mut StaleSelfField,
) -> Result<f64> {
    drift(0.5 * h, bunch);
    if stale.step % stale.period == 0 || stale.cached.is_none() {
        stale.cached = Some(solver.solve(bunch)?);
    }
    stale.step += 1;
    let own = stale.cached.as_ref().expect("filled above");
    let fields = add_fields(external.sample(bunch), &own.fields);
    kick(h, bunch, &fields);
    drift(0.5 * h, bunch);
    Ok(own.max_accel)
}

/// Boris-Buneman step with external fields only.
pub fn step_bb_external(h: f64, bunch: &mut Bunch, external: &ExternalField) {
    drift(0.5 * h, bunch);
    let fields = external.sample(bunch);
    kick(h, bunch, &fields);
    drift(0.5 * h, bunch);
}

/// One MTS outer step: half self kick with `cached`, `substeps` external-only
/// Boris steps of `h / substeps`, a fresh self-field solve, half self kick
/// with it. The fresh solve is returned for the next step's leading kick.
pub fn step_mts(
    h: f64,
    substeps: usize,
    bunch: &mut Bunch,
    external: &ExternalField,
    solver: &mut SelfFieldSolver,
    cached: &SelfFieldResult,
) -> Result<SelfFieldResult> {
    assert!(substeps >= 1, "at least one substep");
    kick(0.5 * h, bunch, &cached.fields);
    let inner = h / substeps as f64;
    for _ in 0..substeps {
        step_bb_external(inner, bunch, external);
    }
    let fresh = solver.solve(bunch)?;
    kick(0.5 * h, bunch, &fresh.fields);
    Ok(fresh)
}
