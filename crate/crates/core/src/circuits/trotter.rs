use std::f64::consts::PI;

use super::{simulate_in_place, Circuit, Gate, GateKind};
use crate::error::{Result, SimError};
use crate::model::{bonds, CouplingParams, PhasePreset};
use crate::statevector::{Bitstring, State};

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Schedule {
    pub t_total: f64,
    pub dt: f64,
    pub n_steps: usize,
}

impl Schedule {
    pub fn new(t_total: f64, dt: f64) -> Result<Self> {
        if !(t_total > 0.0 && dt > 0.0) || !t_total.is_finite() || !dt.is_finite() {
            return Err(SimError::Schedule(format!(
                "need T > 0 and dt > 0, got T={t_total}, dt={dt}"
            )));
        }
        let n = (t_total / dt).round();
        if n < 1.0 || (n * dt - t_total).abs() > 1e-12 {
            return Err(SimError::Schedule(format!(
                "dt={dt} does not divide T={t_total}"
            )));
        }
        Ok(Self {
            t_total,
            dt,
            n_steps: n as usize,
        })
    }

    pub fn of(preset: &PhasePreset) -> Result<Self> {
        Self::new(preset.t_total, preset.dt)
    }

    /// Interpolation parameter sampled by step `m` (midpoint rule).
    pub fn s_mid(&self, m: usize) -> f64 {
        (m as f64 + 0.5) / self.n_steps as f64
    }

    /// Value of `s` after `m` complete steps.
    pub fn s_boundary(&self, m: usize) -> f64 {
        m as f64 / self.n_steps as f64
    }

    /// `s` at every step boundary, `0` through `1`.
    pub fn boundaries(&self) -> Vec<f64> {
        (0..=self.n_steps).map(|m| self.s_boundary(m)).collect()
    }
}

/// First-order step approximating `exp(-i H(s) dt)`: hopping gates on
/// even->odd bonds, odd->even bonds and next-nearest pairs, then one Z
/// rotation per site. Zero-angle hopping gates are left out.
pub fn trotter_step(params: &CouplingParams, s: f64, dt: f64, n_sites: usize) -> Result<Circuit> {
    if !(0.0..=1.0).contains(&s) {
        return Err(SimError::Schedule(format!(
            "interpolation parameter s={s} outside [0, 1]"
        )));
    }
    if n_sites < 3 {
        return Err(SimError::Config(format!(
            "need at least 3 sites, got {n_sites}"
        )));
    }
    params.validate()?;
    let (even, odd, nnn) = bonds(n_sites);
    let mut c = Circuit::new(n_sites);
    let families = [(even, params.j1p), (odd, params.j1), (nnn, params.j2)];
    for (list, coupling) in families {
        let alpha = 2.0 * s * coupling * dt;
        if alpha == 0.0 {
            continue;
        }
        for (a, b) in list {
            c.push(Gate::two(GateKind::Hopping(alpha), a, b))?;
        }
    }
    for k in 0..n_sites {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        let lambda = -2.0 * (1.0 - s) * params.bz * sign * dt;
        c.push(Gate::one(GateKind::Rz(lambda), k))?;
    }
    Ok(c)
}

/// X rotations by pi on odd sites, taking `|00...0>` to the alternating state.
pub fn neel_preparation(n_sites: usize) -> Result<Circuit> {
    let mut c = Circuit::new(n_sites);
    for k in (1..n_sites).step_by(2) {
        c.push(Gate::one(GateKind::Rx(PI), k))?;
    }
    Ok(c)
}

/// Preparation layer followed by the first `upto_step` Trotter steps.
pub fn asp_circuit_with(
    params: &CouplingParams,
    schedule: &Schedule,
    n_sites: usize,
    upto_step: usize,
) -> Result<Circuit> {
    if upto_step > schedule.n_steps {
        return Err(SimError::Schedule(format!(
            "step {upto_step} beyond the {}-step schedule",
            schedule.n_steps
        )));
    }
    let mut c = neel_preparation(n_sites)?;
    for m in 0..upto_step {
        c.extend(&trotter_step(
            params,
            schedule.s_mid(m),
            schedule.dt,
            n_sites,
        )?)?;
    }
    Ok(c)
}

pub fn asp_circuit(preset: &PhasePreset, n_sites: usize, upto_step: usize) -> Result<Circuit> {
    asp_circuit_with(&preset.params, &Schedule::of(preset)?, n_sites, upto_step)
}

/// Logical-circuit states at every step boundary, starting from `|00...0>`.
/// Entry 0 is the alternating state.
pub fn asp_states(
    params: &CouplingParams,
    schedule: &Schedule,
    n_sites: usize,
) -> Result<Vec<State>> {
    let mut state = State::basis(n_sites, &Bitstring::new(vec![0; n_sites])?)?;
    simulate_in_place(&neel_preparation(n_sites)?, &mut state)?;
    let mut out = Vec::with_capacity(schedule.n_steps + 1);
    out.push(state.clone());
    for m in 0..schedule.n_steps {
        simulate_in_place(
            &trotter_step(params, schedule.s_mid(m), schedule.dt, n_sites)?,
            &mut state,
        )?;
        out.push(state.clone());
    }
    Ok(out)
}
