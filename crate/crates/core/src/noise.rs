//! Coherent errors on the native entangler and the two phase-mitigation rewrites.

use rayon::prelude::*;

use crate::circuits::{
    cphase_native, decompose_to_native, general_nc, neel_preparation, simulate_in_place,
    trotter_step, Circuit, Gate, GateKind, Schedule, Sites,
};
use crate::error::{Result, SimError};
use crate::model::CouplingParams;
use crate::observables::{string_order_exact, StringOrderSpec};
use crate::statevector::{mat, Bitstring, Mat4, State};

pub use crate::circuits::NoiseParams;

/// The hardware entangler for the given parameters: the conjugate transpose of
/// the general number-conserving gate.
pub fn noisy_native_gate(np: &NoiseParams) -> Mat4 {
    mat::dagger(&general_nc(np))
}

fn require_native(c: &Circuit) -> Result<()> {
    if let Some(g) = c
        .gates()
        .iter()
        .find(|g| !(matches!(g.kind, GateKind::PhasedXZ { .. }) || g.kind.is_native_two_qubit()))
    {
        return Err(SimError::UnsupportedGate(format!(
            "{} in a circuit expected to be native",
            g.kind.name()
        )));
    }
    Ok(())
}

/// Replace every ideal entangler with the noisy one. Gates that are already
/// noisy and single-qubit gates are kept as they are.
pub fn inject_noise(c: &Circuit, np: &NoiseParams) -> Result<Circuit> {
    require_native(c)?;
    let gates = c
        .gates()
        .iter()
        .map(|g| match g.kind {
            GateKind::SqrtISwapDagger => Gate {
                kind: GateKind::GeneralNCDagger(*np),
                sites: g.sites,
            },
            _ => *g,
        })
        .collect();
    Circuit::from_gates(c.n_sites(), gates)
}

/// After every native entangler, append `CPhase(-phi_est)` built from two ideal
/// entanglers and single-qubit rotations. Triples the two-qubit gate count.
pub fn compensate_cphase(c: &Circuit, phi_est: f64) -> Result<Circuit> {
    require_native(c)?;
    let mut out = Circuit::new(c.n_sites());
    for g in c.gates() {
        out.push(*g)?;
        if let (true, Sites::Two(a, b)) = (g.kind.is_native_two_qubit(), g.sites) {
            for h in cphase_native(-phi_est, a, b, GateKind::SqrtISwapDagger) {
                out.push(h)?;
            }
        }
    }
    Ok(out)
}

/// Before every native entangler, rotate both of its sites by `Z^t` with
/// `t = -phi_est / (2 pi)`, i.e. a Z rotation by `-phi_est / 2`.
pub fn split_phase_z(c: &Circuit, phi_est: f64) -> Result<Circuit> {
    require_native(c)?;
    let t = -phi_est / (2.0 * std::f64::consts::PI);
    let mut out = Circuit::new(c.n_sites());
    for g in c.gates() {
        if let (true, Sites::Two(a, b)) = (g.kind.is_native_two_qubit(), g.sites) {
            out.push(Gate::one(
                GateKind::PhasedXZ {
                    a: 0.0,
                    x: 0.0,
                    z: t,
                },
                a,
            ))?;
            out.push(Gate::one(
                GateKind::PhasedXZ {
                    a: 0.0,
                    x: 0.0,
                    z: t,
                },
                b,
            ))?;
        }
        out.push(*g)?;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum Mitigation {
    #[default]
    None,
    CPhase,
    ZSplit,
}

impl std::str::FromStr for Mitigation {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "none" => Ok(Mitigation::None),
            "cphase" => Ok(Mitigation::CPhase),
            "zsplit" => Ok(Mitigation::ZSplit),
            other => Err(SimError::Config(format!(
                "unknown mitigation {other:?} (none, cphase, zsplit)"
            ))),
        }
    }
}

impl Mitigation {
    pub fn as_str(self) -> &'static str {
        match self {
            Mitigation::None => "none",
            Mitigation::CPhase => "cphase",
            Mitigation::ZSplit => "zsplit",
        }
    }
}

/// Native circuit under noise: mitigation first, so compensation gates are
/// noisy too, then noise on every entangler.
pub fn noisy_native(
    c: &Circuit,
    np: &NoiseParams,
    mitigation: Mitigation,
    phi_est: f64,
) -> Result<Circuit> {
    let mitigated = match mitigation {
        Mitigation::None => c.clone(),
        Mitigation::CPhase => compensate_cphase(c, phi_est)?,
        Mitigation::ZSplit => split_phase_z(c, phi_est)?,
    };
    inject_noise(&mitigated, np)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum SweepParam {
    Theta,
    Zeta,
    Chi,
    Gamma,
    Phi,
}

impl SweepParam {
    pub const ALL: [SweepParam; 5] = [
        SweepParam::Theta,
        SweepParam::Zeta,
        SweepParam::Chi,
        SweepParam::Gamma,
        SweepParam::Phi,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            SweepParam::Theta => "theta",
            SweepParam::Zeta => "zeta",
            SweepParam::Chi => "chi",
            SweepParam::Gamma => "gamma",
            SweepParam::Phi => "phi",
        }
    }

    /// Ideal parameters with this one set to `value`. For `theta` the value is
    /// the offset from the ideal swap angle.
    pub fn with_value(self, value: f64) -> NoiseParams {
        let mut np = NoiseParams::IDEAL;
        match self {
            SweepParam::Theta => np.theta += value,
            SweepParam::Zeta => np.zeta = value,
            SweepParam::Chi => np.chi = value,
            SweepParam::Gamma => np.gamma = value,
            SweepParam::Phi => np.phi = value,
        }
        np
    }
}

impl std::str::FromStr for SweepParam {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        SweepParam::ALL
            .into_iter()
            .find(|p| p.as_str() == s.trim().to_ascii_lowercase())
            .ok_or_else(|| {
                SimError::Config(format!(
                    "unknown sweep parameter {s:?} (theta, zeta, chi, gamma, phi)"
                ))
            })
    }
}

/// A non-recompiled preparation run to be repeated under noise.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoisyAsp {
    pub params: CouplingParams,
    pub schedule: Schedule,
    pub n_sites: usize,
    pub mitigation: Mitigation,
    pub phi_est: f64,
}

impl NoisyAsp {
    /// Native circuits for the preparation layer (index 0) and each Trotter step.
    pub fn native_segments(&self) -> Result<Vec<Circuit>> {
        let mut out = vec![decompose_to_native(&neel_preparation(self.n_sites)?)?];
        for m in 0..self.schedule.n_steps {
            let step = trotter_step(
                &self.params,
                self.schedule.s_mid(m),
                self.schedule.dt,
                self.n_sites,
            )?;
            out.push(decompose_to_native(&step)?);
        }
        Ok(out)
    }

    /// Whole native circuit up to and including step `upto_step`.
    pub fn native_circuit(&self, np: &NoiseParams, upto_step: usize) -> Result<Circuit> {
        let mut c = Circuit::new(self.n_sites);
        for seg in self.native_segments()?.iter().take(upto_step + 1) {
            c.extend(&noisy_native(seg, np, self.mitigation, self.phi_est)?)?;
        }
        Ok(c)
    }

    /// States at every step boundary, starting from `|00...0>`.
    pub fn states(&self, np: &NoiseParams) -> Result<Vec<State>> {
        let mut state = State::basis(self.n_sites, &Bitstring::new(vec![0; self.n_sites])?)?;
        let mut out = Vec::with_capacity(self.schedule.n_steps + 1);
        for seg in self.native_segments()? {
            simulate_in_place(
                &noisy_native(&seg, np, self.mitigation, self.phi_est)?,
                &mut state,
            )?;
            out.push(state.clone());
        }
        Ok(out)
    }

    /// `(s, |O_z1|)` at every step boundary.
    pub fn oz1_trajectory(&self, np: &NoiseParams) -> Result<Vec<(f64, f64)>> {
        let spec = StringOrderSpec::new(1, self.n_sites)?;
        self.states(np)?
            .iter()
            .enumerate()
            .map(|(m, st)| {
                Ok((
                    self.schedule.s_boundary(m),
                    string_order_exact(st, &spec)?.abs(),
                ))
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SweepRow {
    pub param: SweepParam,
    pub value: f64,
    pub s: f64,
    pub abs_oz1: f64,
}

/// One `|O_z1|` trajectory per value of `param`, all other parameters ideal.
pub fn sweep(param: SweepParam, values: &[f64], experiment: &NoisyAsp) -> Result<Vec<SweepRow>> {
    if values.is_empty() {
        return Err(SimError::Config("sweep needs at least one value".into()));
    }
    let per_value: Vec<Vec<SweepRow>> = values
        .par_iter()
        .map(|&value| {
            let traj = experiment.oz1_trajectory(&param.with_value(value))?;
            Ok(traj
                .into_iter()
                .map(|(s, abs_oz1)| SweepRow {
                    param,
                    value,
                    s,
                    abs_oz1,
                })
                .collect())
        })
        .collect::<Result<_>>()?;
    Ok(per_value.into_iter().flatten().collect())
}
