use std::f64::consts::PI;

use super::gate::{rx, ry, rz, to_phased_xz, HALF_PI};
use super::{Circuit, Gate, GateKind, GateMatrix, Sites};
use crate::error::{Result, SimError};
use crate::statevector::{mat, Mat2};

/// Two-qubit gate tallies for a logical circuit and its native form.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct NativeCounts {
    /// Logical two-qubit gates, zero-angle ones included.
    pub logical: usize,
    /// Two native entanglers per logical gate, before elision.
    pub raw: usize,
    /// Native entanglers actually emitted.
    pub elided: usize,
}

impl NativeCounts {
    pub fn of(logical: &Circuit, native: &Circuit) -> Self {
        let logical_count = logical
            .gates()
            .iter()
            .filter(|g| matches!(g.kind, GateKind::Hopping(_) | GateKind::CPhase(_)))
            .count();
        let passthrough = logical
            .gates()
            .iter()
            .filter(|g| g.kind.is_native_two_qubit())
            .count();
        Self {
            logical: logical_count,
            raw: 2 * logical_count + passthrough,
            elided: native.two_qubit_count(),
        }
    }
}

fn pxz(m: &Mat2, site: usize) -> Gate {
    let (a, x, z) = to_phased_xz(m);
    Gate::one(GateKind::PhasedXZ { a, x, z }, site)
}

fn z_gate(lambda: f64, site: usize) -> Gate {
    Gate::one(
        GateKind::PhasedXZ {
            a: 0.0,
            x: 0.0,
            z: lambda / PI,
        },
        site,
    )
}

fn push_rz_split(out: &mut Vec<Gate>, phi: f64, a: usize, b: usize) {
    out.push(z_gate(phi / 2.0, a));
    out.push(z_gate(-phi / 2.0, b));
}

/// `Hopping(alpha)` from two native entanglers and relative Z rotations.
/// Exact including global phase when `entangler` is ideal.
pub fn hopping_native(alpha: f64, a: usize, b: usize, entangler: GateKind) -> Vec<Gate> {
    let mut out = Vec::with_capacity(8);
    push_rz_split(&mut out, -HALF_PI, a, b);
    out.push(Gate::two(entangler, a, b));
    push_rz_split(&mut out, 2.0 * alpha + PI, a, b);
    out.push(Gate::two(entangler, a, b));
    push_rz_split(&mut out, -HALF_PI, a, b);
    out
}

/// `CPhase(psi)` from two native entanglers and single-qubit rotations, up to
/// global phase. `psi` is first wrapped into `(-pi, pi]`.
pub fn cphase_native(psi: f64, a: usize, b: usize, entangler: GateKind) -> Vec<Gate> {
    let psi = wrap_angle(psi);
    // cos(psi/2), exactly zero at |psi| = pi
    let c = ((PI - psi.abs()) / 2.0).sin().max(0.0);
    let q = (psi / 4.0).sin();
    let xi = 2.0 * (std::f64::consts::SQRT_2 * q).atan2(c.sqrt());
    let beta = q.atan2(c.sqrt());
    let pauli_z = rz(PI);
    let r0 = mat::mul(&rz(-HALF_PI), &ry(-beta));
    let r1 = mat::mul(&rz(HALF_PI), &ry(-HALF_PI));
    let mid = mat::mul(&pauli_z, &rx(xi));
    let l0 = mat::mul(&rz(psi / 2.0), &mat::mul(&ry(-beta), &rz(-HALF_PI)));
    let l1 = mat::mul(&rz(psi / 2.0 - PI), &mat::mul(&ry(-HALF_PI), &rz(HALF_PI)));
    vec![
        pxz(&r0, a),
        pxz(&r1, b),
        Gate::two(entangler, a, b),
        pxz(&mid, a),
        Gate::two(entangler, a, b),
        pxz(&l0, a),
        pxz(&l1, b),
    ]
}

fn wrap_angle(t: f64) -> f64 {
    let w = t - 2.0 * PI * ((t + PI) / (2.0 * PI)).floor();
    if w <= -PI {
        w + 2.0 * PI
    } else {
        w
    }
}

/// Rewrite a logical circuit with PhasedXZ and the native entangler only.
/// Zero-angle hopping and controlled-phase gates vanish, and runs of
/// single-qubit gates are fused (see [`merge_single_qubit`]).
pub fn decompose_to_native(c: &Circuit) -> Result<Circuit> {
    let mut gates = Vec::with_capacity(c.len() * 4);
    for g in c.gates() {
        match (g.kind, g.sites) {
            (GateKind::PhasedXZ { .. }, _)
            | (GateKind::SqrtISwapDagger, _)
            | (GateKind::GeneralNCDagger(_), _) => gates.push(*g),
            (GateKind::Rz(l), Sites::One(s)) => gates.push(z_gate(l, s)),
            (GateKind::Rx(l), Sites::One(s)) => gates.push(Gate::one(
                GateKind::PhasedXZ {
                    a: 0.0,
                    x: l / PI,
                    z: 0.0,
                },
                s,
            )),
            (GateKind::Hopping(alpha), Sites::Two(a, b)) => {
                if alpha != 0.0 {
                    gates.extend(hopping_native(alpha, a, b, GateKind::SqrtISwapDagger));
                }
            }
            (GateKind::CPhase(psi), Sites::Two(a, b)) => {
                if wrap_angle(psi) != 0.0 {
                    gates.extend(cphase_native(psi, a, b, GateKind::SqrtISwapDagger));
                }
            }
            (kind, _) => {
                return Err(SimError::UnsupportedGate(format!(
                    "{} cannot be decomposed",
                    kind.name()
                )))
            }
        }
    }
    merge_single_qubit(&Circuit::from_gates(c.n_sites(), gates)?)
}

/// Fuse consecutive single-qubit gates on each site into one PhasedXZ, dropping
/// products equal to the identity up to phase.
pub fn merge_single_qubit(c: &Circuit) -> Result<Circuit> {
    let n = c.n_sites();
    let mut pending: Vec<Option<Mat2>> = vec![None; n];
    let mut out = Circuit::new(n);
    fn flush(pending: &mut [Option<Mat2>], site: usize, out: &mut Circuit) -> Result<()> {
        if let Some(m) = pending[site].take() {
            if mat::phase_distance(&m, &mat::identity()) > 1e-12 {
                out.push(pxz(&m, site))?;
            }
        }
        Ok(())
    }
    for g in c.gates() {
        match (g.matrix(), g.sites) {
            (GateMatrix::One(m), Sites::One(s)) => {
                let prev = pending[s].unwrap_or_else(mat::identity);
                pending[s] = Some(mat::mul(&m, &prev));
            }
            (_, Sites::Two(a, b)) => {
                flush(&mut pending, a, &mut out)?;
                flush(&mut pending, b, &mut out)?;
                out.push(*g)?;
            }
            _ => {
                return Err(SimError::Config(format!(
                    "arity mismatch for {}",
                    g.kind.name()
                )))
            }
        }
    }
    for s in 0..n {
        flush(&mut pending, s, &mut out)?;
    }
    Ok(out)
}
