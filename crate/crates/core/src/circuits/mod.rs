//! Gate vocabulary, Trotterized preparation circuits, native decomposition and
//! simulation.

mod gate;
mod native;
mod text;
mod trotter;

pub use gate::{
    cphase, gate_matrix, general_nc, hopping, phased_xz, rx, ry, rz, sqrt_iswap_dagger,
    to_phased_xz, x_pow, z_pow, Gate, GateKind, GateMatrix, NoiseParams, Sites,
};
pub use native::{
    cphase_native, decompose_to_native, hopping_native, merge_single_qubit, NativeCounts,
};
pub use trotter::{
    asp_circuit, asp_circuit_with, asp_states, neel_preparation, trotter_step, Schedule,
};

use nalgebra::DMatrix;

use crate::error::{Result, SimError};
use crate::statevector::{unitarity_error, State, C64};

/// Dense unitaries are only built up to this many sites.
pub const UNITARY_MAX_SITES: usize = 10;

/// Ordered gate list on a fixed number of sites.
#[derive(Clone, Debug, PartialEq)]
pub struct Circuit {
    n_sites: usize,
    gates: Vec<Gate>,
}

impl Circuit {
    pub fn new(n_sites: usize) -> Self {
        Self {
            n_sites,
            gates: Vec::new(),
        }
    }

    pub fn from_gates(n_sites: usize, gates: Vec<Gate>) -> Result<Self> {
        let mut c = Self::new(n_sites);
        for g in gates {
            c.push(g)?;
        }
        Ok(c)
    }

    pub fn push(&mut self, g: Gate) -> Result<()> {
        if g.sites.max() >= self.n_sites {
            return Err(SimError::Config(format!(
                "gate {} on site {} outside {}-site circuit",
                g.kind.name(),
                g.sites.max(),
                self.n_sites
            )));
        }
        match g.sites {
            Sites::Two(a, b) if a == b => {
                return Err(SimError::Config(format!(
                    "two-qubit gate on repeated site {a}"
                )));
            }
            Sites::One(_) if g.kind.arity() != 1 => {
                return Err(SimError::Config(format!(
                    "{} needs two sites",
                    g.kind.name()
                )));
            }
            Sites::Two(..) if g.kind.arity() != 2 => {
                return Err(SimError::Config(format!(
                    "{} needs one site",
                    g.kind.name()
                )));
            }
            _ => {}
        }
        self.gates.push(g);
        Ok(())
    }

    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.n_sites != self.n_sites {
            return Err(SimError::Dimension {
                expected: self.n_sites,
                got: other.n_sites,
            });
        }
        self.gates.extend_from_slice(&other.gates);
        Ok(())
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn gates(&self) -> &[Gate] {
        &self.gates
    }

    pub fn len(&self) -> usize {
        self.gates.len()
    }

    pub fn is_empty(&self) -> bool {
        self.gates.is_empty()
    }

    pub fn two_qubit_count(&self) -> usize {
        self.gates.iter().filter(|g| g.kind.arity() == 2).count()
    }

    /// True if every gate is a PhasedXZ or a native two-qubit entangler.
    pub fn is_native(&self) -> bool {
        self.gates
            .iter()
            .all(|g| matches!(g.kind, GateKind::PhasedXZ { .. }) || g.kind.is_native_two_qubit())
    }
}

/// Apply every gate of `c` to a copy of `initial`, in list order.
pub fn simulate(c: &Circuit, initial: &State) -> Result<State> {
    let mut state = initial.clone();
    simulate_in_place(c, &mut state)?;
    Ok(state)
}

pub fn simulate_in_place(c: &Circuit, state: &mut State) -> Result<()> {
    if c.n_sites != state.n_sites() {
        return Err(SimError::Dimension {
            expected: c.n_sites,
            got: state.n_sites(),
        });
    }
    for g in &c.gates {
        match (g.matrix(), g.sites) {
            (GateMatrix::One(m), Sites::One(a)) => {
                check_unitary(unitarity_error(&m), &g.kind)?;
                state.apply_one_unchecked(&m, a);
            }
            (GateMatrix::Two(m), Sites::Two(a, b)) => {
                check_unitary(unitarity_error(&m), &g.kind)?;
                state.apply_two_unchecked(&m, a, b);
            }
            _ => {
                return Err(SimError::Config(format!(
                    "arity mismatch for {}",
                    g.kind.name()
                )))
            }
        }
    }
    Ok(())
}

fn check_unitary(err: f64, kind: &GateKind) -> Result<()> {
    if !(err <= 1e-10) {
        return Err(SimError::Numerical(format!(
            "{} matrix is not unitary (error {err:e})",
            kind.name()
        )));
    }
    Ok(())
}

/// Dense `2^L x 2^L` unitary of a circuit, column `j` being the image of basis state `j`.
pub fn circuit_unitary(c: &Circuit) -> Result<DMatrix<C64>> {
    if c.n_sites > UNITARY_MAX_SITES {
        return Err(SimError::Resource(format!(
            "dense unitary limited to {UNITARY_MAX_SITES} sites, circuit has {}",
            c.n_sites
        )));
    }
    let dim = 1usize << c.n_sites;
    let mut u = DMatrix::from_element(dim, dim, C64::new(0.0, 0.0));
    for j in 0..dim {
        let mut amps = vec![C64::new(0.0, 0.0); dim];
        amps[j] = C64::new(1.0, 0.0);
        let out = simulate(c, &State::from_amplitudes(c.n_sites, amps)?)?;
        for (i, a) in out.amplitudes().iter().enumerate() {
            u[(i, j)] = *a;
        }
    }
    Ok(u)
}

/// Largest elementwise distance between `a` and `e^{i t} b`, minimized over `t`.
pub fn phase_insensitive_distance(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
    let ov: C64 = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let ph = if ov.norm() > 0.0 {
        ov / ov.norm()
    } else {
        C64::new(1.0, 0.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - ph * y).norm())
        .fold(0.0, f64::max)
}
