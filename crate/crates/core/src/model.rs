//! Chain Hamiltonians, parameter presets and the exact-diagonalization oracle.

use nalgebra::{DMatrix, DVector, SymmetricEigen};

use crate::error::{Result, SimError};
use crate::statevector::{State, C64, ONE, ZERO};

/// Largest chain for which dense matrices are built.
pub const DENSE_MAX_SITES: usize = 14;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CouplingParams {
    /// Nearest-neighbor strength on odd-to-even bonds `(2k+1, 2k+2)`.
    pub j1: f64,
    /// Nearest-neighbor strength on even-to-odd bonds `(2k, 2k+1)`.
    pub j1p: f64,
    /// Next-nearest-neighbor strength on `(k, k+2)`.
    pub j2: f64,
    pub bz: f64,
}

impl CouplingParams {
    pub fn validate(&self) -> Result<()> {
        if [self.j1, self.j1p, self.j2, self.bz]
            .iter()
            .all(|v| v.is_finite())
        {
            Ok(())
        } else {
            Err(SimError::Config("coupling constants must be finite".into()))
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum PresetName {
    Ed,
    Sd,
    EdSupplement,
}

impl PresetName {
    pub fn as_str(self) -> &'static str {
        match self {
            PresetName::Ed => "ed",
            PresetName::Sd => "sd",
            PresetName::EdSupplement => "ed-supplement",
        }
    }
}

impl std::str::FromStr for PresetName {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "ed" => Ok(PresetName::Ed),
            "sd" => Ok(PresetName::Sd),
            "ed-supplement" | "ed_supplement" => Ok(PresetName::EdSupplement),
            other => Err(SimError::Config(format!(
                "unknown preset {other:?} (expected ed, sd or ed-supplement)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct PhasePreset {
    pub name: PresetName,
    pub params: CouplingParams,
    pub t_total: f64,
    pub dt: f64,
}

impl PhasePreset {
    pub fn get(name: PresetName) -> Self {
        let params = match name {
            PresetName::Ed => CouplingParams {
                j1: 0.2,
                j1p: -1.5,
                j2: -0.1,
                bz: 2.5,
            },
            PresetName::Sd => CouplingParams {
                j1: 1.5,
                j1p: -0.2,
                j2: -0.1,
                bz: 2.5,
            },
            PresetName::EdSupplement => CouplingParams {
                j1: 0.2,
                j1p: -1.0,
                j2: -0.1,
                bz: 1.5,
            },
        };
        Self {
            name,
            params,
            t_total: 3.0,
            dt: 0.25,
        }
    }

    pub fn ed() -> Self {
        Self::get(PresetName::Ed)
    }

    pub fn sd() -> Self {
        Self::get(PresetName::Sd)
    }

    pub fn ed_supplement() -> Self {
        Self::get(PresetName::EdSupplement)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Pauli {
    X,
    Y,
    Z,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Term {
    pub coeff: f64,
    /// Distinct sites, each with its Pauli operator.
    pub ops: Vec<(usize, Pauli)>,
}

impl Term {
    /// Image of basis index `i`: `P|i> = phase |j>`.
    #[inline]
    pub fn act(&self, i: usize) -> (usize, C64) {
        let mut j = i;
        let mut phase = ONE;
        for &(site, p) in &self.ops {
            let b = (i >> site) & 1;
            match p {
                Pauli::X => j ^= 1 << site,
                Pauli::Y => {
                    j ^= 1 << site;
                    phase *= if b == 0 {
                        C64::new(0.0, 1.0)
                    } else {
                        C64::new(0.0, -1.0)
                    };
                }
                Pauli::Z => {
                    if b == 1 {
                        phase = -phase;
                    }
                }
            }
        }
        (j, phase)
    }
}

/// Weighted sum of one- and two-site Pauli strings.
#[derive(Clone, Debug, PartialEq)]
pub struct TermList {
    n_sites: usize,
    terms: Vec<Term>,
}

impl TermList {
    pub fn new(n_sites: usize, terms: Vec<Term>) -> Result<Self> {
        for t in &terms {
            if t.ops.is_empty() || t.ops.len() > 2 {
                return Err(SimError::Config(
                    "terms must act on one or two sites".into(),
                ));
            }
            if !t.coeff.is_finite() {
                return Err(SimError::Config("term coefficient is not finite".into()));
            }
            if let Some(&(s, _)) = t.ops.iter().find(|(s, _)| *s >= n_sites) {
                return Err(SimError::Config(format!("term site {s} out of range")));
            }
            if t.ops.len() == 2 && t.ops[0].0 == t.ops[1].0 {
                return Err(SimError::Config("two-site term on repeated site".into()));
            }
        }
        Ok(Self { n_sites, terms })
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn terms(&self) -> &[Term] {
        &self.terms
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    /// `H|psi>` on a raw amplitude vector.
    pub fn apply(&self, amps: &[C64]) -> Vec<C64> {
        let mut out = vec![ZERO; amps.len()];
        for t in &self.terms {
            for (i, &a) in amps.iter().enumerate() {
                if a != ZERO {
                    let (j, ph) = t.act(i);
                    out[j] += ph * a * t.coeff;
                }
            }
        }
        out
    }
}

fn hopping_terms(terms: &mut Vec<Term>, coeff: f64, a: usize, b: usize) {
    if coeff == 0.0 {
        return;
    }
    terms.push(Term {
        coeff,
        ops: vec![(a, Pauli::X), (b, Pauli::X)],
    });
    terms.push(Term {
        coeff,
        ops: vec![(a, Pauli::Y), (b, Pauli::Y)],
    });
}

/// Bond lists `(even->odd, odd->even, next-nearest)` of an open chain.
pub fn bonds(
    n_sites: usize,
) -> (
    Vec<(usize, usize)>,
    Vec<(usize, usize)>,
    Vec<(usize, usize)>,
) {
    let even = (0..n_sites.saturating_sub(1))
        .step_by(2)
        .map(|k| (k, k + 1))
        .collect();
    let odd = (1..n_sites.saturating_sub(1))
        .step_by(2)
        .map(|k| (k, k + 1))
        .collect();
    let nnn = (0..n_sites.saturating_sub(2)).map(|k| (k, k + 2)).collect();
    (even, odd, nnn)
}

/// Hopping Hamiltonian with open boundaries. Each bond contributes
/// `-c (XX + YY)` with `c` chosen by bond family; bonds with `c == 0` are omitted.
pub fn target_hamiltonian(params: &CouplingParams, n_sites: usize) -> Result<TermList> {
    if n_sites < 3 {
        return Err(SimError::Config(format!(
            "target Hamiltonian needs at least 3 sites, got {n_sites}"
        )));
    }
    params.validate()?;
    let (even, odd, nnn) = bonds(n_sites);
    let mut terms = Vec::new();
    for (a, b) in even {
        hopping_terms(&mut terms, -params.j1p, a, b);
    }
    for (a, b) in odd {
        hopping_terms(&mut terms, -params.j1, a, b);
    }
    for (a, b) in nnn {
        hopping_terms(&mut terms, -params.j2, a, b);
    }
    TermList::new(n_sites, terms)
}

/// Staggered field `-bz * sum_k (-1)^k Z_k`.
pub fn initial_hamiltonian(bz: f64, n_sites: usize) -> Result<TermList> {
    if n_sites == 0 {
        return Err(SimError::Config(
            "initial Hamiltonian needs at least 1 site".into(),
        ));
    }
    let terms = (0..n_sites)
        .map(|k| {
            let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
            Term {
                coeff: -bz * sign,
                ops: vec![(k, Pauli::Z)],
            }
        })
        .collect();
    TermList::new(n_sites, terms)
}

/// `(1-s) hi + s ht`.
pub fn interpolated(hi: &TermList, ht: &TermList, s: f64) -> Result<TermList> {
    if !(0.0..=1.0).contains(&s) {
        return Err(SimError::Schedule(format!(
            "interpolation parameter s={s} outside [0, 1]"
        )));
    }
    if hi.n_sites != ht.n_sites {
        return Err(SimError::Dimension {
            expected: hi.n_sites,
            got: ht.n_sites,
        });
    }
    let mut terms: Vec<Term> = hi
        .terms
        .iter()
        .map(|t| Term {
            coeff: (1.0 - s) * t.coeff,
            ops: t.ops.clone(),
        })
        .collect();
    terms.extend(ht.terms.iter().map(|t| Term {
        coeff: s * t.coeff,
        ops: t.ops.clone(),
    }));
    TermList::new(hi.n_sites, terms)
}

/// `H(s)` for a coupling set.
pub fn hamiltonian_at(params: &CouplingParams, n_sites: usize, s: f64) -> Result<TermList> {
    interpolated(
        &initial_hamiltonian(params.bz, n_sites)?,
        &target_hamiltonian(params, n_sites)?,
        s,
    )
}

fn dense_guard(n_sites: usize) -> Result<()> {
    if n_sites > DENSE_MAX_SITES {
        return Err(SimError::Resource(format!(
            "dense matrix for {n_sites} sites exceeds the {DENSE_MAX_SITES}-site limit"
        )));
    }
    Ok(())
}

pub fn dense_matrix(h: &TermList) -> Result<DMatrix<C64>> {
    dense_guard(h.n_sites)?;
    let dim = 1usize << h.n_sites;
    let mut m = DMatrix::from_element(dim, dim, ZERO);
    for t in &h.terms {
        for i in 0..dim {
            let (j, ph) = t.act(i);
            m[(j, i)] += ph * t.coeff;
        }
    }
    Ok(m)
}

/// Basis indices whose total Z equals `sz`, ascending.
pub fn sector_basis(n_sites: usize, sz: i32) -> Vec<usize> {
    let n = n_sites as i32;
    (0..1usize << n_sites)
        .filter(|i| n - 2 * i.count_ones() as i32 == sz)
        .collect()
}

/// Total Z of the alternating reference state `|0101...>`.
pub fn neel_sector(n_sites: usize) -> i32 {
    (n_sites % 2) as i32
}

/// Lowest eigenpair, optionally restricted to a total-Z sector. Ties go to the
/// first eigenvector in ascending eigenvalue order; the global phase is fixed
/// by making the largest amplitude real and positive.
pub fn ground_state(h: &TermList, sz_sector: Option<i32>) -> Result<(f64, State)> {
    dense_guard(h.n_sites)?;
    let dim = 1usize << h.n_sites;
    let basis: Vec<usize> = match sz_sector {
        Some(sz) => sector_basis(h.n_sites, sz),
        None => (0..dim).collect(),
    };
    if basis.is_empty() {
        return Err(SimError::Config(format!(
            "total-Z sector {sz_sector:?} is empty"
        )));
    }
    let mut pos = vec![usize::MAX; dim];
    for (k, &i) in basis.iter().enumerate() {
        pos[i] = k;
    }
    let n = basis.len();
    let mut m = DMatrix::from_element(n, n, ZERO);
    // single XX or YY terms leave the sector; only their sum must not
    let mut leak: Vec<(usize, C64)> = Vec::new();
    for (k, &i) in basis.iter().enumerate() {
        leak.clear();
        for t in &h.terms {
            let (j, ph) = t.act(i);
            match pos[j] {
                usize::MAX => match leak.iter_mut().find(|(jj, _)| *jj == j) {
                    Some((_, v)) => *v += ph * t.coeff,
                    None => leak.push((j, ph * t.coeff)),
                },
                r => m[(r, k)] += ph * t.coeff,
            }
        }
        if leak.iter().any(|(_, v)| v.norm() > 1e-12) {
            return Err(SimError::Numerical(
                "Hamiltonian does not conserve the requested sector".into(),
            ));
        }
    }
    let eig = SymmetricEigen::new(m);
    let mut best = 0;
    for k in 1..n {
        if eig.eigenvalues[k] < eig.eigenvalues[best] - 1e-12 {
            best = k;
        }
    }
    let v: DVector<C64> = eig.eigenvectors.column(best).into_owned();
    let mut amps = vec![ZERO; dim];
    for (k, &i) in basis.iter().enumerate() {
        amps[i] = v[k];
    }
    let mut state = State::normalized(h.n_sites, amps)?;
    state.canonicalize_phase();
    Ok((eig.eigenvalues[best], state))
}

/// `exp(-i H t)` by Hermitian eigendecomposition.
pub fn evolution_operator(h: &TermList, t: f64) -> Result<DMatrix<C64>> {
    let m = dense_matrix(h)?;
    let eig = SymmetricEigen::new(m);
    let phases = DMatrix::from_diagonal(&eig.eigenvalues.map(|e| C64::new(0.0, -e * t).exp()));
    Ok(&eig.eigenvectors * phases * eig.eigenvectors.adjoint())
}
