//! Dense statevector over the computational basis of an `L`-site chain.
//!
//! Bit convention used everywhere in this crate: bit `j` of a basis index is the
//! occupation of site `j`, so site 0 is the least significant bit. A bit value
//! `b` corresponds to the Pauli-Z eigenvalue `z = 1 - 2b`.
//!
//! Two-qubit matrices act on the ordered pair `(site_a, site_b)` with local basis
//! `|b_a b_b>` ordered `|00>, |01>, |10>, |11>`, i.e. local index `2*b_a + b_b`.

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Result, SimError};
use crate::observables::ShotSet;

pub type C64 = Complex64;
pub type Mat2 = [[C64; 2]; 2];
pub type Mat4 = [[C64; 4]; 4];

/// Largest chain a `State` may describe.
pub const MAX_SITES: usize = 20;

const UNITARY_TOL: f64 = 1e-10;

pub(crate) const ZERO: C64 = C64::new(0.0, 0.0);
pub(crate) const ONE: C64 = C64::new(1.0, 0.0);

/// Computational-basis measurement outcome, one bit per site.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Bitstring {
    bits: Vec<u8>,
}

impl Bitstring {
    pub fn new(bits: Vec<u8>) -> Result<Self> {
        if let Some(b) = bits.iter().find(|&&b| b > 1) {
            return Err(SimError::Config(format!("bit value {b} is not 0 or 1")));
        }
        Ok(Self { bits })
    }

    /// Decode the low `n_sites` bits of a basis index.
    pub fn from_index(index: usize, n_sites: usize) -> Self {
        let bits = (0..n_sites).map(|j| ((index >> j) & 1) as u8).collect();
        Self { bits }
    }

    /// Alternating pattern `0101...` with odd sites set.
    pub fn neel(n_sites: usize) -> Self {
        Self {
            bits: (0..n_sites).map(|j| (j % 2) as u8).collect(),
        }
    }

    pub fn len(&self) -> usize {
        self.bits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.bits.is_empty()
    }

    pub fn bits(&self) -> &[u8] {
        &self.bits
    }

    pub fn bit(&self, site: usize) -> u8 {
        self.bits[site]
    }

    /// Pauli-Z eigenvalue at `site`.
    pub fn z(&self, site: usize) -> i32 {
        1 - 2 * self.bits[site] as i32
    }

    /// Sum of Pauli-Z eigenvalues over all sites.
    pub fn total_z(&self) -> i32 {
        self.bits.iter().map(|&b| 1 - 2 * b as i32).sum()
    }

    pub fn index(&self) -> usize {
        self.bits
            .iter()
            .enumerate()
            .fold(0, |acc, (j, &b)| acc | ((b as usize) << j))
    }
}

impl std::fmt::Display for Bitstring {
    /// Site 0 is the first character.
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        for &b in &self.bits {
            write!(f, "{b}")?;
        }
        Ok(())
    }
}

impl std::str::FromStr for Bitstring {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        let bits = s
            .chars()
            .map(|c| match c {
                '0' => Ok(0),
                '1' => Ok(1),
                other => Err(SimError::Config(format!("invalid bit character {other:?}"))),
            })
            .collect::<Result<Vec<u8>>>()?;
        Ok(Self { bits })
    }
}

/// Normalized amplitude vector of length `2^n_sites`.
#[derive(Clone, Debug, PartialEq)]
pub struct State {
    n_sites: usize,
    amps: Vec<C64>,
}

impl State {
    /// Computational basis state given by `bits`.
    pub fn basis(n_sites: usize, bits: &Bitstring) -> Result<Self> {
        check_sites(n_sites)?;
        if bits.len() != n_sites {
            return Err(SimError::Config(format!(
                "bitstring has {} sites, expected {n_sites}",
                bits.len()
            )));
        }
        let mut amps = vec![ZERO; 1 << n_sites];
        amps[bits.index()] = ONE;
        Ok(Self { n_sites, amps })
    }

    /// The alternating `|0101...0>` state.
    pub fn neel(n_sites: usize) -> Result<Self> {
        Self::basis(n_sites, &Bitstring::neel(n_sites))
    }

    /// Wrap an amplitude vector, checking its length and normalization.
    pub fn from_amplitudes(n_sites: usize, amps: Vec<C64>) -> Result<Self> {
        check_sites(n_sites)?;
        if amps.len() != 1 << n_sites {
            return Err(SimError::Dimension {
                expected: 1 << n_sites,
                got: amps.len(),
            });
        }
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > UNITARY_TOL {
            return Err(SimError::Numerical(format!(
                "state norm^2 is {norm}, expected 1"
            )));
        }
        Ok(Self { n_sites, amps })
    }

    /// Normalize an arbitrary non-zero vector.
    pub fn normalized(n_sites: usize, mut amps: Vec<C64>) -> Result<Self> {
        let norm = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        if norm == 0.0 || !norm.is_finite() {
            return Err(SimError::Numerical("cannot normalize a zero vector".into()));
        }
        amps.iter_mut().for_each(|a| *a /= norm);
        Self::from_amplitudes(n_sites, amps)
    }

    pub fn n_sites(&self) -> usize {
        self.n_sites
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[C64] {
        &self.amps
    }

    pub fn into_amplitudes(self) -> Vec<C64> {
        self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    pub fn probabilities(&self) -> Vec<f64> {
        self.amps.iter().map(|a| a.norm_sqr()).collect()
    }

    /// Apply a single-site unitary in place.
    pub fn apply_one_qubit(&mut self, u: &Mat2, site: usize) -> Result<()> {
        self.check_site(site)?;
        check_unitary2(u)?;
        self.apply_one_unchecked(u, site);
        Ok(())
    }

    /// Apply a two-site unitary in place on the ordered pair `(site_a, site_b)`.
    /// Sites need not be adjacent.
    pub fn apply_two_qubit(&mut self, u: &Mat4, site_a: usize, site_b: usize) -> Result<()> {
        self.check_site(site_a)?;
        self.check_site(site_b)?;
        if site_a == site_b {
            return Err(SimError::Config(format!(
                "two-qubit gate on repeated site {site_a}"
            )));
        }
        check_unitary4(u)?;
        self.apply_two_unchecked(u, site_a, site_b);
        Ok(())
    }

    pub(crate) fn apply_one_unchecked(&mut self, u: &Mat2, site: usize) {
        let mask = 1usize << site;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let a0 = self.amps[i];
                let a1 = self.amps[j];
                self.amps[i] = u[0][0] * a0 + u[0][1] * a1;
                self.amps[j] = u[1][0] * a0 + u[1][1] * a1;
            }
        }
    }

    pub(crate) fn apply_two_unchecked(&mut self, u: &Mat4, site_a: usize, site_b: usize) {
        let ma = 1usize << site_a;
        let mb = 1usize << site_b;
        for i in 0..self.amps.len() {
            if i & (ma | mb) == 0 {
                let idx = [i, i | mb, i | ma, i | ma | mb];
                let v = idx.map(|k| self.amps[k]);
                for (r, &k) in idx.iter().enumerate() {
                    self.amps[k] =
                        u[r][0] * v[0] + u[r][1] * v[1] + u[r][2] * v[2] + u[r][3] * v[3];
                }
            }
        }
    }

    /// `<self|other>`, conjugate-linear in `self`.
    pub fn inner(&self, other: &State) -> Result<C64> {
        if self.dim() != other.dim() {
            return Err(SimError::Dimension {
                expected: self.dim(),
                got: other.dim(),
            });
        }
        Ok(inner_raw(&self.amps, &other.amps))
    }

    /// `|<self|other>|^2`.
    pub fn fidelity(&self, other: &State) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    /// `<sigma^z_site>`.
    pub fn expectation_z(&self, site: usize) -> Result<f64> {
        self.check_site(site)?;
        Ok(self
            .amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                if (i >> site) & 1 == 0 {
                    a.norm_sqr()
                } else {
                    -a.norm_sqr()
                }
            })
            .sum())
    }

    /// Total probability outside the sector with `sum_j z_j == total_z`.
    pub fn out_of_sector_probability(&self, total_z: i32) -> f64 {
        let n = self.n_sites as i32;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| n - 2 * i.count_ones() as i32 != total_z)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Draw `shots` i.i.d. bitstrings from `|amplitude|^2` by inverse CDF.
    /// The same seed always yields the same shots.
    pub fn sample(&self, shots: usize, seed: u64) -> Result<ShotSet> {
        if shots == 0 {
            return Err(SimError::Config("shots must be at least 1".into()));
        }
        let mut cdf = Vec::with_capacity(self.amps.len());
        let mut acc = 0.0;
        for a in &self.amps {
            acc += a.norm_sqr();
            cdf.push(acc);
        }
        let total = acc;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let last = cdf.len() - 1;
        let bitstrings = (0..shots)
            .map(|_| {
                let u: f64 = rng.random::<f64>() * total;
                // first index whose cumulative probability exceeds u
                let k = cdf.partition_point(|&c| c <= u).min(last);
                Bitstring::from_index(k, self.n_sites)
            })
            .collect();
        Ok(ShotSet::new(self.n_sites, bitstrings, seed))
    }

    /// Multiply by a global phase so the largest-magnitude amplitude (lowest
    /// index on ties) is real and positive.
    pub fn canonicalize_phase(&mut self) {
        let mut best = 0;
        let mut best_mag = -1.0;
        for (i, a) in self.amps.iter().enumerate() {
            let m = a.norm_sqr();
            if m > best_mag * (1.0 + 1e-12) {
                best = i;
                best_mag = m;
            }
        }
        if best_mag > 0.0 {
            let ph = self.amps[best] / self.amps[best].norm();
            let inv = ph.conj();
            self.amps.iter_mut().for_each(|a| *a *= inv);
        }
    }

    fn check_site(&self, site: usize) -> Result<()> {
        if site >= self.n_sites {
            return Err(SimError::Config(format!(
                "site {site} out of range for {} sites",
                self.n_sites
            )));
        }
        Ok(())
    }
}

pub(crate) fn inner_raw(a: &[C64], b: &[C64]) -> C64 {
    a.iter().zip(b).map(|(x, y)| x.conj() * y).sum()
}

fn check_sites(n_sites: usize) -> Result<()> {
    if n_sites == 0 || n_sites > MAX_SITES {
        return Err(SimError::Config(format!(
            "number of sites must be in 1..={MAX_SITES}, got {n_sites}"
        )));
    }
    Ok(())
}

/// Largest entry of `|U^dagger U - I|`.
pub fn unitarity_error<const N: usize>(u: &[[C64; N]; N]) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..N {
        for j in 0..N {
            let mut s = ZERO;
            for k in 0..N {
                s += u[k][i].conj() * u[k][j];
            }
            if i == j {
                s -= ONE;
            }
            worst = worst.max(s.norm());
        }
    }
    worst
}

fn check_unitary2(u: &Mat2) -> Result<()> {
    let e = unitarity_error(u);
    if e > UNITARY_TOL || !e.is_finite() {
        return Err(SimError::Numerical(format!(
            "2x2 matrix is not unitary (error {e:e})"
        )));
    }
    Ok(())
}

fn check_unitary4(u: &Mat4) -> Result<()> {
    let e = unitarity_error(u);
    if e > UNITARY_TOL || !e.is_finite() {
        return Err(SimError::Numerical(format!(
            "4x4 matrix is not unitary (error {e:e})"
        )));
    }
    Ok(())
}

/// Small dense helpers for 2x2 and 4x4 complex matrices.
pub mod mat {
    use super::{Mat2, Mat4, C64, ONE, ZERO};

    pub fn identity<const N: usize>() -> [[C64; N]; N] {
        let mut m = [[ZERO; N]; N];
        for (i, row) in m.iter_mut().enumerate() {
            row[i] = ONE;
        }
        m
    }

    pub fn mul<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> [[C64; N]; N] {
        let mut m = [[ZERO; N]; N];
        for i in 0..N {
            for j in 0..N {
                m[i][j] = (0..N).map(|k| a[i][k] * b[k][j]).sum();
            }
        }
        m
    }

    pub fn dagger<const N: usize>(a: &[[C64; N]; N]) -> [[C64; N]; N] {
        let mut m = [[ZERO; N]; N];
        for i in 0..N {
            for j in 0..N {
                m[i][j] = a[j][i].conj();
            }
        }
        m
    }

    /// `a (x) b` where `a` acts on the first (more significant) local bit.
    pub fn kron(a: &Mat2, b: &Mat2) -> Mat4 {
        let mut m = [[ZERO; 4]; 4];
        for i in 0..4 {
            for j in 0..4 {
                m[i][j] = a[i >> 1][j >> 1] * b[i & 1][j & 1];
            }
        }
        m
    }

    pub fn max_abs_diff<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> f64 {
        let mut worst: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((a[i][j] - b[i][j]).norm());
            }
        }
        worst
    }

    /// Distance between `a` and `b` minimized over a global phase on `b`.
    pub fn phase_distance<const N: usize>(a: &[[C64; N]; N], b: &[[C64; N]; N]) -> f64 {
        let mut ov = ZERO;
        for i in 0..N {
            for j in 0..N {
                ov += b[i][j].conj() * a[i][j];
            }
        }
        let ph = if ov.norm() > 0.0 { ov / ov.norm() } else { ONE };
        let mut worst: f64 = 0.0;
        for i in 0..N {
            for j in 0..N {
                worst = worst.max((a[i][j] - ph * b[i][j]).norm());
            }
        }
        worst
    }

    pub fn scale<const N: usize>(a: &[[C64; N]; N], s: C64) -> [[C64; N]; N] {
        let mut m = *a;
        m.iter_mut().flatten().for_each(|x| *x *= s);
        m
    }

    pub fn diag4(d: [C64; 4]) -> Mat4 {
        let mut m = [[ZERO; 4]; 4];
        for i in 0..4 {
            m[i][i] = d[i];
        }
        m
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn pauli_x() -> Mat2 {
        [[ZERO, ONE], [ONE, ZERO]]
    }

    fn hadamard() -> Mat2 {
        let h = c(FRAC_1_SQRT_2, 0.0);
        [[h, h], [h, -h]]
    }

    #[test]
    fn basis_state_encoding() {
        let s = State::basis(1, &Bitstring::new(vec![0]).unwrap()).unwrap();
        assert_eq!(s.amplitudes(), &[ONE, ZERO]);

        let s = State::basis(3, &Bitstring::new(vec![0, 1, 0]).unwrap()).unwrap();
        assert_eq!(s.amplitudes()[2], ONE);
        assert!((s.norm_sqr() - 1.0).abs() < 1e-15);

        let neel = State::neel(7).unwrap();
        let idx = 0b0101010;
        assert_eq!(neel.amplitudes()[idx], ONE);
        assert_eq!(Bitstring::from_index(idx, 7).to_string(), "0101010");
    }

    #[test]
    fn basis_length_mismatch_is_config_error() {
        let err = State::basis(3, &Bitstring::new(vec![0, 1]).unwrap()).unwrap_err();
        assert!(matches!(err, SimError::Config(_)));
    }

    #[test]
    fn one_qubit_gates() {
        let mut s = State::basis(3, &Bitstring::new(vec![0, 0, 0]).unwrap()).unwrap();
        let before = s.clone();
        s.apply_one_qubit(&mat::identity(), 1).unwrap();
        assert_eq!(s, before);
        s.apply_one_qubit(&pauli_x(), 0).unwrap();
        assert!((s.amplitudes()[1] - ONE).norm() < 1e-15);

        let mut s = State::basis(1, &Bitstring::new(vec![0]).unwrap()).unwrap();
        s.apply_one_qubit(&hadamard(), 0).unwrap();
        assert!(s.expectation_z(0).unwrap().abs() < 1e-15);
    }

    #[test]
    fn non_unitary_rejected() {
        let mut s = State::neel(2).unwrap();
        let bad = [[ONE, ONE], [ZERO, ONE]];
        assert!(matches!(
            s.apply_one_qubit(&bad, 0),
            Err(SimError::Numerical(_))
        ));
    }

    #[test]
    fn two_qubit_swap_and_errors() {
        let swap = {
            let mut m = [[ZERO; 4]; 4];
            m[0][0] = ONE;
            m[1][2] = ONE;
            m[2][1] = ONE;
            m[3][3] = ONE;
            m
        };
        // |10>: site 0 occupied
        let mut s = State::basis(2, &Bitstring::new(vec![1, 0]).unwrap()).unwrap();
        s.apply_two_qubit(&swap, 0, 1).unwrap();
        assert_eq!(s.amplitudes()[0b10], ONE);

        let err = s.apply_two_qubit(&swap, 1, 1).unwrap_err();
        assert!(matches!(err, SimError::Config(_)));

        let mut t = s.clone();
        t.apply_two_qubit(&mat::identity(), 0, 1).unwrap();
        assert_eq!(s, t);
    }

    #[test]
    fn inner_products() {
        let a = State::basis(2, &Bitstring::new(vec![0, 1]).unwrap()).unwrap();
        let b = State::basis(2, &Bitstring::new(vec![1, 0]).unwrap()).unwrap();
        assert!((a.inner(&a).unwrap() - ONE).norm() < 1e-15);
        assert!(a.inner(&b).unwrap().norm() < 1e-15);

        let mut plus = State::basis(1, &Bitstring::new(vec![0]).unwrap()).unwrap();
        plus.apply_one_qubit(&hadamard(), 0).unwrap();
        let zero = State::basis(1, &Bitstring::new(vec![0]).unwrap()).unwrap();
        assert!((plus.inner(&zero).unwrap() - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);

        assert!(matches!(a.inner(&zero), Err(SimError::Dimension { .. })));
    }

    #[test]
    fn expectation_z_values() {
        let zeros = State::basis(4, &Bitstring::new(vec![0; 4]).unwrap()).unwrap();
        for j in 0..4 {
            assert_eq!(zeros.expectation_z(j).unwrap(), 1.0);
        }
        let neel = State::neel(7).unwrap();
        assert_eq!(neel.expectation_z(1).unwrap(), -1.0);
        let h = c(FRAC_1_SQRT_2, 0.0);
        let bell = State::from_amplitudes(2, vec![ZERO, h, h, ZERO]).unwrap();
        assert!(bell.expectation_z(0).unwrap().abs() < 1e-15);
        assert!(neel.expectation_z(7).is_err());
    }

    #[test]
    fn sampling_basis_state_and_determinism() {
        let neel = State::neel(5).unwrap();
        let shots = neel.sample(100, 3).unwrap();
        assert!(shots.shots().iter().all(|b| *b == Bitstring::neel(5)));

        let h = c(FRAC_1_SQRT_2, 0.0);
        let bell = State::from_amplitudes(2, vec![ZERO, h, h, ZERO]).unwrap();
        assert_eq!(bell.sample(500, 9).unwrap(), bell.sample(500, 9).unwrap());
        assert!(bell.sample(0, 9).is_err());
    }

    #[test]
    fn canonical_phase_is_real_positive() {
        let h = c(0.0, FRAC_1_SQRT_2);
        let mut s = State::from_amplitudes(1, vec![h, -h]).unwrap();
        s.canonicalize_phase();
        assert!((s.amplitudes()[0] - c(FRAC_1_SQRT_2, 0.0)).norm() < 1e-15);
    }
}
