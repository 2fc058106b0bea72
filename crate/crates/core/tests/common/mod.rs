//! Slow reference constructions shared by the integration tests.

#![allow(dead_code)]

use nalgebra::DMatrix;
use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sptchain::statevector::{Mat2, Mat4, State};

pub fn c(re: f64, im: f64) -> C {
    C::new(re, im)
}

pub fn bit(i: usize, site: usize) -> usize {
    (i >> site) & 1
}

/// Full-register matrix of a one-site gate, entry by entry.
pub fn embed_one(u: &Mat2, site: usize, n: usize) -> DMatrix<C> {
    let dim = 1 << n;
    DMatrix::from_fn(dim, dim, |i, j| {
        if (i ^ j) & !(1 << site) != 0 {
            c(0.0, 0.0)
        } else {
            u[bit(i, site)][bit(j, site)]
        }
    })
}

/// Full-register matrix of a two-site gate with `a` as the high local bit.
pub fn embed_two(u: &Mat4, a: usize, b: usize, n: usize) -> DMatrix<C> {
    let dim = 1 << n;
    let keep = !((1 << a) | (1 << b));
    DMatrix::from_fn(dim, dim, |i, j| {
        if (i ^ j) & keep != 0 {
            c(0.0, 0.0)
        } else {
            u[2 * bit(i, a) + bit(i, b)][2 * bit(j, a) + bit(j, b)]
        }
    })
}

/// `exp(m)` by scaling, a 30-term Taylor series and squaring.
pub fn expm(m: &DMatrix<C>) -> DMatrix<C> {
    let norm = m.iter().map(|v| v.norm()).sum::<f64>();
    let k = (norm.max(1.0).log2().ceil() as i32 + 4).max(0);
    let scaled = m / c(2f64.powi(k), 0.0);
    let n = m.nrows();
    let mut term = DMatrix::<C>::identity(n, n);
    let mut sum = term.clone();
    for p in 1..30 {
        term = &term * &scaled / c(p as f64, 0.0);
        sum += &term;
    }
    for _ in 0..k {
        sum = &sum * &sum;
    }
    sum
}

pub fn pauli(p: char) -> DMatrix<C> {
    let z = c(0.0, 0.0);
    let o = c(1.0, 0.0);
    let i = c(0.0, 1.0);
    match p {
        'I' => DMatrix::from_row_slice(2, 2, &[o, z, z, o]),
        'X' => DMatrix::from_row_slice(2, 2, &[z, o, o, z]),
        'Y' => DMatrix::from_row_slice(2, 2, &[z, -i, i, z]),
        'Z' => DMatrix::from_row_slice(2, 2, &[o, z, z, -o]),
        _ => unreachable!(),
    }
}

/// Kronecker product of one Pauli per site, site 0 as the rightmost (least significant) factor.
pub fn pauli_string(ops: &[(usize, char)], n: usize) -> DMatrix<C> {
    let mut m = DMatrix::<C>::identity(1, 1);
    for site in (0..n).rev() {
        let p = ops
            .iter()
            .find(|(s, _)| *s == site)
            .map_or('I', |(_, p)| *p);
        m = m.kronecker(&pauli(p));
    }
    m
}

pub fn random_state(n: usize, seed: u64) -> State {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let amps = (0..1 << n)
        .map(|_| c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
        .collect();
    State::normalized(n, amps).unwrap()
}

/// Haar-ish random unitary from a QR decomposition of a complex Gaussian-like matrix.
pub fn random_unitary(n: usize, seed: u64) -> DMatrix<C> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let m = DMatrix::from_fn(n, n, |_, _| {
        c(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5)
    });
    m.qr().q()
}

pub fn to_mat4(m: &DMatrix<C>) -> Mat4 {
    let mut u = [[c(0.0, 0.0); 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            u[i][j] = m[(i, j)];
        }
    }
    u
}

pub fn to_mat2(m: &DMatrix<C>) -> Mat2 {
    [[m[(0, 0)], m[(0, 1)]], [m[(1, 0)], m[(1, 1)]]]
}

pub fn state_vec(s: &State) -> nalgebra::DVector<C> {
    nalgebra::DVector::from_column_slice(s.amplitudes())
}

pub fn max_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - y).norm())
        .fold(0.0, f64::max)
}

/// Distance after removing the best global phase.
pub fn phase_free_diff(a: &DMatrix<C>, b: &DMatrix<C>) -> f64 {
    let ov: C = a.iter().zip(b.iter()).map(|(x, y)| y.conj() * x).sum();
    let ph = if ov.norm() > 0.0 {
        ov / ov.norm()
    } else {
        c(1.0, 0.0)
    };
    a.iter()
        .zip(b.iter())
        .map(|(x, y)| (x - ph * y).norm())
        .fold(0.0, f64::max)
}
