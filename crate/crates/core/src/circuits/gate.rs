use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, PI};

use crate::error::{Result, SimError};
use crate::statevector::{mat, Mat2, Mat4, C64, ONE, ZERO};

/// Parameters of the general number-conserving two-qubit gate.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NoiseParams {
    pub theta: f64,
    pub zeta: f64,
    pub chi: f64,
    pub gamma: f64,
    pub phi: f64,
}

impl NoiseParams {
    pub const IDEAL: NoiseParams = NoiseParams {
        theta: FRAC_PI_4,
        zeta: 0.0,
        chi: 0.0,
        gamma: 0.0,
        phi: 0.0,
    };

    pub fn ideal() -> Self {
        Self::IDEAL
    }

    pub fn is_ideal(&self) -> bool {
        *self == Self::IDEAL
    }

    pub fn as_array(&self) -> [f64; 5] {
        [self.theta, self.zeta, self.chi, self.gamma, self.phi]
    }

    pub fn from_array(p: [f64; 5]) -> Self {
        Self {
            theta: p[0],
            zeta: p[1],
            chi: p[2],
            gamma: p[3],
            phi: p[4],
        }
    }
}

impl Default for NoiseParams {
    fn default() -> Self {
        Self::IDEAL
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateKind {
    /// `Z^z Z^a X^x Z^-a`, all exponents in half turns.
    PhasedXZ { a: f64, x: f64, z: f64 },
    /// `exp(-i pi/8 (XX + YY))`, the native entangler.
    SqrtISwapDagger,
    /// `exp(i alpha/2 (XX + YY))`.
    Hopping(f64),
    /// `diag(1, 1, 1, e^{i psi})`.
    CPhase(f64),
    /// `exp(-i lambda Z / 2)`.
    Rz(f64),
    /// `exp(-i lambda X / 2)`.
    Rx(f64),
    /// General number-conserving gate `U(theta, zeta, chi, gamma, phi)`.
    GeneralNC(NoiseParams),
    /// Conjugate transpose of [`GateKind::GeneralNC`]; the noisy native entangler.
    GeneralNCDagger(NoiseParams),
}

impl GateKind {
    pub fn arity(&self) -> usize {
        match self {
            GateKind::PhasedXZ { .. } | GateKind::Rz(_) | GateKind::Rx(_) => 1,
            _ => 2,
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            GateKind::PhasedXZ { .. } => "PhasedXZ",
            GateKind::SqrtISwapDagger => "SqrtISwapDagger",
            GateKind::Hopping(_) => "Hopping",
            GateKind::CPhase(_) => "CPhase",
            GateKind::Rz(_) => "Rz",
            GateKind::Rx(_) => "Rx",
            GateKind::GeneralNC(_) => "GeneralNC",
            GateKind::GeneralNCDagger(_) => "GeneralNCDagger",
        }
    }

    pub fn params(&self) -> Vec<f64> {
        match *self {
            GateKind::PhasedXZ { a, x, z } => vec![a, x, z],
            GateKind::SqrtISwapDagger => vec![],
            GateKind::Hopping(v) | GateKind::CPhase(v) | GateKind::Rz(v) | GateKind::Rx(v) => {
                vec![v]
            }
            GateKind::GeneralNC(p) | GateKind::GeneralNCDagger(p) => p.as_array().to_vec(),
        }
    }

    pub fn from_name_params(name: &str, p: &[f64]) -> Result<Self> {
        let need = |n: usize| -> Result<()> {
            if p.len() == n {
                Ok(())
            } else {
                Err(SimError::Config(format!(
                    "{name} takes {n} parameters, got {}",
                    p.len()
                )))
            }
        };
        let kind = match name {
            "PhasedXZ" => {
                need(3)?;
                GateKind::PhasedXZ {
                    a: p[0],
                    x: p[1],
                    z: p[2],
                }
            }
            "SqrtISwapDagger" => {
                need(0)?;
                GateKind::SqrtISwapDagger
            }
            "Hopping" | "CPhase" | "Rz" | "Rx" => {
                need(1)?;
                match name {
                    "Hopping" => GateKind::Hopping(p[0]),
                    "CPhase" => GateKind::CPhase(p[0]),
                    "Rz" => GateKind::Rz(p[0]),
                    _ => GateKind::Rx(p[0]),
                }
            }
            "GeneralNC" | "GeneralNCDagger" => {
                need(5)?;
                let np = NoiseParams::from_array([p[0], p[1], p[2], p[3], p[4]]);
                if name == "GeneralNC" {
                    GateKind::GeneralNC(np)
                } else {
                    GateKind::GeneralNCDagger(np)
                }
            }
            other => return Err(SimError::UnsupportedGate(other.to_string())),
        };
        Ok(kind)
    }

    /// Native two-qubit entangler, ideal or noisy.
    pub fn is_native_two_qubit(&self) -> bool {
        matches!(
            self,
            GateKind::SqrtISwapDagger | GateKind::GeneralNCDagger(_)
        )
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Sites {
    One(usize),
    Two(usize, usize),
}

impl Sites {
    pub fn contains(&self, site: usize) -> bool {
        match *self {
            Sites::One(a) => a == site,
            Sites::Two(a, b) => a == site || b == site,
        }
    }

    pub fn max(&self) -> usize {
        match *self {
            Sites::One(a) => a,
            Sites::Two(a, b) => a.max(b),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Gate {
    pub kind: GateKind,
    pub sites: Sites,
}

impl Gate {
    pub fn one(kind: GateKind, site: usize) -> Self {
        debug_assert_eq!(kind.arity(), 1);
        Self {
            kind,
            sites: Sites::One(site),
        }
    }

    pub fn two(kind: GateKind, a: usize, b: usize) -> Self {
        debug_assert_eq!(kind.arity(), 2);
        Self {
            kind,
            sites: Sites::Two(a, b),
        }
    }

    pub fn matrix(&self) -> GateMatrix {
        gate_matrix(&self.kind)
    }
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub enum GateMatrix {
    One(Mat2),
    Two(Mat4),
}

fn cis(t: f64) -> C64 {
    C64::from_polar(1.0, t)
}

pub fn rz(lambda: f64) -> Mat2 {
    [[cis(-lambda / 2.0), ZERO], [ZERO, cis(lambda / 2.0)]]
}

pub fn rx(lambda: f64) -> Mat2 {
    let (s, c) = (lambda / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(0.0, -s)],
        [C64::new(0.0, -s), C64::new(c, 0.0)],
    ]
}

pub fn ry(lambda: f64) -> Mat2 {
    let (s, c) = (lambda / 2.0).sin_cos();
    [
        [C64::new(c, 0.0), C64::new(-s, 0.0)],
        [C64::new(s, 0.0), C64::new(c, 0.0)],
    ]
}

/// `Z^t = diag(1, e^{i pi t})`.
pub fn z_pow(t: f64) -> Mat2 {
    [[ONE, ZERO], [ZERO, cis(PI * t)]]
}

/// `X^t = e^{i pi t / 2} Rx(pi t)`.
pub fn x_pow(t: f64) -> Mat2 {
    mat::scale(&rx(PI * t), cis(PI * t / 2.0))
}

pub fn phased_xz(a: f64, x: f64, z: f64) -> Mat2 {
    let m = mat::mul(&z_pow(z), &z_pow(a));
    let m = mat::mul(&m, &x_pow(x));
    mat::mul(&m, &z_pow(-a))
}

pub fn hopping(alpha: f64) -> Mat4 {
    let (s, c) = alpha.sin_cos();
    let mut m = mat::identity::<4>();
    m[1][1] = C64::new(c, 0.0);
    m[2][2] = C64::new(c, 0.0);
    m[1][2] = C64::new(0.0, s);
    m[2][1] = C64::new(0.0, s);
    m
}

pub fn sqrt_iswap_dagger() -> Mat4 {
    let h = FRAC_1_SQRT_2;
    let mut m = mat::identity::<4>();
    m[1][1] = C64::new(h, 0.0);
    m[2][2] = C64::new(h, 0.0);
    m[1][2] = C64::new(0.0, -h);
    m[2][1] = C64::new(0.0, -h);
    m
}

pub fn cphase(psi: f64) -> Mat4 {
    mat::diag4([ONE, ONE, ONE, cis(psi)])
}

/// General number-conserving gate. The off-diagonal block is
/// `i e^{-i(gamma -+ chi)} sin(theta)`, which makes the matrix unitary for all
/// parameters; `general_nc(pi/4, 0, 0, 0, 0)` is the square root of iSWAP.
pub fn general_nc(p: &NoiseParams) -> Mat4 {
    let (s, c) = p.theta.sin_cos();
    let i = C64::new(0.0, 1.0);
    let mut m = [[ZERO; 4]; 4];
    m[0][0] = ONE;
    m[1][1] = cis(-(p.gamma + p.zeta)) * c;
    m[1][2] = i * cis(-(p.gamma - p.chi)) * s;
    m[2][1] = i * cis(-(p.gamma + p.chi)) * s;
    m[2][2] = cis(-(p.gamma - p.zeta)) * c;
    m[3][3] = cis(-(2.0 * p.gamma + p.phi));
    m
}

pub fn gate_matrix(kind: &GateKind) -> GateMatrix {
    match *kind {
        GateKind::PhasedXZ { a, x, z } => GateMatrix::One(phased_xz(a, x, z)),
        GateKind::Rz(l) => GateMatrix::One(rz(l)),
        GateKind::Rx(l) => GateMatrix::One(rx(l)),
        GateKind::SqrtISwapDagger => GateMatrix::Two(sqrt_iswap_dagger()),
        GateKind::Hopping(a) => GateMatrix::Two(hopping(a)),
        GateKind::CPhase(p) => GateMatrix::Two(cphase(p)),
        GateKind::GeneralNC(p) => GateMatrix::Two(general_nc(&p)),
        GateKind::GeneralNCDagger(p) => GateMatrix::Two(mat::dagger(&general_nc(&p))),
    }
}

/// PhasedXZ parameters reproducing `u` up to global phase. Exponents are
/// wrapped into `(-1, 1]`; `a` is zero whenever `x` is.
pub fn to_phased_xz(u: &Mat2) -> (f64, f64, f64) {
    let det = u[0][0] * u[1][1] - u[0][1] * u[1][0];
    let root = det.sqrt();
    let v = [
        [u[0][0] / root, u[0][1] / root],
        [u[1][0] / root, u[1][1] / root],
    ];
    // v = Rz(p) Ry(q) Rz(r)
    let c = v[0][0].norm();
    let s = v[1][0].norm();
    let q = 2.0 * s.atan2(c);
    let sum = if c > 1e-12 { 2.0 * v[1][1].arg() } else { 0.0 };
    let diff = if s > 1e-12 { 2.0 * v[1][0].arg() } else { 0.0 };
    let (p, r) = ((sum + diff) / 2.0, (sum - diff) / 2.0);
    let x = wrap(q / PI);
    if x.abs() < 1e-14 {
        return (0.0, 0.0, wrap((p + r) / PI));
    }
    let a = wrap(0.5 - r / PI);
    let z = wrap((p + r) / PI);
    (a, x, z)
}

/// Wrap a half-turn exponent into `(-1, 1]`.
fn wrap(t: f64) -> f64 {
    let w = t - 2.0 * ((t + 1.0) / 2.0).floor();
    if w <= -1.0 {
        w + 2.0
    } else {
        w
    }
}

pub(crate) const HALF_PI: f64 = FRAC_PI_2;
