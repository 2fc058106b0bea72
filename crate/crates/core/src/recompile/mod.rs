//! Fitting a shallow brick-layer circuit of native gates to each state along
//! the preparation trajectory.

mod lbfgs;

pub use lbfgs::{minimize, LbfgsOptions, LbfgsResult};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::circuits::{
    asp_states, phased_xz, sqrt_iswap_dagger, x_pow, z_pow, Circuit, Gate, GateKind, Schedule,
    Sites,
};
use crate::error::{Result, SimError};
use crate::model::{CouplingParams, PhasePreset};
use crate::statevector::{inner_raw, mat, Mat2, State, C64, ZERO};

/// Which PhasedXZ parameters the optimizer may move.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum AnsatzMode {
    /// All of `(a, x, z)`.
    #[default]
    Full,
    /// Only `z`; `a` and `x` stay at zero so every gate conserves the number of ones.
    NumberConserving,
}

impl std::str::FromStr for AnsatzMode {
    type Err = SimError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "full" => Ok(AnsatzMode::Full),
            "number-conserving" | "number_conserving" => Ok(AnsatzMode::NumberConserving),
            other => Err(SimError::Config(format!(
                "unknown ansatz mode {other:?} (full, number-conserving)"
            ))),
        }
    }
}

impl AnsatzMode {
    pub fn as_str(self) -> &'static str {
        match self {
            AnsatzMode::Full => "full",
            AnsatzMode::NumberConserving => "number-conserving",
        }
    }
}

/// `m_rounds` rounds of (PhasedXZ on every site, entanglers on even bonds, then
/// odd bonds), closed by a final PhasedXZ layer.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct AnsatzSpec {
    pub n_sites: usize,
    pub m_rounds: usize,
    pub mode: AnsatzMode,
}

impl AnsatzSpec {
    pub fn new(n_sites: usize, m_rounds: usize) -> Result<Self> {
        Self::with_mode(n_sites, m_rounds, AnsatzMode::Full)
    }

    pub fn with_mode(n_sites: usize, m_rounds: usize, mode: AnsatzMode) -> Result<Self> {
        if m_rounds == 0 {
            return Err(SimError::Config("ansatz needs at least one round".into()));
        }
        if n_sites < 2 {
            return Err(SimError::Config(format!(
                "ansatz needs at least 2 sites, got {n_sites}"
            )));
        }
        Ok(Self {
            n_sites,
            m_rounds,
            mode,
        })
    }

    pub fn two_qubit_count(&self) -> usize {
        (self.n_sites - 1) * self.m_rounds
    }

    pub fn single_qubit_count(&self) -> usize {
        self.n_sites * (self.m_rounds + 1)
    }

    pub fn n_params(&self) -> usize {
        3 * self.single_qubit_count()
    }

    /// Entangler bonds of one round, even bonds first.
    pub fn bonds(&self) -> Vec<(usize, usize)> {
        let l = self.n_sites;
        (0..l - 1)
            .step_by(2)
            .chain((1..l - 1).step_by(2))
            .map(|k| (k, k + 1))
            .collect()
    }

    /// `true` for every parameter the optimizer may change.
    pub fn free_mask(&self) -> Vec<bool> {
        (0..self.n_params())
            .map(|i| match self.mode {
                AnsatzMode::Full => true,
                AnsatzMode::NumberConserving => i % 3 == 2,
            })
            .collect()
    }

    fn check(&self, params: &ParamVector) -> Result<()> {
        if params.values.len() != self.n_params() {
            return Err(SimError::Dimension {
                expected: self.n_params(),
                got: params.values.len(),
            });
        }
        Ok(())
    }

    pub fn to_circuit(&self, params: &ParamVector) -> Result<Circuit> {
        self.check(params)?;
        let mut c = Circuit::new(self.n_sites);
        let bonds = self.bonds();
        for r in 0..=self.m_rounds {
            for k in 0..self.n_sites {
                let (a, x, z) = params.triple(self, r, k);
                c.push(Gate::one(GateKind::PhasedXZ { a, x, z }, k))?;
            }
            if r < self.m_rounds {
                for &(a, b) in &bonds {
                    c.push(Gate::two(GateKind::SqrtISwapDagger, a, b))?;
                }
            }
        }
        Ok(c)
    }
}

/// One `(a, x, z)` triple per PhasedXZ gate, layer by layer, site 0 first.
#[derive(Clone, Debug, PartialEq)]
pub struct ParamVector {
    pub values: Vec<f64>,
}

impl ParamVector {
    pub fn zeros(spec: &AnsatzSpec) -> Self {
        Self {
            values: vec![0.0; spec.n_params()],
        }
    }

    /// Parameters whose circuit maps the alternating state to itself exactly:
    /// `x = 1` on odd sites in the first and last layers turns `|0101..>` into
    /// `|00..0>`, which every entangler leaves alone, and back.
    pub fn neel_echo(spec: &AnsatzSpec) -> Self {
        let mut p = Self::zeros(spec);
        for r in [0, spec.m_rounds] {
            for k in (1..spec.n_sites).step_by(2) {
                p.values[3 * (r * spec.n_sites + k) + 1] = 1.0;
            }
        }
        p
    }

    /// Uniform noise of half-width `scale` added to the free parameters.
    pub fn perturbed(&self, spec: &AnsatzSpec, scale: f64, rng: &mut ChaCha8Rng) -> Self {
        let mask = spec.free_mask();
        let values = self
            .values
            .iter()
            .zip(mask)
            .map(|(&v, free)| {
                if free && scale > 0.0 {
                    v + rng.random_range(-scale..=scale)
                } else {
                    v
                }
            })
            .collect();
        Self { values }
    }

    pub fn triple(&self, spec: &AnsatzSpec, layer: usize, site: usize) -> (f64, f64, f64) {
        let i = 3 * (layer * spec.n_sites + site);
        (self.values[i], self.values[i + 1], self.values[i + 2])
    }

    /// Recover parameters from a circuit laid out by [`AnsatzSpec::to_circuit`].
    pub fn from_circuit(spec: &AnsatzSpec, c: &Circuit) -> Result<Self> {
        let layout = spec.to_circuit(&Self::zeros(spec))?;
        if c.n_sites() != spec.n_sites || c.len() != layout.len() {
            return Err(SimError::Config(
                "circuit does not match the ansatz layout".into(),
            ));
        }
        let mut values = Vec::with_capacity(spec.n_params());
        for (g, expect) in c.gates().iter().zip(layout.gates()) {
            if g.sites != expect.sites {
                return Err(SimError::Config(
                    "circuit does not match the ansatz layout".into(),
                ));
            }
            match (g.kind, expect.kind) {
                (GateKind::PhasedXZ { a, x, z }, GateKind::PhasedXZ { .. }) => {
                    values.extend([a, x, z])
                }
                (GateKind::SqrtISwapDagger, GateKind::SqrtISwapDagger) => {}
                _ => {
                    return Err(SimError::Config(
                        "circuit does not match the ansatz layout".into(),
                    ))
                }
            }
        }
        Ok(Self { values })
    }
}

enum Op {
    One { site: usize, param: usize },
    Two { a: usize, b: usize },
}

fn ops(spec: &AnsatzSpec) -> Vec<Op> {
    let bonds = spec.bonds();
    let mut out = Vec::with_capacity(spec.single_qubit_count() + spec.two_qubit_count());
    for r in 0..=spec.m_rounds {
        for k in 0..spec.n_sites {
            out.push(Op::One {
                site: k,
                param: 3 * (r * spec.n_sites + k),
            });
        }
        if r < spec.m_rounds {
            out.extend(bonds.iter().map(|&(a, b)| Op::Two { a, b }));
        }
    }
    out
}

fn check_states(spec: &AnsatzSpec, target: &State, initial: &State) -> Result<()> {
    for s in [target, initial] {
        if s.n_sites() != spec.n_sites {
            return Err(SimError::Dimension {
                expected: spec.n_sites,
                got: s.n_sites(),
            });
        }
    }
    Ok(())
}

/// `1 - |<target| U(params) |initial>|^2`, clamped to `[0, 1]`.
pub fn infidelity(
    spec: &AnsatzSpec,
    params: &ParamVector,
    target: &State,
    initial: &State,
) -> Result<f64> {
    check_states(spec, target, initial)?;
    let out = crate::circuits::simulate(&spec.to_circuit(params)?, initial)?;
    Ok((1.0 - target.fidelity(&out)?).clamp(0.0, 1.0))
}

/// `sum_{i,j,rest} conj(chi[i,rest]) M_ij phi[j,rest]` is `sum_ij M_ij R_ij`.
fn reduced(chi: &State, phi: &State, site: usize) -> Mat2 {
    let mut r = [[ZERO; 2]; 2];
    let mask = 1usize << site;
    let (c, p) = (chi.amplitudes(), phi.amplitudes());
    for i in 0..c.len() {
        if i & mask == 0 {
            let j = i | mask;
            let (c0, c1) = (c[i].conj(), c[j].conj());
            r[0][0] += c0 * p[i];
            r[0][1] += c0 * p[j];
            r[1][0] += c1 * p[i];
            r[1][1] += c1 * p[j];
        }
    }
    r
}

fn contract(m: &Mat2, r: &Mat2) -> C64 {
    m[0][0] * r[0][0] + m[0][1] * r[0][1] + m[1][0] * r[1][0] + m[1][1] * r[1][1]
}

/// Derivatives of the PhasedXZ matrix with respect to `(a, x, z)`.
fn phased_xz_derivatives(a: f64, x: f64, z: f64) -> [Mat2; 3] {
    let ipi = C64::new(0.0, std::f64::consts::PI);
    let g = [[ZERO, ZERO], [ZERO, ipi]];
    let za = z_pow(a);
    let zma = z_pow(-a);
    let zz = z_pow(z);
    let w = mat::mul(&mat::mul(&za, &x_pow(x)), &zma);
    let comm = {
        let gw = mat::mul(&g, &w);
        let wg = mat::mul(&w, &g);
        [
            [gw[0][0] - wg[0][0], gw[0][1] - wg[0][1]],
            [gw[1][0] - wg[1][0], gw[1][1] - wg[1][1]],
        ]
    };
    let da = mat::mul(&zz, &comm);
    let e = C64::from_polar(1.0, std::f64::consts::PI * x) * ipi / 2.0;
    let dxp = [[e, -e], [-e, e]];
    let dx = mat::mul(&mat::mul(&zz, &za), &mat::mul(&dxp, &zma));
    let dz = mat::mul(&g, &mat::mul(&zz, &w));
    [da, dx, dz]
}

/// Infidelity and its gradient by one forward and one reverse sweep.
/// Frozen parameters get a zero gradient.
pub fn infidelity_and_gradient(
    spec: &AnsatzSpec,
    params: &ParamVector,
    target: &State,
    initial: &State,
) -> Result<(f64, Vec<f64>)> {
    spec.check(params)?;
    check_states(spec, target, initial)?;
    let ops = ops(spec);
    let s = sqrt_iswap_dagger();
    let s_dag = mat::dagger(&s);
    let mats: Vec<Mat2> = ops
        .iter()
        .map(|op| match *op {
            Op::One { param, .. } => {
                let v = &params.values[param..param + 3];
                phased_xz(v[0], v[1], v[2])
            }
            Op::Two { .. } => [[ZERO; 2]; 2],
        })
        .collect();

    let mut phi = initial.clone();
    for (op, m) in ops.iter().zip(&mats) {
        match *op {
            Op::One { site, .. } => phi.apply_one_unchecked(m, site),
            Op::Two { a, b } => phi.apply_two_unchecked(&s, a, b),
        }
    }
    let overlap = inner_raw(target.amplitudes(), phi.amplitudes());
    let f = (1.0 - overlap.norm_sqr()).clamp(0.0, 1.0);

    let mask = spec.free_mask();
    let mut grad = vec![0.0; spec.n_params()];
    let mut chi = target.clone();
    for (op, m) in ops.iter().zip(&mats).rev() {
        match *op {
            Op::Two { a, b } => {
                phi.apply_two_unchecked(&s_dag, a, b);
                chi.apply_two_unchecked(&s_dag, a, b);
            }
            Op::One { site, param } => {
                let md = mat::dagger(m);
                phi.apply_one_unchecked(&md, site);
                let r = reduced(&chi, &phi, site);
                let v = &params.values[param..param + 3];
                let ders = phased_xz_derivatives(v[0], v[1], v[2]);
                for (k, d) in ders.iter().enumerate() {
                    if mask[param + k] {
                        grad[param + k] = -2.0 * (overlap.conj() * contract(d, &r)).re;
                    }
                }
                chi.apply_one_unchecked(&md, site);
            }
        }
    }
    Ok((f, grad))
}

const FIRST_POINT_TOLERANCE: f64 = 1e-8;
const FIRST_POINT_MAX_ITERS: usize = 3000;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct OptimizeOptions {
    pub max_iters: usize,
    /// Stop once the infidelity is below this value.
    pub tolerance: f64,
    pub n_restarts: usize,
    pub seed: u64,
    /// Half-width of the seeded noise on a cold start, in half turns.
    pub init_scale: f64,
    /// Half-width of the kick applied to restarts after the first, in half turns.
    pub restart_scale: f64,
}

impl Default for OptimizeOptions {
    fn default() -> Self {
        Self {
            max_iters: 500,
            tolerance: 1e-4,
            n_restarts: 3,
            seed: 0,
            init_scale: 0.01,
            restart_scale: 0.1,
        }
    }
}

impl OptimizeOptions {
    fn validate(&self) -> Result<()> {
        if self.n_restarts == 0 || self.max_iters == 0 || !(self.tolerance >= 0.0) {
            return Err(SimError::Config(
                "optimizer needs n_restarts >= 1, max_iters >= 1, tolerance >= 0".into(),
            ));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct OptimizeResult {
    pub params: ParamVector,
    pub infidelity: f64,
    /// Whether `infidelity < tolerance` was reached.
    pub converged: bool,
    /// L-BFGS iterations of the returned restart.
    pub iterations: usize,
    /// L-BFGS iterations summed over all restarts.
    pub total_iterations: usize,
}

fn rng_for(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn run_one(
    spec: &AnsatzSpec,
    target: &State,
    initial: &State,
    start: ParamVector,
    opts: &OptimizeOptions,
) -> Result<(ParamVector, f64, usize)> {
    let lopts = LbfgsOptions {
        max_iters: opts.max_iters,
        f_target: opts.tolerance,
        g_tol: 1e-12,
        memory: 20,
    };
    let mut failure = None;
    let r = minimize(
        |x| {
            let p = ParamVector { values: x.to_vec() };
            match infidelity_and_gradient(spec, &p, target, initial) {
                Ok(v) => v,
                Err(e) => {
                    failure.get_or_insert(e);
                    (f64::INFINITY, vec![0.0; x.len()])
                }
            }
        },
        start.values,
        &lopts,
    );
    if let Some(e) = failure {
        return Err(e);
    }
    Ok((ParamVector { values: r.x }, r.f, r.iterations))
}

/// Best of `n_restarts` L-BFGS runs. The first starts at `start`; the others
/// start from seeded kicks of it and run only if the first misses the tolerance.
pub fn optimize_from(
    spec: &AnsatzSpec,
    target: &State,
    initial: &State,
    start: &ParamVector,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult> {
    opts.validate()?;
    spec.check(start)?;
    check_states(spec, target, initial)?;
    let (p0, f0, it0) = run_one(spec, target, initial, start.clone(), opts)?;
    let mut best = OptimizeResult {
        params: p0,
        infidelity: f0,
        converged: f0 < opts.tolerance,
        iterations: it0,
        total_iterations: it0,
    };
    if best.converged || opts.n_restarts == 1 {
        return Ok(best);
    }
    let others: Vec<(ParamVector, f64, usize)> = (1..opts.n_restarts)
        .into_par_iter()
        .map(|k| {
            let mut rng = rng_for(opts.seed, k as u64);
            let kicked = start.perturbed(spec, opts.restart_scale, &mut rng);
            run_one(spec, target, initial, kicked, opts)
        })
        .collect::<Result<_>>()?;
    for (p, f, it) in others {
        best.total_iterations += it;
        if f < best.infidelity {
            best.params = p;
            best.infidelity = f;
            best.iterations = it;
        }
    }
    best.converged = best.infidelity < opts.tolerance;
    Ok(best)
}

/// Cold start: zero angles plus seeded noise of half-width `init_scale`.
pub fn optimize(
    spec: &AnsatzSpec,
    target: &State,
    initial: &State,
    opts: &OptimizeOptions,
) -> Result<OptimizeResult> {
    let mut rng = rng_for(opts.seed, 0);
    let start = ParamVector::zeros(spec).perturbed(spec, opts.init_scale, &mut rng);
    optimize_from(spec, target, initial, &start, opts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct TrajectoryPoint {
    pub s: f64,
    pub params: ParamVector,
    pub infidelity: f64,
    pub converged: bool,
    pub iterations: usize,
}

/// How each trajectory point is initialized.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Default)]
pub enum StartStrategy {
    /// The first point starts cold and is solved to a tighter tolerance; each
    /// later point starts from the previous solution. Points run in order.
    #[default]
    Warm,
    /// Every point starts cold; points run in parallel.
    Cold,
}

/// Fit the ansatz, applied to the alternating state, to the Trotterized
/// preparation state at every step boundary.
pub fn recompile_trajectory_with(
    params: &CouplingParams,
    schedule: &Schedule,
    spec: &AnsatzSpec,
    opts: &OptimizeOptions,
    strategy: StartStrategy,
) -> Result<Vec<TrajectoryPoint>> {
    let targets = asp_states(params, schedule, spec.n_sites)?;
    let initial = State::neel(spec.n_sites)?;
    let boundaries = schedule.boundaries();
    let point = |s: f64, r: OptimizeResult| TrajectoryPoint {
        s,
        params: r.params,
        infidelity: r.infidelity,
        converged: r.converged,
        iterations: r.iterations,
    };
    match strategy {
        StartStrategy::Cold => targets
            .par_iter()
            .zip(boundaries.par_iter())
            .enumerate()
            .map(|(m, (t, &s))| {
                let o = OptimizeOptions {
                    seed: opts.seed.wrapping_add(m as u64),
                    ..*opts
                };
                Ok(point(s, optimize(spec, t, &initial, &o)?))
            })
            .collect(),
        StartStrategy::Warm => {
            let mut out: Vec<TrajectoryPoint> = Vec::with_capacity(targets.len());
            for (m, (t, &s)) in targets.iter().zip(&boundaries).enumerate() {
                let o = OptimizeOptions {
                    seed: opts.seed.wrapping_add(m as u64),
                    ..*opts
                };
                let r = match out.last() {
                    Some(prev) => optimize_from(spec, t, &initial, &prev.params, &o)?,
                    None => optimize(spec, t, &initial, &first_point_options(&o))?,
                };
                out.push(point(s, r));
            }
            Ok(out)
        }
    }
}

/// The first point seeds the whole chain, so it is solved more tightly.
fn first_point_options(opts: &OptimizeOptions) -> OptimizeOptions {
    OptimizeOptions {
        tolerance: opts.tolerance.min(FIRST_POINT_TOLERANCE),
        max_iters: opts.max_iters.max(FIRST_POINT_MAX_ITERS),
        ..*opts
    }
}

pub fn recompile_trajectory(
    preset: &PhasePreset,
    n_sites: usize,
    m_rounds: usize,
    opts: &OptimizeOptions,
) -> Result<Vec<TrajectoryPoint>> {
    let spec = AnsatzSpec::new(n_sites, m_rounds)?;
    recompile_trajectory_with(
        &preset.params,
        &Schedule::of(preset)?,
        &spec,
        opts,
        StartStrategy::Warm,
    )
}

/// Whether `sites` belongs to the ansatz layout; used when validating parsed circuits.
pub fn is_entangler_bond(spec: &AnsatzSpec, sites: Sites) -> bool {
    matches!(sites, Sites::Two(a, b) if b == a + 1 && b < spec.n_sites)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::statevector::Bitstring;

    fn random_state(n: usize, seed: u64) -> State {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let amps = (0..1 << n)
            .map(|_| C64::new(rng.random::<f64>() - 0.5, rng.random::<f64>() - 0.5))
            .collect();
        State::normalized(n, amps).unwrap()
    }

    #[test]
    fn gate_counts() {
        for (l, n2) in [(7, 30), (9, 40), (11, 50)] {
            let s = AnsatzSpec::new(l, 5).unwrap();
            assert_eq!(s.two_qubit_count(), n2);
            assert_eq!(
                s.to_circuit(&ParamVector::zeros(&s))
                    .unwrap()
                    .two_qubit_count(),
                n2
            );
        }
        let s = AnsatzSpec::new(2, 1).unwrap();
        assert_eq!((s.two_qubit_count(), s.single_qubit_count()), (1, 4));
        assert_eq!(s.n_params(), 12);
        assert!(AnsatzSpec::new(5, 0).is_err());
    }

    #[test]
    fn neel_echo_is_exact() {
        let spec = AnsatzSpec::new(7, 5).unwrap();
        let neel = State::neel(7).unwrap();
        let f = infidelity(&spec, &ParamVector::neel_echo(&spec), &neel, &neel).unwrap();
        assert!(f < 1e-14);
    }

    #[test]
    fn infidelity_extremes() {
        let spec = AnsatzSpec::new(3, 1).unwrap();
        let neel = State::neel(3).unwrap();
        let other = State::basis(3, &Bitstring::new(vec![1, 1, 1]).unwrap()).unwrap();
        let f = infidelity(&spec, &ParamVector::zeros(&spec), &other, &neel).unwrap();
        assert!((f - 1.0).abs() < 1e-14);
    }

    #[test]
    fn gradient_matches_finite_differences() {
        let spec = AnsatzSpec::new(4, 2).unwrap();
        let target = random_state(4, 1);
        let initial = random_state(4, 2);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let p = ParamVector::zeros(&spec).perturbed(&spec, 1.0, &mut rng);
        let (f, g) = infidelity_and_gradient(&spec, &p, &target, &initial).unwrap();
        assert!((f - infidelity(&spec, &p, &target, &initial).unwrap()).abs() < 1e-12);
        let h = 1e-6;
        for i in 0..spec.n_params() {
            let mut up = p.clone();
            up.values[i] += h;
            let mut dn = p.clone();
            dn.values[i] -= h;
            let fd = (infidelity(&spec, &up, &target, &initial).unwrap()
                - infidelity(&spec, &dn, &target, &initial).unwrap())
                / (2.0 * h);
            assert!(
                (fd - g[i]).abs() < 1e-7 * (1.0 + g[i].abs()),
                "param {i}: {fd} vs {}",
                g[i]
            );
        }
    }

    #[test]
    fn number_conserving_mask() {
        let spec = AnsatzSpec::with_mode(3, 1, AnsatzMode::NumberConserving).unwrap();
        let target = random_state(3, 5);
        let initial = State::neel(3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let p = ParamVector::zeros(&spec).perturbed(&spec, 0.5, &mut rng);
        assert!(p
            .values
            .iter()
            .enumerate()
            .all(|(i, v)| i % 3 == 2 || *v == 0.0));
        let (_, g) = infidelity_and_gradient(&spec, &p, &target, &initial).unwrap();
        assert!(g.iter().enumerate().all(|(i, v)| i % 3 == 2 || *v == 0.0));
    }

    #[test]
    fn circuit_round_trip() {
        let spec = AnsatzSpec::new(5, 2).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let p = ParamVector::zeros(&spec).perturbed(&spec, 1.0, &mut rng);
        let c = spec.to_circuit(&p).unwrap();
        let back = Circuit::from_text(&c.to_text()).unwrap();
        assert_eq!(ParamVector::from_circuit(&spec, &back).unwrap(), p);
    }
}
