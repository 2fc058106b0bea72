//! C interface to the `sptchain` simulator.
//!
//! Objects cross the boundary as opaque handles that the caller releases with
//! the matching `*_free` function. Every fallible call returns an [`SptStatus`];
//! on failure [`spt_last_error`] describes what went wrong on the calling thread.
//! Output pointers are written only on success.
//!
//! # Safety
//!
//! Every pointer argument must be null or valid for the access its type
//! implies: handles must come from this library and not yet be freed, strings
//! must be NUL-terminated, and buffers must hold at least the stated length.
//! Null is reported as an error wherever an argument is required.

#![allow(clippy::missing_safety_doc)]

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use sptchain::circuits::{asp_circuit, simulate, Circuit};
use sptchain::model::{ground_state, hamiltonian_at, neel_sector, PhasePreset, PresetName};
use sptchain::observables::{
    post_select, string_order_exact, string_order_shots, ShotSet, StringOrderSpec,
};
use sptchain::statevector::{Bitstring, State};
use sptchain::SimError;

/// Statevector of a chain.
pub struct SptState(State);

/// Gate sequence on a chain.
pub struct SptCircuit(Circuit);

/// Measured bitstrings.
pub struct SptShots(ShotSet);

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SptStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Numerical = 4,
    Schedule = 5,
    Dimension = 6,
    Resource = 7,
    UnsupportedGate = 8,
    EmptyShots = 9,
    Parse = 10,
    Io = 11,
    Panic = 12,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

struct Failure(SptStatus, String);

impl From<SimError> for Failure {
    fn from(e: SimError) -> Self {
        let status = match e {
            SimError::Config(_) => SptStatus::Config,
            SimError::Numerical(_) => SptStatus::Numerical,
            SimError::Schedule(_) => SptStatus::Schedule,
            SimError::Dimension { .. } => SptStatus::Dimension,
            SimError::Resource(_) => SptStatus::Resource,
            SimError::UnsupportedGate(_) => SptStatus::UnsupportedGate,
            SimError::EmptyShots(_) => SptStatus::EmptyShots,
            SimError::Parse { .. } => SptStatus::Parse,
            SimError::Io(_) => SptStatus::Io,
        };
        Failure(status, e.to_string())
    }
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> SptStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            SptStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            SptStatus::Panic
        }
    }
}

unsafe fn get<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(SptStatus::NullPointer, format!("{what} is null")))
}

unsafe fn put<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            SptStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn put_value<T>(out: *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(
            SptStatus::NullPointer,
            "output pointer is null".into(),
        ));
    }
    *out = value;
    Ok(())
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(SptStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(SptStatus::InvalidUtf8, format!("{what} is not UTF-8")))
}

fn preset(name: &str) -> Result<PhasePreset, Failure> {
    Ok(PhasePreset::get(name.parse::<PresetName>()?))
}

/// Message for the last failed call on this thread; empty after a success.
/// The pointer stays valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn spt_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Release a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn spt_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Computational basis state; `bits[k]` is 0 or 1 for site `k`.
#[no_mangle]
pub unsafe extern "C" fn spt_state_basis(
    bits: *const u8,
    n_sites: usize,
    out: *mut *mut SptState,
) -> SptStatus {
    guard(|| {
        if bits.is_null() {
            return Err(Failure(SptStatus::NullPointer, "bits is null".into()));
        }
        let b = Bitstring::new(std::slice::from_raw_parts(bits, n_sites).to_vec())?;
        put(out, SptState(State::basis(n_sites, &b)?))
    })
}

/// The alternating state `|0101...0>`.
#[no_mangle]
pub unsafe extern "C" fn spt_state_neel(n_sites: usize, out: *mut *mut SptState) -> SptStatus {
    guard(|| put(out, SptState(State::neel(n_sites)?)))
}

/// Ground state of the interpolated Hamiltonian at `s` for a named preset
/// (`"ed"`, `"sd"` or `"ed-supplement"`), restricted to the alternating-state
/// magnetization sector. Writes the energy when `energy` is not null.
#[no_mangle]
pub unsafe extern "C" fn spt_state_ground(
    preset_name: *const c_char,
    n_sites: usize,
    s: f64,
    energy: *mut f64,
    out: *mut *mut SptState,
) -> SptStatus {
    guard(|| {
        let p = preset(text(preset_name, "preset name")?)?;
        let (e, st) = ground_state(
            &hamiltonian_at(&p.params, n_sites, s)?,
            Some(neel_sector(n_sites)),
        )?;
        if !energy.is_null() {
            *energy = e;
        }
        put(out, SptState(st))
    })
}

#[no_mangle]
pub unsafe extern "C" fn spt_state_free(state: *mut SptState) {
    if !state.is_null() {
        drop(Box::from_raw(state));
    }
}

/// Number of sites, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn spt_state_n_sites(state: *const SptState) -> usize {
    state.as_ref().map_or(0, |s| s.0.n_sites())
}

/// Copy the `2^n` amplitudes into `re` and `im`, each of length `len`.
#[no_mangle]
pub unsafe extern "C" fn spt_state_amplitudes(
    state: *const SptState,
    re: *mut f64,
    im: *mut f64,
    len: usize,
) -> SptStatus {
    guard(|| {
        let st = get(state, "state")?;
        if re.is_null() || im.is_null() {
            return Err(Failure(
                SptStatus::NullPointer,
                "amplitude buffer is null".into(),
            ));
        }
        let amps = st.0.amplitudes();
        if len != amps.len() {
            return Err(SimError::Dimension {
                expected: amps.len(),
                got: len,
            }
            .into());
        }
        let (re, im) = (
            std::slice::from_raw_parts_mut(re, len),
            std::slice::from_raw_parts_mut(im, len),
        );
        for (k, a) in amps.iter().enumerate() {
            re[k] = a.re;
            im[k] = a.im;
        }
        Ok(())
    })
}

/// `|<a|b>|^2`.
#[no_mangle]
pub unsafe extern "C" fn spt_state_fidelity(
    a: *const SptState,
    b: *const SptState,
    out: *mut f64,
) -> SptStatus {
    guard(|| put_value(out, get(a, "state a")?.0.fidelity(&get(b, "state b")?.0)?))
}

/// Preparation circuit of a named preset from `|00...0>`: the alternating-state
/// layer followed by the first `upto_step` Trotter steps.
#[no_mangle]
pub unsafe extern "C" fn spt_circuit_asp(
    preset_name: *const c_char,
    n_sites: usize,
    upto_step: usize,
    out: *mut *mut SptCircuit,
) -> SptStatus {
    guard(|| {
        let p = preset(text(preset_name, "preset name")?)?;
        put(out, SptCircuit(asp_circuit(&p, n_sites, upto_step)?))
    })
}

/// Parse the line-oriented circuit text format.
#[no_mangle]
pub unsafe extern "C" fn spt_circuit_parse(
    source: *const c_char,
    out: *mut *mut SptCircuit,
) -> SptStatus {
    guard(|| {
        put(
            out,
            SptCircuit(Circuit::from_text(text(source, "circuit text")?)?),
        )
    })
}

/// Serialize a circuit; release the result with [`spt_string_free`].
#[no_mangle]
pub unsafe extern "C" fn spt_circuit_to_text(
    circuit: *const SptCircuit,
    out: *mut *mut c_char,
) -> SptStatus {
    guard(|| {
        let s = CString::new(get(circuit, "circuit")?.0.to_text()).map_err(|_| {
            Failure(
                SptStatus::InvalidUtf8,
                "circuit text contains a NUL byte".into(),
            )
        })?;
        put_value(out, s.into_raw())
    })
}

#[no_mangle]
pub unsafe extern "C" fn spt_circuit_free(circuit: *mut SptCircuit) {
    if !circuit.is_null() {
        drop(Box::from_raw(circuit));
    }
}

/// Number of gates, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn spt_circuit_len(circuit: *const SptCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.0.len())
}

#[no_mangle]
pub unsafe extern "C" fn spt_circuit_two_qubit_count(circuit: *const SptCircuit) -> usize {
    circuit.as_ref().map_or(0, |c| c.0.two_qubit_count())
}

/// Apply `circuit` to a copy of `initial`.
#[no_mangle]
pub unsafe extern "C" fn spt_simulate(
    circuit: *const SptCircuit,
    initial: *const SptState,
    out: *mut *mut SptState,
) -> SptStatus {
    guard(|| {
        put(
            out,
            SptState(simulate(
                &get(circuit, "circuit")?.0,
                &get(initial, "state")?.0,
            )?),
        )
    })
}

/// Draw `shots` bitstrings; the same seed gives the same shots.
#[no_mangle]
pub unsafe extern "C" fn spt_sample(
    state: *const SptState,
    shots: usize,
    seed: u64,
    out: *mut *mut SptShots,
) -> SptStatus {
    guard(|| put(out, SptShots(get(state, "state")?.0.sample(shots, seed)?)))
}

/// Keep only shots whose total `sum_k z_k` equals `target_sz`.
#[no_mangle]
pub unsafe extern "C" fn spt_shots_post_select(
    shots: *const SptShots,
    target_sz: i32,
    out: *mut *mut SptShots,
) -> SptStatus {
    guard(|| {
        put(
            out,
            SptShots(post_select(&get(shots, "shots")?.0, target_sz)),
        )
    })
}

#[no_mangle]
pub unsafe extern "C" fn spt_shots_free(shots: *mut SptShots) {
    if !shots.is_null() {
        drop(Box::from_raw(shots));
    }
}

/// Number of shots, or 0 for a null handle.
#[no_mangle]
pub unsafe extern "C" fn spt_shots_len(shots: *const SptShots) -> usize {
    shots.as_ref().map_or(0, |s| s.0.len())
}

/// Fraction of the originally drawn shots still present.
#[no_mangle]
pub unsafe extern "C" fn spt_shots_retention(shots: *const SptShots) -> f64 {
    shots.as_ref().map_or(0.0, |s| s.0.retention())
}

/// Signed exact string order `O_z^n` of a state.
#[no_mangle]
pub unsafe extern "C" fn spt_string_order_exact(
    state: *const SptState,
    n: usize,
    out: *mut f64,
) -> SptStatus {
    guard(|| {
        let st = &get(state, "state")?.0;
        put_value(
            out,
            string_order_exact(st, &StringOrderSpec::new(n, st.n_sites())?)?,
        )
    })
}

/// Signed shot estimate of `O_z^n`.
#[no_mangle]
pub unsafe extern "C" fn spt_string_order_shots(
    shots: *const SptShots,
    n: usize,
    out: *mut f64,
) -> SptStatus {
    guard(|| {
        let sh = &get(shots, "shots")?.0;
        put_value(
            out,
            string_order_shots(sh, &StringOrderSpec::new(n, sh.n_sites())?)?,
        )
    })
}
