use std::ffi::{c_char, CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use sptchain_ffi::*;

fn last_error() -> String {
    unsafe { CStr::from_ptr(spt_last_error()) }
        .to_string_lossy()
        .into_owned()
}

#[test]
fn ground_state_string_order_through_handles() {
    let name = CString::new("ed").unwrap();
    let mut gs: *mut SptState = ptr::null_mut();
    let mut energy = 0.0;
    unsafe {
        assert_eq!(
            spt_state_ground(name.as_ptr(), 11, 1.0, &mut energy, &mut gs),
            SptStatus::Ok
        );
        assert_eq!(spt_state_n_sites(gs), 11);
        let mut o1 = 0.0;
        assert_eq!(spt_string_order_exact(gs, 1, &mut o1), SptStatus::Ok);
        assert!((o1.abs() - 0.964).abs() < 0.01);
        assert!((energy + 15.2716229).abs() < 1e-6);
        spt_state_free(gs);
    }
    assert_eq!(last_error(), "");
}

#[test]
fn amplitudes_copy_out() {
    let mut st: *mut SptState = ptr::null_mut();
    unsafe {
        assert_eq!(spt_state_neel(3, &mut st), SptStatus::Ok);
        let (mut re, mut im) = (vec![0.0; 8], vec![0.0; 8]);
        assert_eq!(
            spt_state_amplitudes(st, re.as_mut_ptr(), im.as_mut_ptr(), 8),
            SptStatus::Ok
        );
        assert_eq!(re, vec![0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        assert_eq!(
            spt_state_amplitudes(st, re.as_mut_ptr(), im.as_mut_ptr(), 4),
            SptStatus::Dimension
        );
        spt_state_free(st);
    }
}

#[test]
fn circuit_text_round_trip_and_simulation() {
    let name = CString::new("sd").unwrap();
    let mut c: *mut SptCircuit = ptr::null_mut();
    let mut text: *mut c_char = ptr::null_mut();
    let mut back: *mut SptCircuit = ptr::null_mut();
    unsafe {
        assert_eq!(spt_circuit_asp(name.as_ptr(), 5, 3, &mut c), SptStatus::Ok);
        assert_eq!(spt_circuit_to_text(c, &mut text), SptStatus::Ok);
        assert_eq!(spt_circuit_parse(text, &mut back), SptStatus::Ok);
        assert_eq!(spt_circuit_len(c), spt_circuit_len(back));
        assert_eq!(
            spt_circuit_two_qubit_count(c),
            spt_circuit_two_qubit_count(back)
        );

        let bits = [0u8; 5];
        let mut zero: *mut SptState = ptr::null_mut();
        let (mut a, mut b): (*mut SptState, *mut SptState) = (ptr::null_mut(), ptr::null_mut());
        assert_eq!(spt_state_basis(bits.as_ptr(), 5, &mut zero), SptStatus::Ok);
        assert_eq!(spt_simulate(c, zero, &mut a), SptStatus::Ok);
        assert_eq!(spt_simulate(back, zero, &mut b), SptStatus::Ok);
        let mut f = 0.0;
        assert_eq!(spt_state_fidelity(a, b, &mut f), SptStatus::Ok);
        assert!((f - 1.0).abs() < 1e-12);
        for s in [zero, a, b] {
            spt_state_free(s);
        }
        spt_string_free(text);
        spt_circuit_free(c);
        spt_circuit_free(back);
    }
}

#[test]
fn sampling_and_post_selection() {
    let mut st: *mut SptState = ptr::null_mut();
    let (mut raw, mut kept): (*mut SptShots, *mut SptShots) = (ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(spt_state_neel(7, &mut st), SptStatus::Ok);
        assert_eq!(spt_sample(st, 100, 5, &mut raw), SptStatus::Ok);
        assert_eq!(spt_shots_post_select(raw, 1, &mut kept), SptStatus::Ok);
        assert_eq!(spt_shots_len(kept), 100);
        assert_eq!(spt_shots_retention(kept), 1.0);
        let mut wrong: *mut SptShots = ptr::null_mut();
        assert_eq!(spt_shots_post_select(raw, 3, &mut wrong), SptStatus::Ok);
        assert_eq!(spt_shots_len(wrong), 0);
        let mut o = 0.0;
        assert_eq!(
            spt_string_order_shots(wrong, 1, &mut o),
            SptStatus::EmptyShots
        );
        assert!(last_error().contains("empty"));
        spt_shots_free(wrong);
        spt_shots_free(kept);
        spt_shots_free(raw);
        spt_state_free(st);
    }
}

#[test]
fn errors_are_reported_not_raised() {
    let mut st: *mut SptState = ptr::null_mut();
    let bad = CString::new("xy").unwrap();
    let garbage = CString::new("sites 3\nfrobnicate 0\n").unwrap();
    let mut c: *mut SptCircuit = ptr::null_mut();
    unsafe {
        assert_eq!(
            spt_state_ground(bad.as_ptr(), 7, 1.0, ptr::null_mut(), &mut st),
            SptStatus::Config
        );
        assert!(st.is_null());
        assert!(!last_error().is_empty());
        assert_eq!(
            spt_state_ground(ptr::null(), 7, 1.0, ptr::null_mut(), &mut st),
            SptStatus::NullPointer
        );
        assert_eq!(spt_state_neel(3, ptr::null_mut()), SptStatus::NullPointer);
        assert_eq!(
            spt_circuit_parse(garbage.as_ptr(), &mut c),
            SptStatus::Parse
        );
        assert!(c.is_null());
        let mut f = 0.0;
        assert_eq!(
            spt_state_fidelity(ptr::null(), ptr::null(), &mut f),
            SptStatus::NullPointer
        );
        let big = [0u8; 40];
        assert_eq!(
            spt_state_basis(big.as_ptr(), 40, &mut st),
            SptStatus::Config
        );
        spt_state_free(ptr::null_mut());
        spt_circuit_free(ptr::null_mut());
        spt_shots_free(ptr::null_mut());
        spt_string_free(ptr::null_mut());
        assert_eq!(spt_state_n_sites(ptr::null()), 0);
    }
}

#[test]
fn header_declares_the_interface() {
    let header =
        std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/sptchain.h"))
            .unwrap();
    for name in [
        "spt_last_error",
        "spt_state_ground",
        "spt_circuit_asp",
        "spt_circuit_parse",
        "spt_simulate",
        "spt_sample",
        "spt_shots_post_select",
        "spt_string_order_shots",
        "typedef struct SptState SptState;",
        "SPT_STATUS_OK = 0",
    ] {
        assert!(header.contains(name), "{name}");
    }
}

// Compiles a C program against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    let manifest = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let profile_dir = std::env::current_exe()
        .unwrap()
        .parent()
        .unwrap()
        .parent()
        .unwrap()
        .to_path_buf();
    let lib = profile_dir.join("libsptchain_ffi.a");
    if !lib.exists() {
        eprintln!("static library not built at {}; skipping", lib.display());
        return;
    }
    let out = tempfile::tempdir().unwrap();
    let exe = out.path().join("smoke");
    let cc = std::env::var("CC").unwrap_or_else(|_| "cc".into());
    let Ok(status) = Command::new(&cc)
        .arg(manifest.join("tests/c/smoke.c"))
        .arg("-I")
        .arg(manifest.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&exe)
        .status()
    else {
        eprintln!("no C compiler ({cc}); skipping");
        return;
    };
    assert!(status.success(), "C compilation failed");
    let run = Command::new(&exe).output().unwrap();
    assert!(
        run.status.success(),
        "{}",
        String::from_utf8_lossy(&run.stderr)
    );
}
