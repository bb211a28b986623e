use std::ffi::{CStr, CString};
use std::path::PathBuf;
use std::process::Command;
use std::ptr;

use dualwalk_ffi::*;

fn weight(k: &[i64]) -> *mut DwWeight {
    let mut w = ptr::null_mut();
    assert_eq!(unsafe { dw_weight_new(k.as_ptr(), k.len(), &mut w) }, DwStatus::Ok);
    w
}

fn state(w: *const DwWeight, m: &[i64]) -> *mut DwState {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { dw_state_new(w, m.as_ptr(), m.len(), &mut s) }, DwStatus::Ok);
    s
}

fn last_error() -> String {
    unsafe { CStr::from_ptr(dw_last_error()) }.to_str().unwrap().to_owned()
}

fn take(p: *mut std::ffi::c_char) -> String {
    let s = unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_owned();
    unsafe { dw_string_free(p) };
    s
}

#[test]
fn coefficients_as_strings_and_doubles() {
    let w = weight(&[6, 3]);
    let s = state(w, &[8, 5, 1]);
    let mut a = Vec::new();
    let mut b = Vec::new();
    for i in 1..=3 {
        let mut pq = ptr::null_mut();
        let mut v = 0.0;
        assert_eq!(unsafe { dw_a_sq(s, i, &mut pq, &mut v) }, DwStatus::Ok);
        a.push((take(pq), v));
        assert_eq!(unsafe { dw_b_sq(s, i, &mut pq, ptr::null_mut()) }, DwStatus::Ok);
        b.push(take(pq));
    }
    assert_eq!(a.iter().map(|x| x.0.as_str()).collect::<Vec<_>>(), ["7/12", "3/20", "4/15"]);
    assert!((a[0].1 - 7.0 / 12.0).abs() < 1e-15);
    assert_eq!(b, ["1/3", "1/5", "7/15"]);
    unsafe {
        assert_eq!(dw_a_sq(s, 4, ptr::null_mut(), ptr::null_mut()), DwStatus::InvalidArgument);
        dw_state_free(s);
        dw_weight_free(w);
    }
}

#[test]
fn validation_errors_carry_messages() {
    let w = weight(&[6, 3]);
    let mut s = ptr::null_mut();
    let bad = [8i64, 2, 1];
    assert_eq!(unsafe { dw_state_new(w, bad.as_ptr(), 3, &mut s) }, DwStatus::InvalidState);
    assert!(s.is_null());
    assert!(last_error().contains(">="), "{}", last_error());

    let mut w2 = ptr::null_mut();
    let rising = [1i64, 2];
    assert_eq!(unsafe { dw_weight_new(rising.as_ptr(), 2, &mut w2) }, DwStatus::InvalidState);
    assert_eq!(unsafe { dw_weight_new(ptr::null(), 0, &mut w2) }, DwStatus::NullPointer);
    unsafe { dw_weight_free(w) };
}

#[test]
fn steps_are_reproducible_per_stream() {
    let w = weight(&[6, 3]);
    let run = |stream| {
        let mut rng = ptr::null_mut();
        assert_eq!(unsafe { dw_rng_new(11, stream, &mut rng) }, DwStatus::Ok);
        let mut s = state(w, &[8, 5, 1]);
        let mut path = Vec::new();
        for _ in 0..50 {
            let mut next = ptr::null_mut();
            assert_eq!(unsafe { dw_full_step(s, rng, DwMechanism::Direct, &mut next) }, DwStatus::Ok);
            unsafe { dw_state_free(s) };
            s = next;
            let mut buf = [0i64; 3];
            assert_eq!(unsafe { dw_state_entries(s, buf.as_mut_ptr(), 3) }, DwStatus::Ok);
            assert_eq!(buf.iter().sum::<i64>(), 14);
            path.push(buf);
        }
        unsafe {
            dw_state_free(s);
            dw_rng_free(rng);
        }
        path
    };
    assert_eq!(run(0), run(0));
    assert_ne!(run(0), run(1));
    unsafe { dw_weight_free(w) };
}

#[test]
fn young_needs_nonnegative_last_entry() {
    let w = weight(&[6, 3]);
    let s = state(w, &[8, 5, -1]);
    let mut rng = ptr::null_mut();
    let mut out = ptr::null_mut();
    unsafe {
        dw_rng_new(1, 0, &mut rng);
        assert_eq!(dw_step_increase(s, rng, DwMechanism::Young, &mut out), DwStatus::MechanismUnavailable);
        assert_eq!(dw_step_decrease(s, rng, &mut out), DwStatus::Ok);
        assert_eq!(dw_state_len(out), 3);
        let mut buf = [0i64; 2];
        assert_eq!(dw_state_entries(out, buf.as_mut_ptr(), 2), DwStatus::BufferTooSmall);
        dw_state_free(out);
        dw_state_free(s);
        dw_rng_free(rng);
        dw_weight_free(w);
    }
}

#[test]
fn factor_check_and_cardinality() {
    let w = weight(&[6, 3]);
    let mut count = 0usize;
    assert_eq!(unsafe { dw_factor_check(w, 10, &mut count) }, DwStatus::Ok);
    assert_eq!(count, 30);
    let cards: Vec<String> = (1..=4)
        .map(|j| {
            let mut p = ptr::null_mut();
            assert_eq!(unsafe { dw_class_cardinality(j, 3, &mut p) }, DwStatus::Ok);
            take(p)
        })
        .collect();
    assert_eq!(cards, ["240", "144", "144", "240"]);
    let mut p = ptr::null_mut();
    assert_eq!(unsafe { dw_class_cardinality(5, 3, &mut p) }, DwStatus::InvalidArgument);
    unsafe { dw_weight_free(w) };
}

#[test]
fn mechanism_names() {
    let mut m = DwMechanism::Direct;
    let name = CString::new("young").unwrap();
    assert_eq!(unsafe { dw_mechanism_parse(name.as_ptr(), &mut m) }, DwStatus::Ok);
    assert_eq!(m, DwMechanism::Young);
    let bad = CString::new("dice").unwrap();
    assert_eq!(unsafe { dw_mechanism_parse(bad.as_ptr(), &mut m) }, DwStatus::InvalidArgument);
    assert!(unsafe { CStr::from_ptr(dw_version()) }.to_str().unwrap().starts_with("0."));
}

#[test]
fn header_is_current() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let header = std::fs::read_to_string(dir.join("include/dualwalk.h")).unwrap();
    for name in ["dw_full_step", "dw_factor_check", "dw_last_error", "DW_STATUS_INVALID_STATE", "typedef struct DwState DwState"] {
        assert!(header.contains(name), "{name} missing from header");
    }
}

/// Compiles the C example against the generated header and the static library.
#[test]
fn c_program_links_and_runs() {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR"));
    let exe = std::env::current_exe().unwrap();
    let profile_dir = exe.parent().unwrap().parent().unwrap();
    let lib = profile_dir.join("libdualwalk_ffi.a");
    assert!(lib.exists(), "static library not found at {}", lib.display());
    let out = std::env::temp_dir().join(format!("dualwalk-smoke-{}", std::process::id()));
    let status = Command::new("cc")
        .arg(dir.join("examples/smoke.c"))
        .arg("-I")
        .arg(dir.join("include"))
        .arg(&lib)
        .args(["-lpthread", "-ldl", "-lm", "-o"])
        .arg(&out)
        .status()
        .expect("a C compiler on PATH");
    assert!(status.success());
    let run = Command::new(&out).output().unwrap();
    let _ = std::fs::remove_file(&out);
    assert!(run.status.success(), "{}", String::from_utf8_lossy(&run.stderr));
    assert_eq!(String::from_utf8_lossy(&run.stdout), "ok\n");
}
