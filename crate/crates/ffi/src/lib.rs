//! C ABI over `dualwalk`.
//!
//! Every function returns a [`DwStatus`]; results come back through out
//! pointers. Objects are opaque handles freed with their `*_free` function.
//! Strings returned to the caller are owned by the caller and released with
//! [`dw_string_free`]. After a non-OK status, [`dw_last_error`] describes the
//! failure on the calling thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dualwalk::blocks::check_factorization;
use dualwalk::rational::{to_f64, to_pq};
use dualwalk::sampling::{walker_rng, StreamRng};
use dualwalk::walk::{full_step, step_decrease, step_increase, Mechanism};
use dualwalk::{a_sq, b_sq, urn, Error, KWeight, StateSignature};

/// Status codes.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DwStatus {
    Ok = 0,
    NullPointer = 1,
    /// Malformed argument: bad index, bad UTF-8, unknown name.
    InvalidArgument = 2,
    /// `k` not decreasing or `m` not interlacing.
    InvalidState = 3,
    MechanismUnavailable = 4,
    /// Request exceeds a documented cap.
    Resource = 5,
    /// An identity check found a mismatch.
    CheckFailed = 6,
    /// Output buffer too small.
    BufferTooSmall = 7,
    Internal = 99,
}

/// Sampler for the increase substep.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DwMechanism {
    Direct = 0,
    Urn = 1,
    Young = 2,
}

impl From<DwMechanism> for Mechanism {
    fn from(m: DwMechanism) -> Self {
        match m {
            DwMechanism::Direct => Mechanism::Direct,
            DwMechanism::Urn => Mechanism::Urn,
            DwMechanism::Young => Mechanism::Young,
        }
    }
}

/// Fixed weight `k`.
pub struct DwWeight(KWeight);

/// State `m` together with its weight.
pub struct DwState(StateSignature);

/// Random stream.
pub struct DwRng(StreamRng);

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: impl Into<String>) {
    let msg = CString::new(msg.into().replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(e: &Error) -> DwStatus {
    match e {
        Error::Dimension { .. }
        | Error::EmptyWeight
        | Error::NotDecreasing { .. }
        | Error::NotInterlacing { .. }
        | Error::OmegaOutOfRange { .. }
        | Error::OffsetTooSmall { .. }
        | Error::NotInP { .. } => DwStatus::InvalidState,
        Error::IndexOutOfRange { .. } | Error::Structure(_) | Error::Parse(_) | Error::Domain(_) => {
            DwStatus::InvalidArgument
        }
        Error::Resource { .. } => DwStatus::Resource,
        Error::MechanismUnavailable(_) => DwStatus::MechanismUnavailable,
    }
}

fn fail(e: Error) -> DwStatus {
    set_error(e.to_string());
    status_of(&e)
}

/// Runs `f`, turning panics into [`DwStatus::Internal`].
fn guard(f: impl FnOnce() -> DwStatus) -> DwStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(_) => {
            set_error("internal panic");
            DwStatus::Internal
        }
    }
}

macro_rules! non_null {
    ($($p:ident),+) => {
        $(if $p.is_null() {
            set_error(concat!("null pointer: ", stringify!($p)));
            return DwStatus::NullPointer;
        })+
    };
}

fn give<T>(out: *mut *mut T, value: T) -> DwStatus {
    // SAFETY: callers check `out` for null first.
    unsafe { *out = Box::into_raw(Box::new(value)) };
    DwStatus::Ok
}

fn give_string(out: *mut *mut c_char, s: String) -> DwStatus {
    match CString::new(s) {
        Ok(c) => {
            // SAFETY: callers check `out` for null first.
            unsafe { *out = c.into_raw() };
            DwStatus::Ok
        }
        Err(_) => {
            set_error("string contains NUL");
            DwStatus::Internal
        }
    }
}

/// Message for the last failure on this thread. Valid until the next call
/// into this library from the same thread; never null.
#[no_mangle]
pub extern "C" fn dw_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn dw_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Releases a string returned by this library. Null is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn dw_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a weight from `len` integers.
///
/// # Safety
/// `k` must point to `len` readable values; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_weight_new(k: *const i64, len: usize, out: *mut *mut DwWeight) -> DwStatus {
    guard(|| {
        non_null!(k, out);
        let v = std::slice::from_raw_parts(k, len).to_vec();
        match KWeight::new(v) {
            Ok(w) => give(out, DwWeight(w)),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `w` must come from [`dw_weight_new`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dw_weight_free(w: *mut DwWeight) {
    if !w.is_null() {
        drop(Box::from_raw(w));
    }
}

/// Builds a state of `len = n + 1` entries interlacing `weight`.
///
/// # Safety
/// `weight` must be a live handle, `m` must point to `len` values, `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_state_new(
    weight: *const DwWeight,
    m: *const i64,
    len: usize,
    out: *mut *mut DwState,
) -> DwStatus {
    guard(|| {
        non_null!(weight, m, out);
        let v = std::slice::from_raw_parts(m, len).to_vec();
        match StateSignature::new(v, &(*weight).0) {
            Ok(s) => give(out, DwState(s)),
            Err(e) => fail(e),
        }
    })
}

/// # Safety
/// `s` must come from this library and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dw_state_free(s: *mut DwState) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Number of entries `n + 1` of a state; 0 for null.
///
/// # Safety
/// `s` must be a live handle or null.
#[no_mangle]
pub unsafe extern "C" fn dw_state_len(s: *const DwState) -> usize {
    if s.is_null() {
        0
    } else {
        (*s).0.m().len()
    }
}

/// Copies the entries of `s` into `buf`, which holds `cap` values.
///
/// # Safety
/// `s` must be a live handle; `buf` must be writable for `cap` values.
#[no_mangle]
pub unsafe extern "C" fn dw_state_entries(s: *const DwState, buf: *mut i64, cap: usize) -> DwStatus {
    guard(|| {
        non_null!(s, buf);
        let m = (*s).0.m();
        if cap < m.len() {
            set_error(format!("buffer holds {cap} values, state has {}", m.len()));
            return DwStatus::BufferTooSmall;
        }
        ptr::copy_nonoverlapping(m.as_ptr(), buf, m.len());
        DwStatus::Ok
    })
}

unsafe fn coefficient(
    s: *const DwState,
    i: usize,
    pq: *mut *mut c_char,
    value: *mut f64,
    f: fn(&StateSignature, usize) -> dualwalk::Result<dualwalk::Rational>,
) -> DwStatus {
    guard(|| {
        non_null!(s);
        match f(&(*s).0, i) {
            Ok(x) => {
                if !value.is_null() {
                    *value = to_f64(&x);
                }
                if pq.is_null() {
                    DwStatus::Ok
                } else {
                    give_string(pq, to_pq(&x))
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// `a_i^2(m)`, `1 <= i <= n + 1`, as an exact `"p/q"` string and/or a double.
/// Either out pointer may be null.
///
/// # Safety
/// `s` must be a live handle; non-null out pointers must be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_a_sq(s: *const DwState, i: usize, pq: *mut *mut c_char, value: *mut f64) -> DwStatus {
    coefficient(s, i, pq, value, a_sq)
}

/// `b_i^2(m)`; same conventions as [`dw_a_sq`].
///
/// # Safety
/// As for [`dw_a_sq`].
#[no_mangle]
pub unsafe extern "C" fn dw_b_sq(s: *const DwState, i: usize, pq: *mut *mut c_char, value: *mut f64) -> DwStatus {
    coefficient(s, i, pq, value, b_sq)
}

/// Random stream `stream` of `seed`; walker `i` of a simulation uses stream `i`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_rng_new(seed: u64, stream: u64, out: *mut *mut DwRng) -> DwStatus {
    guard(|| {
        non_null!(out);
        give(out, DwRng(walker_rng(seed, stream)))
    })
}

/// # Safety
/// `r` must come from [`dw_rng_new`] and not have been freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn dw_rng_free(r: *mut DwRng) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

unsafe fn stepper(
    s: *const DwState,
    rng: *mut DwRng,
    out: *mut *mut DwState,
    f: impl FnOnce(&StateSignature, &mut StreamRng) -> dualwalk::Result<StateSignature>,
) -> DwStatus {
    guard(|| {
        non_null!(s, rng, out);
        match f(&(*s).0, &mut (*rng).0) {
            Ok(next) => give(out, DwState(next)),
            Err(e) => fail(e),
        }
    })
}

/// One composed step; writes a new state handle to `out`.
///
/// # Safety
/// `s` and `rng` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_full_step(
    s: *const DwState,
    rng: *mut DwRng,
    mechanism: DwMechanism,
    out: *mut *mut DwState,
) -> DwStatus {
    stepper(s, rng, out, |m, r| full_step(m, r, mechanism.into()))
}

/// Increase substep only.
///
/// # Safety
/// As for [`dw_full_step`].
#[no_mangle]
pub unsafe extern "C" fn dw_step_increase(
    s: *const DwState,
    rng: *mut DwRng,
    mechanism: DwMechanism,
    out: *mut *mut DwState,
) -> DwStatus {
    stepper(s, rng, out, |m, r| step_increase(m, r, mechanism.into()))
}

/// Decrease substep only.
///
/// # Safety
/// As for [`dw_full_step`].
#[no_mangle]
pub unsafe extern "C" fn dw_step_decrease(s: *const DwState, rng: *mut DwRng, out: *mut *mut DwState) -> DwStatus {
    stepper(s, rng, out, |m, r| Ok(step_decrease(m, r)))
}

/// Checks the block factorization over `levels` levels. Writes the number of
/// identities checked to `identities` (may be null). Returns
/// [`DwStatus::CheckFailed`] on any mismatch.
///
/// # Safety
/// `weight` must be a live handle; `identities` null or writable.
#[no_mangle]
pub unsafe extern "C" fn dw_factor_check(weight: *const DwWeight, levels: i64, identities: *mut usize) -> DwStatus {
    guard(|| {
        non_null!(weight);
        match check_factorization(&(*weight).0, levels) {
            Ok(report) => {
                if !identities.is_null() {
                    *identities = report.checks.len();
                }
                if report.is_ok() {
                    DwStatus::Ok
                } else {
                    let first = report.lines().into_iter().find(|l| !l.ends_with(": OK"));
                    set_error(first.unwrap_or_default());
                    DwStatus::CheckFailed
                }
            }
            Err(e) => fail(e),
        }
    })
}

/// `|S_{j,n+1}|` as a decimal string.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_class_cardinality(j: usize, n: usize, out: *mut *mut c_char) -> DwStatus {
    guard(|| {
        non_null!(out);
        match urn::class_cardinality(j, n) {
            Ok(v) => give_string(out, v.to_string()),
            Err(e) => fail(e),
        }
    })
}

/// Parses a mechanism name (`direct`, `urn`, `young`).
///
/// # Safety
/// `name` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn dw_mechanism_parse(name: *const c_char, out: *mut DwMechanism) -> DwStatus {
    guard(|| {
        non_null!(name, out);
        let Ok(text) = CStr::from_ptr(name).to_str() else {
            set_error("mechanism name is not UTF-8");
            return DwStatus::InvalidArgument;
        };
        match text.parse::<Mechanism>() {
            Ok(m) => {
                *out = match m {
                    Mechanism::Direct => DwMechanism::Direct,
                    Mechanism::Urn => DwMechanism::Urn,
                    Mechanism::Young => DwMechanism::Young,
                };
                DwStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}
