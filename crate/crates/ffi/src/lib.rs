// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

//! C ABI for tickbench.
//!
//! Objects are opaque handles created by `tb_*_new`/`tb_*_from_json` and
//! released with the matching `tb_*_free`. Every fallible function returns a
//! [`TbStatus`]; on failure the message is available from
//! [`tb_last_error_message`] on the same thread. Strings returned by the
//! library are released with [`tb_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use tickbench::classical::{canonicalize_to_reset, ladder_clock, ClassicalClock};
use tickbench::delay::{convolve, mix, DelayFunction, Moments};
use tickbench::quantum::{
    optimize_potential, quantum_accuracy, AccuracyConfig, InitialState, OptimizeConfig, OptimizeError,
    PotentialFamily, QuantumResetClockSpec, QuantumSpecJson,
};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TbStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Numerical = 3,
    BudgetExhausted = 4,
    Panic = 5,
}

/// Moments of a delay function.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct TbMoments {
    pub mass: f64,
    pub mean: f64,
    pub second_moment: f64,
    pub std_dev: f64,
    pub accuracy: f64,
}

impl From<Moments> for TbMoments {
    fn from(m: Moments) -> Self {
        Self {
            mass: m.mass,
            mean: m.mean,
            second_moment: m.second_moment,
            std_dev: m.std_dev,
            accuracy: m.accuracy,
        }
    }
}

/// Opaque classical clock.
pub struct TbClassicalClock(ClassicalClock);

/// Opaque quantum reset clock.
pub struct TbQuantumClock(QuantumResetClockSpec);

/// Opaque delay function.
pub struct TbDelay(DelayFunction);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let s = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(s).ok());
}

fn clear_error() {
    LAST_ERROR.with(|e| *e.borrow_mut() = None);
}

/// Last error message on this thread, or null. Valid until the next call
/// into the library on this thread.
#[no_mangle]
pub extern "C" fn tb_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn tb_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

struct Failure(TbStatus, String);

impl<E: std::error::Error> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure(TbStatus::Numerical, e.to_string())
    }
}

fn invalid(msg: impl Into<String>) -> Failure {
    Failure(TbStatus::InvalidArgument, msg.into())
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> TbStatus {
    clear_error();
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => TbStatus::Ok,
        Ok(Err(Failure(code, msg))) => {
            set_error(msg);
            code
        }
        Err(_) => {
            set_error("internal panic");
            TbStatus::Panic
        }
    }
}

unsafe fn read_str<'a>(p: *const c_char) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(Failure(TbStatus::NullPointer, "null string".into()));
    }
    CStr::from_ptr(p).to_str().map_err(|_| invalid("string is not UTF-8"))
}

unsafe fn write_out<T>(out: *mut *mut T, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(Failure(TbStatus::NullPointer, "null output pointer".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T) -> Result<&'a T, Failure> {
    p.as_ref().ok_or(Failure(TbStatus::NullPointer, "null handle".into()))
}

fn json_string(v: &serde_json::Value) -> Result<CString, Failure> {
    CString::new(v.to_string()).map_err(|_| invalid("JSON contains NUL"))
}

// ---- classical clocks ----

/// Ladder Clock of dimension `d`.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for a handle.
#[no_mangle]
pub unsafe extern "C" fn tb_ladder_clock_new(d: usize, out: *mut *mut TbClassicalClock) -> TbStatus {
    guard(|| {
        let c = ladder_clock(d).map_err(|e| invalid(e.to_string()))?;
        write_out(out, TbClassicalClock(c))
    })
}

/// Clock from JSON `{d, N, T, initial}` with row-major matrices.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_classical_clock_from_json(
    json: *const c_char,
    out: *mut *mut TbClassicalClock,
) -> TbStatus {
    guard(|| {
        let text = read_str(json)?;
        let value: serde_json::Value = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        let c = ClassicalClock::from_json(value).map_err(|e| invalid(e.to_string()))?;
        write_out(out, TbClassicalClock(c))
    })
}

/// JSON form of the clock; release with [`tb_string_free`].
///
/// # Safety
/// `clock` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_classical_clock_to_json(clock: *const TbClassicalClock, out: *mut *mut c_char) -> TbStatus {
    guard(|| {
        let c = deref(clock)?;
        if out.is_null() {
            return Err(Failure(TbStatus::NullPointer, "null output pointer".into()));
        }
        *out = json_string(&c.0.to_json())?.into_raw();
        Ok(())
    })
}

/// Exact first-tick moments.
///
/// # Safety
/// `clock` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_classical_clock_moments(clock: *const TbClassicalClock, out: *mut TbMoments) -> TbStatus {
    guard(|| {
        let c = deref(clock)?;
        let m = c.0.exact_moments()?;
        if out.is_null() {
            return Err(Failure(TbStatus::NullPointer, "null output pointer".into()));
        }
        *out = m.into();
        Ok(())
    })
}

/// Canonical reset form of `clock` as a new handle.
///
/// # Safety
/// `clock` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_classical_clock_canonicalize(
    clock: *const TbClassicalClock,
    out: *mut *mut TbClassicalClock,
) -> TbStatus {
    guard(|| {
        let c = deref(clock)?;
        let canon = canonicalize_to_reset(&c.0)?;
        write_out(out, TbClassicalClock(canon))
    })
}

/// # Safety
/// `clock` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tb_classical_clock_free(clock: *mut TbClassicalClock) {
    if !clock.is_null() {
        drop(Box::from_raw(clock));
    }
}

// ---- quantum clocks ----

/// Quantum reset clock from spec JSON
/// `{d, omega, sigma0, n0, k0, eta, potential: {kind, values?}}`.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_quantum_clock_from_json(json: *const c_char, out: *mut *mut TbQuantumClock) -> TbStatus {
    guard(|| {
        let text = read_str(json)?;
        let j: QuantumSpecJson = serde_json::from_str(text).map_err(|e| invalid(e.to_string()))?;
        let spec = j.build().map_err(|e| invalid(e.to_string()))?;
        write_out(out, TbQuantumClock(spec))
    })
}

/// First-tick moments by quadrature with `steps_per_site` steps per time
/// state (0 selects the default).
///
/// # Safety
/// `clock` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_quantum_clock_moments(
    clock: *const TbQuantumClock,
    steps_per_site: usize,
    out: *mut TbMoments,
) -> TbStatus {
    guard(|| {
        let c = deref(clock)?;
        let mut cfg = AccuracyConfig::default();
        if steps_per_site > 0 {
            cfg.steps_per_site = steps_per_site;
        }
        let m = quantum_accuracy(&c.0, &cfg)?;
        if out.is_null() {
            return Err(Failure(TbStatus::NullPointer, "null output pointer".into()));
        }
        *out = m.into();
        Ok(())
    })
}

/// Optimises a free time-diagonal potential for the time state `|θ₀⟩`
/// (`sigma0 <= 0`) or a Quasi-Ideal state of width `sigma0`, and returns
/// the best clock. Returns `BudgetExhausted` together with the best clock
/// found when the search did not converge.
///
/// # Safety
/// `out` must be writable; `out_r1` must be null or writable.
#[no_mangle]
pub unsafe extern "C" fn tb_quantum_optimize_diag(
    d: usize,
    sigma0: f64,
    budget: usize,
    seed: u64,
    out_r1: *mut f64,
    out: *mut *mut TbQuantumClock,
) -> TbStatus {
    let mut exhausted = false;
    let status = guard(|| {
        let state = if sigma0 > 0.0 {
            InitialState::QuasiIdeal {
                sigma0,
                n0: None,
                k0: 0.0,
            }
        } else {
            InitialState::Swp { k: 0 }
        };
        let mut oc = OptimizeConfig::new(PotentialFamily::Diag { vary_sigma: false }, state, budget);
        oc.seed = seed;
        let opt = match optimize_potential(d, &oc) {
            Ok(o) => o,
            Err(OptimizeError::BudgetExhausted(o)) => {
                exhausted = true;
                *o
            }
            Err(e) => return Err(invalid(e.to_string())),
        };
        let psi = state.vector(d).map_err(|e| invalid(e.to_string()))?;
        let spec = QuantumResetClockSpec::from_time_diagonal(oc.omega, &opt.v_diag, psi)?;
        if !out_r1.is_null() {
            *out_r1 = opt.r1;
        }
        write_out(out, TbQuantumClock(spec))
    });
    if status == TbStatus::Ok && exhausted {
        set_error("evaluation budget exhausted");
        return TbStatus::BudgetExhausted;
    }
    status
}

/// # Safety
/// `clock` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tb_quantum_clock_free(clock: *mut TbQuantumClock) {
    if !clock.is_null() {
        drop(Box::from_raw(clock));
    }
}

// ---- delay functions ----

/// `amplitude·rate·e^{−rate·t}`.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_delay_exponential(rate: f64, amplitude: f64, out: *mut *mut TbDelay) -> TbStatus {
    guard(|| {
        let d = DelayFunction::exponential(rate, amplitude).map_err(|e| invalid(e.to_string()))?;
        write_out(out, TbDelay(d))
    })
}

/// Normalised Erlang density of the given shape and rate.
///
/// # Safety
/// `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_delay_erlang(shape: u32, rate: f64, out: *mut *mut TbDelay) -> TbStatus {
    guard(|| {
        let d = DelayFunction::erlang(shape, rate).map_err(|e| invalid(e.to_string()))?;
        write_out(out, TbDelay(d))
    })
}

/// Density sampled on `[0, dt·(len−1)]`.
///
/// # Safety
/// `values` must point to `len` readable doubles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_delay_sampled(dt: f64, values: *const f64, len: usize, out: *mut *mut TbDelay) -> TbStatus {
    guard(|| {
        if values.is_null() {
            return Err(Failure(TbStatus::NullPointer, "null values".into()));
        }
        let v = std::slice::from_raw_parts(values, len).to_vec();
        let d = DelayFunction::sampled(dt, v).map_err(|e| invalid(e.to_string()))?;
        write_out(out, TbDelay(d))
    })
}

/// Convolution `a ∗ b`.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_delay_convolve(a: *const TbDelay, b: *const TbDelay, out: *mut *mut TbDelay) -> TbStatus {
    guard(|| {
        let (a, b) = (deref(a)?, deref(b)?);
        let c = convolve(&[a.0.clone(), b.0.clone()])?;
        write_out(out, TbDelay(c))
    })
}

/// Pointwise sum `a + b`; the total mass must not exceed 1.
///
/// # Safety
/// `a` and `b` must be live handles; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_delay_mix(a: *const TbDelay, b: *const TbDelay, out: *mut *mut TbDelay) -> TbStatus {
    guard(|| {
        let (a, b) = (deref(a)?, deref(b)?);
        let c = mix(&[a.0.clone(), b.0.clone()]).map_err(|e| invalid(e.to_string()))?;
        write_out(out, TbDelay(c))
    })
}

/// # Safety
/// `delay` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn tb_delay_moments(delay: *const TbDelay, out: *mut TbMoments) -> TbStatus {
    guard(|| {
        let d = deref(delay)?;
        let m = d.0.moments()?;
        if out.is_null() {
            return Err(Failure(TbStatus::NullPointer, "null output pointer".into()));
        }
        *out = m.into();
        Ok(())
    })
}

/// # Safety
/// `delay` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tb_delay_free(delay: *mut TbDelay) {
    if !delay.is_null() {
        drop(Box::from_raw(delay));
    }
}

/// Releases a string returned by the library.
///
/// # Safety
/// `s` must be null or a string returned by this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn tb_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
