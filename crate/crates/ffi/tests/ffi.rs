// Copyright 2026 The tickbench Authors
// SPDX-License-Identifier: Apache-2.0

use std::ffi::{CStr, CString};
use std::ptr;

use tickbench_ffi::*;

fn last_error() -> String {
    let p = tb_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_string_lossy().into_owned()
}

#[test]
fn ladder_clock_round_trip() {
    unsafe {
        let mut clock = ptr::null_mut();
        assert_eq!(tb_ladder_clock_new(5, &mut clock), TbStatus::Ok);
        let mut m = TbMoments::default();
        assert_eq!(tb_classical_clock_moments(clock, &mut m), TbStatus::Ok);
        assert!((m.accuracy - 5.0).abs() < 1e-9);
        assert!((m.mass - 1.0).abs() < 1e-12);

        let mut json = ptr::null_mut();
        assert_eq!(tb_classical_clock_to_json(clock, &mut json), TbStatus::Ok);
        let mut again = ptr::null_mut();
        assert_eq!(tb_classical_clock_from_json(json, &mut again), TbStatus::Ok);
        let mut m2 = TbMoments::default();
        assert_eq!(tb_classical_clock_moments(again, &mut m2), TbStatus::Ok);
        assert_eq!(m, m2);

        let mut canon = ptr::null_mut();
        assert_eq!(tb_classical_clock_canonicalize(clock, &mut canon), TbStatus::Ok);
        let mut m3 = TbMoments::default();
        assert_eq!(tb_classical_clock_moments(canon, &mut m3), TbStatus::Ok);
        assert!(m3.accuracy >= m.accuracy - 1e-9);

        tb_string_free(json);
        tb_classical_clock_free(clock);
        tb_classical_clock_free(again);
        tb_classical_clock_free(canon);
    }
}

#[test]
fn errors_are_reported() {
    unsafe {
        let mut clock = ptr::null_mut();
        assert_eq!(tb_ladder_clock_new(0, &mut clock), TbStatus::InvalidArgument);
        assert!(clock.is_null());
        assert!(!last_error().is_empty());

        assert_eq!(tb_classical_clock_from_json(ptr::null(), &mut clock), TbStatus::NullPointer);
        let bad = CString::new("{\"d\": 2}").unwrap();
        assert_eq!(tb_classical_clock_from_json(bad.as_ptr(), &mut clock), TbStatus::InvalidArgument);

        let mut m = TbMoments::default();
        assert_eq!(tb_classical_clock_moments(ptr::null(), &mut m), TbStatus::NullPointer);

        assert_eq!(tb_ladder_clock_new(2, ptr::null_mut()), TbStatus::NullPointer);
        assert_eq!(tb_ladder_clock_new(2, &mut clock), TbStatus::Ok);
        assert!(tb_last_error_message().is_null());
        tb_classical_clock_free(clock);

        tb_classical_clock_free(ptr::null_mut());
        tb_quantum_clock_free(ptr::null_mut());
        tb_delay_free(ptr::null_mut());
        tb_string_free(ptr::null_mut());
    }
}

#[test]
fn delay_algebra() {
    unsafe {
        let (mut a, mut b, mut c, mut e) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
        assert_eq!(tb_delay_exponential(2.0, 2.0, &mut a), TbStatus::Ok);
        assert_eq!(tb_delay_exponential(2.0, 2.0, &mut b), TbStatus::Ok);
        assert_eq!(tb_delay_convolve(a, b, &mut c), TbStatus::Ok);
        assert_eq!(tb_delay_erlang(2, 2.0, &mut e), TbStatus::Ok);
        let (mut mc, mut me) = (TbMoments::default(), TbMoments::default());
        assert_eq!(tb_delay_moments(c, &mut mc), TbStatus::Ok);
        assert_eq!(tb_delay_moments(e, &mut me), TbStatus::Ok);
        assert!((mc.mean - 1.0).abs() < 1e-6, "{mc:?}");
        assert!((mc.accuracy - 2.0).abs() < 1e-4, "{mc:?}");
        assert!((me.accuracy - 2.0).abs() < 1e-9, "{me:?}");

        let mut over = ptr::null_mut();
        assert_ne!(tb_delay_mix(a, b, &mut over), TbStatus::Ok);
        assert!(over.is_null());

        let values: Vec<f64> = (0..2000).map(|i| (-(i as f64) * 0.01).exp()).collect();
        let mut s = ptr::null_mut();
        assert_eq!(tb_delay_sampled(0.01, values.as_ptr(), values.len(), &mut s), TbStatus::Ok);
        let mut ms = TbMoments::default();
        assert_eq!(tb_delay_moments(s, &mut ms), TbStatus::Ok);
        assert!((ms.mass - 1.0).abs() < 1e-6, "{ms:?}");

        for p in [a, b, c, e, s] {
            tb_delay_free(p);
        }
    }
}

#[test]
fn quantum_clock_from_spec() {
    unsafe {
        let json = CString::new(r#"{"d": 1, "potential": {"kind": "diag", "values": [0.5]}, "state": "swp"}"#).unwrap();
        let mut q = ptr::null_mut();
        assert_eq!(tb_quantum_clock_from_json(json.as_ptr(), &mut q), TbStatus::Ok, "{}", last_error());
        let mut m = TbMoments::default();
        assert_eq!(tb_quantum_clock_moments(q, 1024, &mut m), TbStatus::Ok);
        assert!((m.accuracy - 1.0).abs() < 1e-6, "{m:?}");
        tb_quantum_clock_free(q);

        let mut r1 = 0.0;
        let status = tb_quantum_optimize_diag(2, 0.0, 400, 0, &mut r1, &mut q);
        assert!(matches!(status, TbStatus::Ok | TbStatus::BudgetExhausted));
        assert!(r1 >= 3.8, "R1 = {r1}");
        tb_quantum_clock_free(q);
    }
}

#[test]
fn version_and_header() {
    let v = unsafe { CStr::from_ptr(tb_version()) }.to_str().unwrap();
    assert_eq!(v, env!("CARGO_PKG_VERSION"));
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/tickbench.h")).unwrap();
    for name in [
        "tb_ladder_clock_new",
        "tb_classical_clock_from_json",
        "tb_quantum_clock_moments",
        "tb_delay_convolve",
        "tb_last_error_message",
        "TB_STATUS_BUDGET_EXHAUSTED",
        "typedef struct TbDelay TbDelay",
    ] {
        assert!(header.contains(name), "{name} missing from header");
    }
}
