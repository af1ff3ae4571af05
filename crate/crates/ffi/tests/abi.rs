use std::ffi::{CStr, CString};
use std::ptr;

use roughvar_ffi::*;

fn take_string(s: *mut libc::c_char) -> String {
    assert!(!s.is_null());
    let out = unsafe { CStr::from_ptr(s) }.to_str().unwrap().to_string();
    unsafe { rv_string_free(s) };
    out
}

fn rational_string(r: *const RvRational) -> String {
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { rv_rational_to_string(r, &mut s) }, RV_OK);
    take_string(s)
}

fn last_error() -> String {
    let p = rv_last_error_message();
    assert!(!p.is_null());
    unsafe { CStr::from_ptr(p) }.to_str().unwrap().to_string()
}

#[test]
fn main_term_round_trip() {
    let mut r = ptr::null_mut();
    assert_eq!(unsafe { rv_main_term(3, 3, RV_METHOD_CORRELATION, &mut r) }, RV_OK);
    assert_eq!(rational_string(r), "1/3");
    assert!((unsafe { rv_rational_to_f64(r) } - 1.0 / 3.0).abs() < 1e-16);
    let mut d = ptr::null_mut();
    assert_eq!(unsafe { rv_main_term(3, 3, RV_METHOD_DIRECT, &mut d) }, RV_OK);
    assert_eq!(unsafe { rv_rational_equal(r, d) }, 1);
    unsafe {
        rv_rational_free(r);
        rv_rational_free(d);
    }
}

#[test]
fn variance_identity_through_the_abi() {
    let (mut v, mut q, mut hs) = (ptr::null_mut(), ptr::null_mut(), ptr::null_mut());
    unsafe {
        assert_eq!(rv_variance_exact(6, 3, 3, 0, &mut v), RV_OK);
        assert_eq!(rv_variance_mod_q(6, 3, &mut q), RV_OK);
        assert_eq!(rv_hausman_shapiro(6, 3, &mut hs), RV_OK);
        assert_eq!(rv_rational_equal(v, q), 1);
        assert_eq!(rv_rational_equal(q, hs), 1);
        rv_rational_free(v);
        rv_rational_free(q);
        rv_rational_free(hs);
    }
}

#[test]
fn scalar_functions() {
    let mut n = 0u64;
    assert_eq!(unsafe { rv_psi(100, 3, &mut n) }, RV_OK);
    assert_eq!(n, 20);
    let mut f = 0.0;
    assert_eq!(unsafe { rv_dickman_rho(2.0, &mut f) }, RV_OK);
    assert!((f - (1.0 - 2f64.ln())).abs() < 1e-12);
    assert_eq!(unsafe { rv_lambda(0.0, &mut f) }, RV_OK);
    assert!((f - 1.0).abs() < 1e-6);
    assert_eq!(unsafe { rv_saddle_alpha(10.0, 100, &mut f) }, RV_OK);
    assert!(f > 0.0 && f < 1.0);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { rv_zeta(2.0, 0.0, &mut re, &mut im) }, RV_OK);
    assert!((re - std::f64::consts::PI.powi(2) / 6.0).abs() < 1e-12 && im == 0.0);
    assert_eq!(unsafe { rv_contour_i(10.0, 5, 0.75, 1e-6, &mut f) }, RV_OK);
    assert!((f - 8.0 / 9.0).abs() < 1e-6);
}

#[test]
fn errors_carry_codes_and_messages() {
    let mut r = ptr::null_mut();
    let code = unsafe { rv_hausman_shapiro(12, 3, &mut r) };
    assert_eq!(code, RV_E_NOT_SQUAREFREE);
    assert!(r.is_null());
    assert_eq!(unsafe { CStr::from_ptr(rv_status_name(code)) }.to_str().unwrap(), "E_NOT_SQUAREFREE");
    assert!(last_error().contains("12 is not squarefree"));

    assert_eq!(unsafe { rv_zeta(1.0, 0.0, ptr::null_mut(), ptr::null_mut()) }, RV_NULL_POINTER);
    let (mut re, mut im) = (0.0, 0.0);
    assert_eq!(unsafe { rv_zeta(1.0, 0.0, &mut re, &mut im) }, RV_E_POLE);
    assert_eq!(unsafe { rv_main_term(3, 3, 7, &mut r) }, RV_E_INVALID_INPUT);
    assert!(unsafe { rv_rational_to_f64(ptr::null()) }.is_nan());
    unsafe {
        rv_rational_free(ptr::null_mut());
        rv_report_free(ptr::null_mut());
        rv_string_free(ptr::null_mut());
    }
}

#[test]
fn reports_render() {
    let grid = CString::new("16:1000,1000:100").unwrap();
    let mut rep = ptr::null_mut();
    assert_eq!(unsafe { rv_report_regimes(grid.as_ptr(), 2, &mut rep) }, RV_OK);
    assert_eq!(unsafe { rv_report_rows(rep) }, 2);
    let mut s = ptr::null_mut();
    assert_eq!(unsafe { rv_report_render(rep, RV_FORMAT_CSV, &mut s) }, RV_OK);
    let csv = take_string(s);
    assert!(csv.starts_with("H,y,regime,"));
    assert!(csv.contains("bounded_u"));
    assert_eq!(unsafe { rv_report_render(rep, 9, &mut s) }, 21);
    unsafe { rv_report_free(rep) };

    let xs = [6000u64, 6006];
    assert_eq!(unsafe { rv_report_converge(16, 3, xs.as_ptr(), xs.len(), 1, 0, &mut rep) }, 19);
    assert!(last_error().starts_with("E_RANGE_VIOLATED"));
    assert_eq!(unsafe { rv_report_converge(16, 3, xs.as_ptr(), xs.len(), 1, 1, &mut rep) }, RV_OK);
    assert_eq!(unsafe { rv_report_render(rep, RV_FORMAT_JSON, &mut s) }, RV_OK);
    let json: serde_json::Value = serde_json::from_str(&take_string(s)).unwrap();
    assert_eq!(json["rows"].as_array().unwrap().len(), 2);
    assert_eq!(json["rows"][0]["ratio"], 1.0);
    unsafe { rv_report_free(rep) };

    let bad = [0xffu8, 0];
    assert_eq!(unsafe { rv_report_regimes(bad.as_ptr() as *const libc::c_char, 1, &mut rep) }, RV_BAD_STRING);
}

#[test]
fn header_declares_every_export() {
    let header = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/include/roughvar.h")).unwrap();
    let src = std::fs::read_to_string(concat!(env!("CARGO_MANIFEST_DIR"), "/src/lib.rs")).unwrap();
    let mut n = 0;
    for line in src.lines() {
        if let Some(rest) = line.split("extern \"C\" fn ").nth(1) {
            let name = rest.split('(').next().unwrap();
            assert!(header.contains(&format!("{name}(")), "{name} missing from header");
            n += 1;
        }
    }
    assert!(n >= 18);
    assert!(header.contains("typedef struct RvRational RvRational;"));
}

#[test]
fn status_constants_match_library_codes() {
    use roughvar::Error;
    let cases = [
        (Error::SegmentTooLarge { lo: 0, hi: 1, len: 1, budget: 0 }, RV_E_SEGMENT_TOO_LARGE),
        (Error::PrimeCapExceeded { y: 1, cap: 0 }, RV_E_PRIME_CAP),
        (Error::SupportTooLarge { odd_primes: 1, cap: 0 }, RV_E_SUPPORT_TOO_LARGE),
        (Error::NotSquarefree(4), RV_E_NOT_SQUAREFREE),
        (Error::ModulusTooLarge { q: 1, cap: 0 }, RV_E_MODULUS_TOO_LARGE),
        (Error::BudgetExceeded(0), RV_E_BUDGET_EXCEEDED),
        (Error::OutOfRange(String::new()), RV_E_OUT_OF_RANGE),
        (Error::Pole(String::new()), RV_E_POLE),
        (Error::UnsupportedRegime(String::new()), RV_E_UNSUPPORTED_REGIME),
        (Error::RangeViolated(String::new()), RV_E_RANGE_VIOLATED),
        (Error::TruncationInsufficient { bound: 1.0, tolerance: 0.0 }, RV_E_TRUNCATION),
        (Error::InvalidInput(String::new()), RV_E_INVALID_INPUT),
    ];
    for (e, code) in cases {
        assert_eq!(e.numeric_code(), code);
        assert_eq!(unsafe { CStr::from_ptr(rv_status_name(code)) }.to_str().unwrap(), e.code());
    }
}
