//! C ABI over `roughvar`.
//!
//! Conventions:
//!
//! * every fallible function returns an `int32_t` status, `RV_OK` (0) on
//!   success; the numeric codes match the CLI exit statuses
//! * results come back through out-pointers
//! * exact values are opaque `RvRational` handles, reports are `RvReport`
//!   handles; each has its own `_free`
//! * strings handed out by the library are freed with `rv_string_free`
//! * after a failure `rv_last_error_message` describes it (per thread)
//!
//! Panics never cross the boundary; they surface as `RV_PANIC`.

use std::cell::RefCell;
use std::ffi::{CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use libc::c_char;
use num_complex::Complex64;

use roughvar::analytic::{contour_i_residue, zeta_complex, ContourSpec};
use roughvar::friable::{dickman_rho, lambda, psi, saddle_alpha};
use roughvar::main_term::{hausman_shapiro_vq, main_term, Method};
use roughvar::rational::{to_f64, to_string_exact};
use roughvar::report::{self, Flags, Format, Table};
use roughvar::variance::{variance_exact_threads, variance_mod_q};
use roughvar::{Error, ExactRational};

pub const RV_OK: i32 = 0;
/// A required pointer argument was null.
pub const RV_NULL_POINTER: i32 = 2;
/// The library panicked; the handle graph is still consistent.
pub const RV_PANIC: i32 = 3;
/// A string argument was not valid UTF-8.
pub const RV_BAD_STRING: i32 = 4;

// Library errors; `rv_status_name` gives the symbolic form.
pub const RV_E_SEGMENT_TOO_LARGE: i32 = 10;
pub const RV_E_PRIME_CAP: i32 = 11;
pub const RV_E_SUPPORT_TOO_LARGE: i32 = 12;
pub const RV_E_NOT_SQUAREFREE: i32 = 13;
pub const RV_E_MODULUS_TOO_LARGE: i32 = 14;
pub const RV_E_BUDGET_EXCEEDED: i32 = 15;
pub const RV_E_OUT_OF_RANGE: i32 = 16;
pub const RV_E_POLE: i32 = 17;
pub const RV_E_UNSUPPORTED_REGIME: i32 = 18;
pub const RV_E_RANGE_VIOLATED: i32 = 19;
pub const RV_E_TRUNCATION: i32 = 20;
pub const RV_E_INVALID_INPUT: i32 = 21;

pub const RV_METHOD_DIRECT: i32 = 0;
pub const RV_METHOD_CORRELATION: i32 = 1;

pub const RV_FORMAT_CSV: i32 = 0;
pub const RV_FORMAT_JSON: i32 = 1;
pub const RV_FORMAT_TABLE: i32 = 2;

/// Exact rational number.
pub struct RvRational {
    value: ExactRational,
}

/// Rendered-on-demand report table.
pub struct RvReport {
    table: Table,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(e: Error) -> i32 {
    set_error(format!("{}: {e}", e.code()));
    e.numeric_code()
}

/// Runs `f` behind `catch_unwind`, mapping errors to status codes.
fn guard<F: FnOnce() -> Result<(), i32>>(f: F) -> i32 {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => RV_OK,
        Ok(Err(code)) => code,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            RV_PANIC
        }
    }
}

fn check<T>(p: *const T, what: &str) -> Result<(), i32> {
    if p.is_null() {
        set_error(format!("null pointer: {what}"));
        Err(RV_NULL_POINTER)
    } else {
        Ok(())
    }
}

/// # Safety
/// `out` must be valid for one write.
unsafe fn put<T>(out: *mut T, v: T) {
    // SAFETY: checked non-null by the caller; validity is the caller's contract.
    unsafe { out.write(v) }
}

fn boxed_rational(value: ExactRational) -> *mut RvRational {
    Box::into_raw(Box::new(RvRational { value }))
}

fn c_string(s: String) -> *mut c_char {
    CString::new(s.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Message for the last failure on this thread, or NULL. Owned by the
/// library; valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn rv_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Symbolic name of a status code; static storage.
#[no_mangle]
pub extern "C" fn rv_status_name(code: i32) -> *const c_char {
    let s: &'static CStr = match code {
        RV_OK => c"RV_OK",
        RV_NULL_POINTER => c"RV_NULL_POINTER",
        RV_PANIC => c"RV_PANIC",
        RV_BAD_STRING => c"RV_BAD_STRING",
        RV_E_SEGMENT_TOO_LARGE => c"E_SEGMENT_TOO_LARGE",
        RV_E_PRIME_CAP => c"E_PRIME_CAP",
        RV_E_SUPPORT_TOO_LARGE => c"E_SUPPORT_TOO_LARGE",
        RV_E_NOT_SQUAREFREE => c"E_NOT_SQUAREFREE",
        RV_E_MODULUS_TOO_LARGE => c"E_MODULUS_TOO_LARGE",
        RV_E_BUDGET_EXCEEDED => c"E_BUDGET_EXCEEDED",
        RV_E_OUT_OF_RANGE => c"E_OUT_OF_RANGE",
        RV_E_POLE => c"E_POLE",
        RV_E_UNSUPPORTED_REGIME => c"E_UNSUPPORTED_REGIME",
        RV_E_RANGE_VIOLATED => c"E_RANGE_VIOLATED",
        RV_E_TRUNCATION => c"E_TRUNCATION",
        RV_E_INVALID_INPUT => c"E_INVALID_INPUT",
        _ => c"RV_UNKNOWN",
    };
    s.as_ptr()
}

/// # Safety
/// `s` must be NULL or a string returned by this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rv_string_free(s: *mut c_char) {
    if !s.is_null() {
        // SAFETY: caller guarantees `s` came from `CString::into_raw` here.
        drop(unsafe { CString::from_raw(s) });
    }
}

/// # Safety
/// `r` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rv_rational_free(r: *mut RvRational) {
    if !r.is_null() {
        // SAFETY: handles are created by `Box::into_raw`.
        drop(unsafe { Box::from_raw(r) });
    }
}

/// `"p/q"` (or `"p"`); free with `rv_string_free`.
///
/// # Safety
/// `r` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_rational_to_string(r: *const RvRational, out: *mut *mut c_char) -> i32 {
    guard(|| {
        check(r, "r")?;
        check(out, "out")?;
        // SAFETY: checked non-null; liveness is the caller's contract.
        let s = to_string_exact(unsafe { &(*r).value });
        unsafe { put(out, c_string(s)) };
        Ok(())
    })
}

/// Nearest double.
///
/// # Safety
/// `r` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rv_rational_to_f64(r: *const RvRational) -> f64 {
    if r.is_null() {
        return f64::NAN;
    }
    // SAFETY: non-null live handle.
    to_f64(unsafe { &(*r).value })
}

/// 1 if equal, 0 if not (or either is NULL).
///
/// # Safety
/// Both must be NULL or live handles.
#[no_mangle]
pub unsafe extern "C" fn rv_rational_equal(a: *const RvRational, b: *const RvRational) -> i32 {
    if a.is_null() || b.is_null() {
        return 0;
    }
    // SAFETY: non-null live handles.
    i32::from(unsafe { (*a).value == (*b).value })
}

/// Exact main term `M(H, y)`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_main_term(h: u64, y: u64, method: i32, out: *mut *mut RvRational) -> i32 {
    guard(|| {
        check(out, "out")?;
        let m = match method {
            RV_METHOD_DIRECT => Method::Direct,
            RV_METHOD_CORRELATION => Method::Correlation,
            _ => return Err(fail(Error::InvalidInput(format!("unknown method {method}")))),
        };
        let v = main_term(h, y, m).map_err(fail)?;
        unsafe { put(out, boxed_rational(v.value)) };
        Ok(())
    })
}

/// Exact `V(X, H, y)`; `threads = 0` means one.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_variance_exact(x: u64, h: u64, y: u64, threads: u32, out: *mut *mut RvRational) -> i32 {
    guard(|| {
        check(out, "out")?;
        let v = variance_exact_threads(x, h, y, threads.max(1) as usize).map_err(fail)?;
        unsafe { put(out, boxed_rational(v.variance)) };
        Ok(())
    })
}

/// Variance of totatives of `q` in windows of length `H`, by enumeration.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_variance_mod_q(q: u64, h: u64, out: *mut *mut RvRational) -> i32 {
    guard(|| {
        check(out, "out")?;
        let v = variance_mod_q(q, h).map_err(fail)?;
        unsafe { put(out, boxed_rational(v)) };
        Ok(())
    })
}

/// The same variance from the closed form over divisors of `q`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_hausman_shapiro(q: u64, h: u64, out: *mut *mut RvRational) -> i32 {
    guard(|| {
        check(out, "out")?;
        let v = hausman_shapiro_vq(q, h).map_err(fail)?;
        unsafe { put(out, boxed_rational(v)) };
        Ok(())
    })
}

/// `Psi(x, y)`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_psi(x: u64, y: u64, out: *mut u64) -> i32 {
    guard(|| {
        check(out, "out")?;
        let v = psi(x, y).map_err(fail)?;
        unsafe { put(out, v) };
        Ok(())
    })
}

/// Dickman `rho(u)`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_dickman_rho(u: f64, out: *mut f64) -> i32 {
    guard(|| {
        check(out, "out")?;
        let v = dickman_rho(u).map_err(fail)?;
        unsafe { put(out, v) };
        Ok(())
    })
}

/// `lambda(u) = e^-gamma int_u^inf rho`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_lambda(u: f64, out: *mut f64) -> i32 {
    guard(|| {
        check(out, "out")?;
        let v = lambda(u).map_err(fail)?;
        unsafe { put(out, v) };
        Ok(())
    })
}

/// Saddle point `alpha(x, y)` given `log x`.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_saddle_alpha(log_x: f64, y: u64, out: *mut f64) -> i32 {
    guard(|| {
        check(out, "out")?;
        let s = saddle_alpha(log_x, y).map_err(fail)?;
        unsafe { put(out, s.alpha) };
        Ok(())
    })
}

/// `zeta(re + i im)`.
///
/// # Safety
/// `out_re` and `out_im` must each be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_zeta(re: f64, im: f64, out_re: *mut f64, out_im: *mut f64) -> i32 {
    guard(|| {
        check(out_re, "out_re")?;
        check(out_im, "out_im")?;
        let z = zeta_complex(Complex64::new(re, im)).map_err(fail)?;
        unsafe {
            put(out_re, z.re);
            put(out_im, z.im);
        }
        Ok(())
    })
}

/// `I_c(x, y)` for `c` in `(1/2, 1)` through the residue relation.
///
/// # Safety
/// `out` must be valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_contour_i(x: f64, y: u64, c: f64, tolerance: f64, out: *mut f64) -> i32 {
    guard(|| {
        check(out, "out")?;
        let spec = ContourSpec::new(c, tolerance);
        spec.validate().map_err(fail)?;
        let r = contour_i_residue(x, y, &spec).map_err(fail)?;
        unsafe { put(out, r.value) };
        Ok(())
    })
}

fn boxed_report(table: Table) -> *mut RvReport {
    Box::into_raw(Box::new(RvReport { table }))
}

/// `V(X, H, y) / M(H, y)` along `n_x` values of `X`. `force != 0` skips the
/// range check.
///
/// # Safety
/// `xs` must point to `n_x` readable values; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_report_converge(
    h: u64,
    y: u64,
    xs: *const u64,
    n_x: usize,
    threads: u32,
    force: i32,
    out: *mut *mut RvReport,
) -> i32 {
    guard(|| {
        check(xs, "xs")?;
        check(out, "out")?;
        // SAFETY: the caller promises `n_x` readable elements.
        let xs = unsafe { std::slice::from_raw_parts(xs, n_x) };
        let flags = Flags { threads: threads.max(1) as usize, force: force != 0, ..Flags::default() };
        let t = report::cmd_converge(h, y, xs, &flags).map_err(fail)?;
        unsafe { put(out, boxed_report(t)) };
        Ok(())
    })
}

/// Regime table for a grid written `"H:y,H:y,..."`.
///
/// # Safety
/// `grid` must be a NUL-terminated string; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_report_regimes(grid: *const c_char, threads: u32, out: *mut *mut RvReport) -> i32 {
    guard(|| {
        check(grid, "grid")?;
        check(out, "out")?;
        // SAFETY: NUL-terminated by contract.
        let s = unsafe { CStr::from_ptr(grid) }.to_str().map_err(|_| {
            set_error("grid is not valid UTF-8".into());
            RV_BAD_STRING
        })?;
        let points = report::parse_grid(s).map_err(fail)?;
        let flags = Flags { threads: threads.max(1) as usize, ..Flags::default() };
        let t = report::cmd_regimes(&points, &flags).map_err(fail)?;
        unsafe { put(out, boxed_report(t)) };
        Ok(())
    })
}

/// Number of rows.
///
/// # Safety
/// `r` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rv_report_rows(r: *const RvReport) -> usize {
    if r.is_null() {
        return 0;
    }
    // SAFETY: live handle.
    unsafe { (*r).table.rows.len() }
}

/// Renders as `RV_FORMAT_CSV`, `RV_FORMAT_JSON` or `RV_FORMAT_TABLE`; free
/// the string with `rv_string_free`.
///
/// # Safety
/// `r` must be a live handle; `out` valid for one write.
#[no_mangle]
pub unsafe extern "C" fn rv_report_render(r: *const RvReport, format: i32, out: *mut *mut c_char) -> i32 {
    guard(|| {
        check(r, "r")?;
        check(out, "out")?;
        let f = match format {
            RV_FORMAT_CSV => Format::Csv,
            RV_FORMAT_JSON => Format::Json,
            RV_FORMAT_TABLE => Format::Table,
            _ => return Err(fail(Error::InvalidInput(format!("unknown format {format}")))),
        };
        // SAFETY: live handle.
        let s = unsafe { &(*r).table }.render(f).map_err(fail)?;
        unsafe { put(out, c_string(s)) };
        Ok(())
    })
}

/// # Safety
/// `r` must be NULL or a live handle from this library.
#[no_mangle]
pub unsafe extern "C" fn rv_report_free(r: *mut RvReport) {
    if !r.is_null() {
        // SAFETY: handles are created by `Box::into_raw`.
        drop(unsafe { Box::from_raw(r) });
    }
}
