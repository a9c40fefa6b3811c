//! C ABI for the clode analysis pipeline: opaque report handles, integer
//! status codes, and a thread-local last-error message.
//!
//! Every function is callable from C against the generated `clode.h`. The
//! report handle owns its serialized forms; strings returned from accessor
//! functions stay valid until the handle is freed.

use clode::parse::parse_problem;
use clode::report::{analyze_file, render_text, symmetries_report, Overrides, Report};
use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::ptr;

/// Status codes mirroring the CLI exit-code contract.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq, Debug)]
pub enum ClodeStatus {
    ClodeOk = 0,
    ClodeParseError = 2,
    ClodeUndecided = 3,
    ClodeInvalidArgument = 4,
    ClodeInternalError = 5,
}

/// Opaque analysis result. Obtain with `clode_analyze` / `clode_symmetries`,
/// read with the accessors, release with `clode_report_free`.
pub struct ClodeReport {
    json: CString,
    text: CString,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn make_report(r: &Report) -> *mut ClodeReport {
    let json = serde_json::to_string_pretty(r).unwrap_or_else(|_| "{}".into());
    let text = render_text(r);
    Box::into_raw(Box::new(ClodeReport {
        json: CString::new(json).unwrap_or_default(),
        text: CString::new(text).unwrap_or_default(),
    }))
}

fn overrides(degree: i32, seed: i64, tol: f64) -> Overrides {
    Overrides {
        degree: (degree >= 0).then_some(degree as u32),
        seed: (seed >= 0).then_some(seed as u64),
        tol: (tol > 0.0).then_some(tol),
    }
}

unsafe fn run(
    problem_text: *const c_char,
    degree: i32,
    seed: i64,
    tol: f64,
    out: *mut *mut ClodeReport,
    symmetries_only: bool,
) -> ClodeStatus {
    if problem_text.is_null() || out.is_null() {
        set_error("null pointer argument");
        return ClodeStatus::ClodeInvalidArgument;
    }
    *out = ptr::null_mut();
    let text = match CStr::from_ptr(problem_text).to_str() {
        Ok(t) => t,
        Err(_) => {
            set_error("problem text is not valid UTF-8");
            return ClodeStatus::ClodeInvalidArgument;
        }
    };
    let file = match parse_problem(text) {
        Ok(f) => f,
        Err(e) => {
            set_error(&e.to_string());
            return ClodeStatus::ClodeParseError;
        }
    };
    let over = overrides(degree, seed, tol);
    let result = if symmetries_only {
        symmetries_report(&file, &over)
    } else {
        analyze_file(&file, &over)
    };
    match result {
        Ok(r) => {
            *out = make_report(&r);
            ClodeStatus::ClodeOk
        }
        Err(e) => {
            set_error(&e.to_string());
            match e.exit_code() {
                2 => ClodeStatus::ClodeParseError,
                3 => ClodeStatus::ClodeUndecided,
                _ => ClodeStatus::ClodeInternalError,
            }
        }
    }
}

/// Analyze a problem text (same format as the CLI's problem files).
/// Pass degree < 0, seed < 0 or tol <= 0 for the defaults.
///
/// # Safety
/// `problem_text` must be a valid NUL-terminated string and `out` a valid
/// pointer to a report-handle slot.
#[no_mangle]
pub unsafe extern "C" fn clode_analyze(
    problem_text: *const c_char,
    degree: i32,
    seed: i64,
    tol: f64,
    out: *mut *mut ClodeReport,
) -> ClodeStatus {
    run(problem_text, degree, seed, tol, out, false)
}

/// Compute only the symmetry section.
///
/// # Safety
/// Same contract as [`clode_analyze`].
#[no_mangle]
pub unsafe extern "C" fn clode_symmetries(
    problem_text: *const c_char,
    degree: i32,
    seed: i64,
    tol: f64,
    out: *mut *mut ClodeReport,
) -> ClodeStatus {
    run(problem_text, degree, seed, tol, out, true)
}

/// JSON form of a report; owned by the handle.
///
/// # Safety
/// `report` must be a live handle from this library (or NULL).
#[no_mangle]
pub unsafe extern "C" fn clode_report_json(report: *const ClodeReport) -> *const c_char {
    match report.as_ref() {
        Some(r) => r.json.as_ptr(),
        None => ptr::null(),
    }
}

/// Text rendering of a report; owned by the handle.
///
/// # Safety
/// `report` must be a live handle from this library (or NULL).
#[no_mangle]
pub unsafe extern "C" fn clode_report_text(report: *const ClodeReport) -> *const c_char {
    match report.as_ref() {
        Some(r) => r.text.as_ptr(),
        None => ptr::null(),
    }
}

/// Release a report handle.
///
/// # Safety
/// `report` must be NULL or a handle not freed before.
#[no_mangle]
pub unsafe extern "C" fn clode_report_free(report: *mut ClodeReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Copy the last error message of this thread into `buf` (NUL-terminated,
/// truncating); returns the full message length.
///
/// # Safety
/// `buf` must point to at least `len` writable bytes, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn clode_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        let bytes = msg.as_bytes();
        if !buf.is_null() && len > 0 {
            let n = bytes.len().min(len - 1);
            ptr::copy_nonoverlapping(bytes.as_ptr() as *const c_char, buf, n);
            *buf.add(n) = 0;
        }
        bytes.len()
    })
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn clode_version() -> *const c_char {
    static VERSION: &str = concat!(env!("CARGO_PKG_VERSION"), "\0");
    VERSION.as_ptr() as *const c_char
}

#[cfg(test)]
mod tests {
    use super::*;

    fn analyze_str(text: &str) -> (ClodeStatus, *mut ClodeReport) {
        let c = CString::new(text).unwrap();
        let mut out: *mut ClodeReport = ptr::null_mut();
        let status = unsafe { clode_analyze(c.as_ptr(), -1, -1, 0.0, &mut out) };
        (status, out)
    }

    #[test]
    fn analyze_through_the_abi() {
        let (status, report) =
            analyze_str("f1'' = f1'^3 - 3*f1'*f2'^2\nf2'' = 3*f1'^2*f2' - f2'^3\n");
        assert_eq!(status, ClodeStatus::ClodeOk);
        let json = unsafe { CStr::from_ptr(clode_report_json(report)) }
            .to_str()
            .unwrap()
            .to_owned();
        assert!(json.contains("\"class\": \"upsilon2\""));
        assert!(json.contains("u'' = u'^3"));
        let text = unsafe { CStr::from_ptr(clode_report_text(report)) }
            .to_str()
            .unwrap()
            .to_owned();
        assert!(text.contains("CR gate: pass"));
        unsafe { clode_report_free(report) };
    }

    #[test]
    fn parse_errors_set_status_and_message() {
        let (status, report) = analyze_str("f1'' = +\n");
        assert_eq!(status, ClodeStatus::ClodeParseError);
        assert!(report.is_null());
        let mut buf = vec![0u8; 256];
        let n = unsafe { clode_last_error(buf.as_mut_ptr() as *mut c_char, buf.len()) };
        assert!(n > 0);
        let msg = unsafe { CStr::from_ptr(buf.as_ptr() as *const c_char) }
            .to_str()
            .unwrap();
        assert!(msg.contains("1:8"), "{msg}");
    }

    #[test]
    fn null_arguments_are_rejected() {
        let mut out: *mut ClodeReport = ptr::null_mut();
        let status = unsafe { clode_analyze(ptr::null(), -1, -1, 0.0, &mut out) };
        assert_eq!(status, ClodeStatus::ClodeInvalidArgument);
    }

    #[test]
    fn version_is_a_c_string() {
        let v = unsafe { CStr::from_ptr(clode_version()) }.to_str().unwrap();
        assert!(!v.is_empty());
    }
}
