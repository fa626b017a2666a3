//! C ABI for the codiff engine: opaque report handles, status codes, and
//! UTF-8 text exchange. Every entry point catches panics and reports them
//! as a status; the last error message is kept per thread and handed out as
//! a caller-freed C string.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use codiff::error::Error;
use codiff::io::{
    parse_input, render_report, render_verify, run, run_check, run_verify, Format,
    MiniversalReport, RunConfig, VerifyReport,
};

/// Status codes returned by every entry point.
#[repr(C)]
#[derive(Clone, Copy, PartialEq, Eq)]
pub enum CodiffStatus {
    /// Success.
    Ok = 0,
    /// Malformed input text (syntax, unknown names, bad flags).
    InvalidInput = 1,
    /// Mathematically rejected: not a codifferential, or the deformation
    /// does not factor in verify mode.
    MathReject = 2,
    /// The word-count resource cap was exceeded.
    ResourceLimit = 3,
    /// A null pointer or invalid UTF-8 was passed.
    BadArgument = 4,
    /// An internal invariant failed; the message names the panic.
    InternalError = 5,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: String) {
    let cstring = CString::new(message.replace('\0', " "))
        .unwrap_or_else(|_| CString::new("error message unavailable").unwrap());
    LAST_ERROR.with(|slot| *slot.borrow_mut() = Some(cstring));
}

fn status_of(error: &Error) -> CodiffStatus {
    match error {
        Error::NotCodifferential { .. } | Error::DoesNotFactor { .. } => CodiffStatus::MathReject,
        Error::ResourceLimit { .. } => CodiffStatus::ResourceLimit,
        _ => CodiffStatus::InvalidInput,
    }
}

fn fail(error: Error) -> CodiffStatus {
    let status = status_of(&error);
    set_error(error.to_string());
    status
}

/// Opaque handle to a computed miniversal report.
pub struct CodiffReport {
    report: MiniversalReport,
}

/// Opaque handle to a verify-mode result.
pub struct CodiffVerify {
    report: VerifyReport,
}

unsafe fn read_utf8<'a>(text: *const c_char) -> Result<&'a str, CodiffStatus> {
    if text.is_null() {
        set_error("null input pointer".into());
        return Err(CodiffStatus::BadArgument);
    }
    CStr::from_ptr(text).to_str().map_err(|_| {
        set_error("input is not valid UTF-8".into());
        CodiffStatus::BadArgument
    })
}

fn guard<F: FnOnce() -> CodiffStatus>(f: F) -> CodiffStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(status) => status,
        Err(payload) => {
            let message = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("internal error: {message}"));
            CodiffStatus::InternalError
        }
    }
}

fn resolve(
    text: &str,
    weight_cap: u32,
    order: u32,
    strict: bool,
) -> Result<(codiff::io::AlgebraInput, RunConfig), Error> {
    let input = parse_input(text)?;
    let cap_flag = if weight_cap == 0 { None } else { Some(weight_cap as usize) };
    let order_flag = if order == 0 { None } else { Some(order as usize) };
    let config = RunConfig::resolve(&input, cap_flag, order_flag, strict)?;
    Ok((input, config))
}

/// Check that the input defines a codifferential. `weight_cap` 0 means
/// "from the file or the default".
///
/// # Safety
/// `input` must be a valid NUL-terminated UTF-8 string or NULL.
#[no_mangle]
pub unsafe extern "C" fn codiff_check(
    input: *const c_char,
    weight_cap: u32,
    strict: bool,
) -> CodiffStatus {
    guard(|| {
        let text = match read_utf8(input) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match resolve(text, weight_cap, 0, strict)
            .and_then(|(parsed, config)| run_check(&parsed, config))
        {
            Ok(()) => CodiffStatus::Ok,
            Err(e) => fail(e),
        }
    })
}

/// Run the miniversal construction; on success `*out` owns a report handle
/// to be released with [`codiff_report_free`].
///
/// # Safety
/// `input` must be a valid NUL-terminated UTF-8 string or NULL; `out` must
/// be a valid pointer to a report-handle slot.
#[no_mangle]
pub unsafe extern "C" fn codiff_miniversal(
    input: *const c_char,
    weight_cap: u32,
    order: u32,
    strict: bool,
    out: *mut *mut CodiffReport,
) -> CodiffStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer".into());
            return CodiffStatus::BadArgument;
        }
        *out = ptr::null_mut();
        let text = match read_utf8(input) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match resolve(text, weight_cap, order, strict)
            .and_then(|(parsed, config)| run(&parsed, config))
        {
            Ok(report) => {
                *out = Box::into_raw(Box::new(CodiffReport { report }));
                CodiffStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Render a report as text; the returned string is owned by the caller and
/// released with [`codiff_string_free`]. NULL on a null handle.
///
/// # Safety
/// `report` must be a handle from [`codiff_miniversal`] that has not been
/// freed.
#[no_mangle]
pub unsafe extern "C" fn codiff_report_render(
    report: *const CodiffReport,
    machine: bool,
) -> *mut c_char {
    if report.is_null() {
        return ptr::null_mut();
    }
    let format = if machine { Format::Machine } else { Format::Text };
    let text = render_report(&(*report).report, format);
    CString::new(text.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Number of base generators (deformation parameters) in a report.
///
/// # Safety
/// `report` must be a live handle from [`codiff_miniversal`].
#[no_mangle]
pub unsafe extern "C" fn codiff_report_parameter_count(report: *const CodiffReport) -> u32 {
    if report.is_null() {
        return 0;
    }
    (*report).report.generators.len() as u32
}

/// Number of relation polynomials in a report.
///
/// # Safety
/// `report` must be a live handle from [`codiff_miniversal`].
#[no_mangle]
pub unsafe extern "C" fn codiff_report_relation_count(report: *const CodiffReport) -> u32 {
    if report.is_null() {
        return 0;
    }
    (*report).report.relations.len() as u32
}

/// Release a report handle.
///
/// # Safety
/// `report` must be a handle from [`codiff_miniversal`], not yet freed;
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn codiff_report_free(report: *mut CodiffReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Factor a user-supplied deformation through the miniversal deformation.
/// On success `*out` owns a verify handle.
///
/// # Safety
/// `input` must be a valid NUL-terminated UTF-8 string or NULL; `out` must
/// be a valid pointer to a handle slot.
#[no_mangle]
pub unsafe extern "C" fn codiff_verify(
    input: *const c_char,
    weight_cap: u32,
    order: u32,
    strict: bool,
    out: *mut *mut CodiffVerify,
) -> CodiffStatus {
    guard(|| {
        if out.is_null() {
            set_error("null output pointer".into());
            return CodiffStatus::BadArgument;
        }
        *out = ptr::null_mut();
        let text = match read_utf8(input) {
            Ok(t) => t,
            Err(status) => return status,
        };
        match resolve(text, weight_cap, order, strict)
            .and_then(|(parsed, config)| run_verify(&parsed, config))
        {
            Ok(report) => {
                *out = Box::into_raw(Box::new(CodiffVerify { report }));
                CodiffStatus::Ok
            }
            Err(e) => fail(e),
        }
    })
}

/// Render a verify result; caller frees with [`codiff_string_free`].
///
/// # Safety
/// `verify` must be a live handle from [`codiff_verify`].
#[no_mangle]
pub unsafe extern "C" fn codiff_verify_render(
    verify: *const CodiffVerify,
    machine: bool,
) -> *mut c_char {
    if verify.is_null() {
        return ptr::null_mut();
    }
    let format = if machine { Format::Machine } else { Format::Text };
    let text = render_verify(&(*verify).report, format);
    CString::new(text.replace('\0', " ")).map_or(ptr::null_mut(), CString::into_raw)
}

/// Release a verify handle.
///
/// # Safety
/// `verify` must be a handle from [`codiff_verify`], not yet freed; NULL is
/// ignored.
#[no_mangle]
pub unsafe extern "C" fn codiff_verify_free(verify: *mut CodiffVerify) {
    if !verify.is_null() {
        drop(Box::from_raw(verify));
    }
}

/// Take the last error message for this thread, or NULL when none is set.
/// The caller releases it with [`codiff_string_free`].
#[no_mangle]
pub extern "C" fn codiff_last_error() -> *mut c_char {
    LAST_ERROR.with(|slot| match slot.borrow_mut().take() {
        Some(message) => message.into_raw(),
        None => ptr::null_mut(),
    })
}

/// Release a string returned by this library.
///
/// # Safety
/// `text` must be a string returned by a codiff function, not yet freed;
/// NULL is ignored.
#[no_mangle]
pub unsafe extern "C" fn codiff_string_free(text: *mut c_char) {
    if !text.is_null() {
        drop(CString::from_raw(text));
    }
}
