//! C ABI for the `azd` library.
//!
//! Objects are passed as opaque handles created by `azd_*_new`/`azd_*_parse`
//! style functions and released with the matching `*_free`. Every fallible
//! call returns an [`AzdStatus`]; on failure a description is available from
//! [`azd_last_error`] on the same thread. Strings returned through out
//! parameters are owned by the caller and released with [`azd_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use azd::arith::parse_rational;
use azd::az::{az_derive, verify_certificate, AzError, AzResult, Certificate, RecOperator, SearchConfig};
use azd::expr::{HyperTerm, ParamValues, VarSpec};
use azd::irrationality::{analyze_e, IrrationalityError};
use azd::quadrature::{integrate, Interval, QuadConfig, QuadError};
use azd::recurrence::{unroll, ExactNumber, RecurrenceError};

/// Result of every fallible call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum AzdStatus {
    Ok = 0,
    /// A required pointer argument was null.
    NullPointer = 1,
    /// Text was not valid UTF-8 or did not parse.
    ParseError = 2,
    /// Arguments were well formed but not acceptable.
    InvalidArgument = 3,
    /// No telescoper exists within the search bounds.
    NotFound = 4,
    /// A numerical or exact computation failed.
    ComputationFailed = 5,
    /// A Rust panic was caught at the boundary.
    Panic = 6,
}

/// A parsed integrand `F_n(x)`.
pub struct AzdTerm {
    term: HyperTerm,
}

/// An operator, certificate pair returned by [`azd_derive`].
pub struct AzdResult {
    result: AzResult,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).expect("nul bytes removed");
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

struct Fail(AzdStatus, String);

impl From<AzError> for Fail {
    fn from(e: AzError) -> Fail {
        let status = match e {
            AzError::NotFound { .. } => AzdStatus::NotFound,
            AzError::Expr(_) => AzdStatus::ParseError,
            AzError::Arith(_) => AzdStatus::ComputationFailed,
            _ => AzdStatus::InvalidArgument,
        };
        Fail(status, e.to_string())
    }
}

impl From<RecurrenceError> for Fail {
    fn from(e: RecurrenceError) -> Fail {
        let status = match e {
            RecurrenceError::Parse(_) => AzdStatus::ParseError,
            RecurrenceError::InitialCount { .. } => AzdStatus::InvalidArgument,
            RecurrenceError::Operator(a) => return a.into(),
            _ => AzdStatus::ComputationFailed,
        };
        Fail(status, e.to_string())
    }
}

impl From<QuadError> for Fail {
    fn from(e: QuadError) -> Fail {
        let status = match e {
            QuadError::InvalidInterval(_) | QuadError::InvalidTolerance => AzdStatus::InvalidArgument,
            _ => AzdStatus::ComputationFailed,
        };
        Fail(status, e.to_string())
    }
}

impl From<IrrationalityError> for Fail {
    fn from(e: IrrationalityError) -> Fail {
        let status = match e {
            IrrationalityError::InvalidArgument(_) => AzdStatus::InvalidArgument,
            _ => AzdStatus::ComputationFailed,
        };
        Fail(status, e.to_string())
    }
}

fn parse_fail(msg: impl ToString) -> Fail {
    Fail(AzdStatus::ParseError, msg.to_string())
}

fn guard<F: FnOnce() -> Result<(), Fail>>(f: F) -> AzdStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_error("");
            AzdStatus::Ok
        }
        Ok(Err(Fail(status, msg))) => {
            set_error(&msg);
            status
        }
        Err(_) => {
            set_error("internal panic");
            AzdStatus::Panic
        }
    }
}

/// # Safety
/// `p` must be null or a valid NUL-terminated string.
unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(AzdStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| parse_fail(format!("{what} is not UTF-8")))
}

/// # Safety
/// As for [`text`]; null yields `""`.
unsafe fn optional_text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        Ok("")
    } else {
        text(p, what)
    }
}

fn out_ptr<T>(p: *mut T, what: &str) -> Result<&'static mut T, Fail> {
    // SAFETY: callers pass pointers to writable storage; null is rejected.
    unsafe { p.as_mut() }.ok_or_else(|| Fail(AzdStatus::NullPointer, format!("{what} is null")))
}

fn new_string(s: &str) -> *mut c_char {
    CString::new(s.replace('\0', " ")).expect("nul bytes removed").into_raw()
}

fn spec_for(params: &str) -> Result<(VarSpec, ParamValues), Fail> {
    let mut names = Vec::new();
    let mut values = ParamValues::new();
    for item in params.split(',').map(str::trim).filter(|s| !s.is_empty()) {
        match item.split_once('=') {
            Some((name, value)) => {
                let v = parse_rational(value).ok_or_else(|| parse_fail(format!("bad value `{value}`")))?;
                names.push(name.trim().to_string());
                values.insert(name.trim(), v);
            }
            None => names.push(item.to_string()),
        }
    }
    let spec = VarSpec::new("x", "n", &names).map_err(parse_fail)?;
    Ok((spec, values))
}

/// Message for the most recent failure on this thread, or `""`. Valid until
/// the next call into this library on the same thread.
#[no_mangle]
pub extern "C" fn azd_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Library version as a static string.
#[no_mangle]
pub extern "C" fn azd_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Release a string returned by this library.
///
/// # Safety
/// `s` must be null or a pointer previously returned through an out
/// parameter of this library and not yet freed.
#[no_mangle]
pub unsafe extern "C" fn azd_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Parse an integrand in `x` and `n`. `params` is null or a comma-separated
/// list of parameter names (values such as `r=3/2` are accepted and
/// ignored here).
///
/// # Safety
/// `expr` and `params` must be null or NUL-terminated; `out` must be null or
/// writable.
#[no_mangle]
pub unsafe extern "C" fn azd_term_parse(
    expr: *const c_char,
    params: *const c_char,
    out: *mut *mut AzdTerm,
) -> AzdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let expr = text(expr, "expr")?;
        let (spec, _) = spec_for(optional_text(params, "params")?)?;
        let term = HyperTerm::parse(expr, &spec).map_err(parse_fail)?;
        *out = Box::into_raw(Box::new(AzdTerm { term }));
        Ok(())
    })
}

/// # Safety
/// `term` must be null or a handle from [`azd_term_parse`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn azd_term_free(term: *mut AzdTerm) {
    if !term.is_null() {
        drop(Box::from_raw(term));
    }
}

/// Canonical text of a parsed integrand.
///
/// # Safety
/// `term` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn azd_term_to_string(term: *const AzdTerm, out: *mut *mut c_char) -> AzdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let term = term.as_ref().ok_or_else(|| Fail(AzdStatus::NullPointer, "term is null".into()))?;
        *out = new_string(&term.term.to_string());
        Ok(())
    })
}

/// Find a telescoper of order at most `max_order` (0 selects the default).
///
/// # Safety
/// `term` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn azd_derive(term: *const AzdTerm, max_order: u32, out: *mut *mut AzdResult) -> AzdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let term = term.as_ref().ok_or_else(|| Fail(AzdStatus::NullPointer, "term is null".into()))?;
        let mut config = SearchConfig::default();
        if max_order > 0 {
            config.max_order = max_order as usize;
        }
        let result = az_derive(&term.term, &config)?;
        *out = Box::into_raw(Box::new(AzdResult { result }));
        Ok(())
    })
}

/// # Safety
/// `result` must be null or a handle from [`azd_derive`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn azd_result_free(result: *mut AzdResult) {
    if !result.is_null() {
        drop(Box::from_raw(result));
    }
}

/// Order of the derived operator, or `-1` for a null handle.
///
/// # Safety
/// `result` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn azd_result_order(result: *const AzdResult) -> i32 {
    result.as_ref().map_or(-1, |r| r.result.operator.order() as i32)
}

/// Canonical operator text.
///
/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn azd_result_operator(result: *const AzdResult, out: *mut *mut c_char) -> AzdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let r = result.as_ref().ok_or_else(|| Fail(AzdStatus::NullPointer, "result is null".into()))?;
        *out = new_string(&r.result.operator.to_string());
        Ok(())
    })
}

/// Canonical certificate text.
///
/// # Safety
/// `result` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn azd_result_certificate(result: *const AzdResult, out: *mut *mut c_char) -> AzdStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        let r = result.as_ref().ok_or_else(|| Fail(AzdStatus::NullPointer, "result is null".into()))?;
        *out = new_string(&r.result.certificate.to_string());
        Ok(())
    })
}

/// Exact check of an operator and certificate against `term`; the verdict is
/// written to `verified`.
///
/// # Safety
/// `term` must be a live handle, the strings NUL-terminated and `verified`
/// writable.
#[no_mangle]
pub unsafe extern "C" fn azd_verify(
    term: *const AzdTerm,
    operator: *const c_char,
    certificate: *const c_char,
    verified: *mut bool,
) -> AzdStatus {
    guard(|| {
        let verified = out_ptr(verified, "verified")?;
        let term = term.as_ref().ok_or_else(|| Fail(AzdStatus::NullPointer, "term is null".into()))?;
        let spec = term.term.spec();
        let op = RecOperator::parse(text(operator, "operator")?, spec)?;
        let cert = Certificate::parse(text(certificate, "certificate")?, spec)?;
        *verified = verify_certificate(&term.term, &op, &cert)?.verified;
        Ok(())
    })
}

/// Integrate `F_n` over `interval` (`a,b`, `a,inf` or `-inf,inf`).
/// `param_values` is null or `name=value` pairs; `tol <= 0` selects the
/// default tolerance.
///
/// # Safety
/// `term` must be a live handle, the strings null or NUL-terminated and the
/// out pointers writable.
#[no_mangle]
pub unsafe extern "C" fn azd_integrate(
    term: *const AzdTerm,
    n: i64,
    interval: *const c_char,
    param_values: *const c_char,
    tol: f64,
    value: *mut f64,
    error_estimate: *mut f64,
) -> AzdStatus {
    guard(|| {
        let value = out_ptr(value, "value")?;
        let error_estimate = out_ptr(error_estimate, "error_estimate")?;
        let term = term.as_ref().ok_or_else(|| Fail(AzdStatus::NullPointer, "term is null".into()))?;
        let iv: Interval = text(interval, "interval")?.parse()?;
        let values = ParamValues::parse(optional_text(param_values, "param_values")?).map_err(parse_fail)?;
        let mut config = QuadConfig::default();
        if tol > 0.0 {
            config.tol = tol;
        }
        let r = integrate(&term.term, n, &iv, &values, &config)?;
        *value = r.value;
        *error_estimate = r.error_estimate;
        Ok(())
    })
}

/// Unroll `operator` from comma-separated `initials` at indices
/// `start, start+1, ...` and return the sequence table as JSON.
///
/// # Safety
/// Strings must be null (where optional) or NUL-terminated; `out_json` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn azd_unroll_json(
    operator: *const c_char,
    params: *const c_char,
    initials: *const c_char,
    start: i64,
    count: u32,
    out_json: *mut *mut c_char,
) -> AzdStatus {
    guard(|| {
        let out = out_ptr(out_json, "out_json")?;
        *out = ptr::null_mut();
        let (spec, values) = spec_for(optional_text(params, "params")?)?;
        let op = RecOperator::parse(text(operator, "operator")?, &spec)?.specialize(&values)?;
        let init =
            text(initials, "initials")?.split(',').map(str::parse::<ExactNumber>).collect::<Result<Vec<_>, _>>()?;
        let table = unroll(&op, &init, start, count as usize)?;
        *out = new_string(&table.to_json().to_string());
        Ok(())
    })
}

/// The `e⁻¹` approximation analysis for `n = 1..=count` at `digits` decimal
/// digits, as JSON.
///
/// # Safety
/// `out_json` must be writable.
#[no_mangle]
pub unsafe extern "C" fn azd_analyze_e_json(count: u32, digits: u32, out_json: *mut *mut c_char) -> AzdStatus {
    guard(|| {
        let out = out_ptr(out_json, "out_json")?;
        *out = ptr::null_mut();
        let an = analyze_e(count as usize, digits)?;
        *out = new_string(&an.to_json().to_string());
        Ok(())
    })
}
