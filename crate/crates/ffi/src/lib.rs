//! C ABI over `dpcolor`.
//!
//! Graphs live behind an opaque [`DpcGraph`] handle. Every fallible function
//! returns a [`DpcStatus`]; results are canonical JSON strings owned by the
//! caller and released with [`dpc_string_free`]. On failure a description is
//! available from [`dpc_last_error_message`] on the same thread.
//!
//! Privacy parameters are passed as `exp_eps = e^ε` and `delta`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use dpcolor::closed_form::{balanced_mechanism, optimal_boundary_homogeneous, optimal_line_blue, optimal_line_full};
use dpcolor::io::{self, to_canonical_json};
use dpcolor::{optimize_with_boundary, verify_dp, ColoredGraph, Error, LineSpec, PrivacyParams};

/// Result codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DpcStatus {
    Ok = 0,
    /// The computation succeeded and found no private mechanism, or the
    /// checked mechanism is not private. The output still holds a report.
    Infeasible = 1,
    NullArgument = 2,
    InvalidUtf8 = 3,
    ParseError = 4,
    InvalidGraph = 5,
    InvalidParams = 6,
    NoBoundary = 7,
    BadBoundaryCondition = 8,
    PreconditionViolated = 9,
    InternalError = 10,
}

/// Opaque colored graph.
pub struct DpcGraph {
    inner: ColoredGraph,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let msg = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(CString::new(msg).expect("nul bytes removed")));
}

fn status_of(e: &Error) -> DpcStatus {
    match e {
        Error::Parse(_) => DpcStatus::ParseError,
        Error::InvalidGraph(_) | Error::UnknownVertex(_) | Error::IncompleteMechanism(_) => DpcStatus::InvalidGraph,
        Error::InvalidParams(_) | Error::InvalidProbability { .. } => DpcStatus::InvalidParams,
        Error::NoBoundary { .. } => DpcStatus::NoBoundary,
        Error::BadBoundaryCondition(_) => DpcStatus::BadBoundaryCondition,
        _ => DpcStatus::PreconditionViolated,
    }
}

type Outcome = Result<(String, DpcStatus), DpcStatus>;

fn fail(e: Error) -> DpcStatus {
    set_error(e.to_string());
    status_of(&e)
}

/// Runs `body`, stores its JSON in `*out` and maps errors and panics.
fn guarded(out: *mut *mut c_char, body: impl FnOnce() -> Outcome) -> DpcStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return DpcStatus::NullArgument;
    }
    // SAFETY: checked non-null; the caller provides a writable slot.
    unsafe { *out = ptr::null_mut() };
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok((json, status))) => {
            let c = CString::new(json).expect("JSON never contains nul");
            // SAFETY: as above.
            unsafe { *out = c.into_raw() };
            status
        }
        Ok(Err(status)) => status,
        Err(_) => {
            set_error("internal panic");
            DpcStatus::InternalError
        }
    }
}

/// # Safety
/// `s` must be null or a valid nul-terminated string.
unsafe fn read_str<'a>(s: *const c_char) -> Result<&'a str, DpcStatus> {
    if s.is_null() {
        set_error("string argument is null");
        return Err(DpcStatus::NullArgument);
    }
    CStr::from_ptr(s).to_str().map_err(|_| {
        set_error("string argument is not UTF-8");
        DpcStatus::InvalidUtf8
    })
}

/// # Safety
/// `g` must be null or a live handle from [`dpc_graph_from_json`].
unsafe fn read_graph<'a>(g: *const DpcGraph) -> Result<&'a ColoredGraph, DpcStatus> {
    g.as_ref().map(|h| &h.inner).ok_or_else(|| {
        set_error("graph handle is null");
        DpcStatus::NullArgument
    })
}

fn params(exp_eps: f64, delta: f64) -> Result<PrivacyParams, DpcStatus> {
    PrivacyParams::from_exp(exp_eps, delta).map_err(fail)
}

fn json<T: serde::Serialize>(v: &T) -> Result<String, DpcStatus> {
    to_canonical_json(v).map_err(fail)
}

/// Message for the last failure on this thread, or null. Valid until the next
/// call into this library on the same thread.
#[no_mangle]
pub extern "C" fn dpc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Parses a graph document and stores a new handle in `*out`.
///
/// # Safety
/// `json` must be a nul-terminated string and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dpc_graph_from_json(json: *const c_char, out: *mut *mut DpcGraph) -> DpcStatus {
    if out.is_null() {
        set_error("output pointer is null");
        return DpcStatus::NullArgument;
    }
    *out = ptr::null_mut();
    let text = match read_str(json) {
        Ok(t) => t,
        Err(s) => return s,
    };
    match io::parse_graph(text) {
        Ok(g) => {
            *out = Box::into_raw(Box::new(DpcGraph { inner: g }));
            DpcStatus::Ok
        }
        Err(e) => fail(e),
    }
}

/// # Safety
/// `g` must be null or a handle from [`dpc_graph_from_json`] not yet freed.
#[no_mangle]
pub unsafe extern "C" fn dpc_graph_free(g: *mut DpcGraph) {
    if !g.is_null() {
        drop(Box::from_raw(g));
    }
}

/// Number of vertices, or 0 for a null handle.
///
/// # Safety
/// `g` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn dpc_graph_vertex_count(g: *const DpcGraph) -> usize {
    g.as_ref().map_or(0, |h| h.inner.len())
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn dpc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Optimal mechanism on the `(nb, nr)`-line whose blue boundary node answers
/// red with probability `rb`.
///
/// # Safety
/// `out` must be a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dpc_line(nb: usize, nr: usize, rb: f64, exp_eps: f64, delta: f64, out: *mut *mut c_char) -> DpcStatus {
    guarded(out, || {
        let p = params(exp_eps, delta)?;
        let spec = LineSpec::new(nb, nr).map_err(fail)?;
        let blue = optimal_line_blue(spec, rb, &p).map_err(fail)?;
        let mech = optimal_line_full(spec, rb, &p).map_err(fail)?;
        let doc = serde_json::json!({ "tau": blue.tau, "blue_side": blue, "mechanism": mech });
        Ok((json(&doc)?, DpcStatus::Ok))
    })
}

/// # Safety
/// `g` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dpc_homogeneous(
    g: *const DpcGraph,
    m_b: f64,
    exp_eps: f64,
    delta: f64,
    out: *mut *mut c_char,
) -> DpcStatus {
    guarded(out, || {
        let g = read_graph(g)?;
        let m = optimal_boundary_homogeneous(g, m_b, &params(exp_eps, delta)?).map_err(fail)?;
        Ok((json(&m)?, DpcStatus::Ok))
    })
}

/// # Safety
/// `g` must be a live handle and `out` a writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dpc_balanced(g: *const DpcGraph, exp_eps: f64, delta: f64, out: *mut *mut c_char) -> DpcStatus {
    guarded(out, || {
        let g = read_graph(g)?;
        let m = balanced_mechanism(g, &params(exp_eps, delta)?).map_err(fail)?;
        Ok((json(&m)?, DpcStatus::Ok))
    })
}

/// Optimal mechanism for the boundary condition document `bc_json`. Returns
/// `Infeasible` with the report (including a witness) when none exists.
///
/// # Safety
/// `g` must be a live handle, `bc_json` a nul-terminated string and `out` a
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dpc_solve(
    g: *const DpcGraph,
    bc_json: *const c_char,
    exp_eps: f64,
    delta: f64,
    out: *mut *mut c_char,
) -> DpcStatus {
    guarded(out, || {
        let g = read_graph(g)?;
        let bc = io::parse_boundary_condition(read_str(bc_json)?).map_err(fail)?;
        let r = optimize_with_boundary(g, &bc, &params(exp_eps, delta)?).map_err(fail)?;
        let status = if r.is_optimal() { DpcStatus::Ok } else { DpcStatus::Infeasible };
        Ok((json(&r)?, status))
    })
}

/// Privacy report for the mechanism document `mech_json`; `Infeasible` when
/// some inequality fails by more than `tolerance`.
///
/// # Safety
/// `g` must be a live handle, `mech_json` a nul-terminated string and `out` a
/// writable pointer.
#[no_mangle]
pub unsafe extern "C" fn dpc_verify(
    g: *const DpcGraph,
    mech_json: *const c_char,
    exp_eps: f64,
    delta: f64,
    tolerance: f64,
    out: *mut *mut c_char,
) -> DpcStatus {
    guarded(out, || {
        let g = read_graph(g)?;
        let m = io::parse_mechanism(read_str(mech_json)?).map_err(fail)?;
        let report = verify_dp(g, &m, &params(exp_eps, delta)?, tolerance).map_err(fail)?;
        let status = if report.satisfied { DpcStatus::Ok } else { DpcStatus::Infeasible };
        Ok((json(&report)?, status))
    })
}
