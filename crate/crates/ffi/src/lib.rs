//! C ABI for `ontokit`.
//!
//! Every function returns an [`OntokitStatus`]; results come back through out
//! pointers. Models and reports are opaque handles released with their
//! `_free` function, and strings returned by the library are released with
//! [`ontokit_string_free`]. After a failure, [`ontokit_last_error`] describes
//! it (per thread). Panics are caught at the boundary and reported as
//! [`OntokitStatus::Panic`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use ontokit::chained::closed_form_in;
use ontokit::models::{ks_born_quadrature, spekkens_toy_bit, BlochVector, Quadrature};
use ontokit::onto::{verify_reproduces, OntologicalModel};
use ontokit::quantum::{pure_overlap, UnitVector};
use ontokit::report::Report;
use ontokit::{Complex64, Error};

#[repr(C)]
#[derive(Copy, Clone, Debug, PartialEq, Eq)]
pub enum OntokitStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Parse = 3,
    Dimension = 4,
    Panic = 5,
}

/// Opaque ontological model.
pub struct OntokitModel(OntologicalModel);

/// Opaque verification report.
pub struct OntokitReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(OntokitStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match e {
            Error::Dimension(_) => OntokitStatus::Dimension,
            Error::Json(_) => OntokitStatus::Parse,
            _ => OntokitStatus::InvalidArgument,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(OntokitStatus::NullPointer, format!("`{what}` is null"))
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).ok();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> OntokitStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => OntokitStatus::Ok,
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            set_error(format!("panic: {msg}"));
            OntokitStatus::Panic
        }
    }
}

/// Writes `value` through `out`.
///
/// # Safety
/// `out` must be null or valid for a write of `T`.
unsafe fn write_out<T>(out: *mut T, what: &str, value: T) -> Result<(), Failure> {
    if out.is_null() {
        return Err(null(what));
    }
    out.write(value);
    Ok(())
}

unsafe fn deref<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

fn to_c_string(s: String) -> Result<*mut c_char, Failure> {
    CString::new(s).map(CString::into_raw).map_err(|e| Failure(OntokitStatus::InvalidArgument, e.to_string()))
}

/// Message for the last failure on this thread, or null. The pointer stays
/// valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn ontokit_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version, a static string.
#[no_mangle]
pub extern "C" fn ontokit_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Spekkens' toy bit with its fragment.
///
/// # Safety
/// `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ontokit_model_spekkens(out: *mut *mut OntokitModel) -> OntokitStatus {
    guard(|| write_out(out, "out", Box::into_raw(Box::new(OntokitModel(spekkens_toy_bit())))))
}

/// Parses a model from its JSON form.
///
/// # Safety
/// `json` must be a NUL-terminated string; `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ontokit_model_from_json(json: *const c_char, out: *mut *mut OntokitModel) -> OntokitStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| Failure(OntokitStatus::Parse, e.to_string()))?;
        let model: OntologicalModel = serde_json::from_str(text).map_err(|e| Failure(OntokitStatus::Parse, e.to_string()))?;
        write_out(out, "out", Box::into_raw(Box::new(OntokitModel(model))))
    })
}

/// JSON form of a model; release with [`ontokit_string_free`].
///
/// # Safety
/// `model` must come from this library; `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ontokit_model_to_json(model: *const OntokitModel, out: *mut *mut c_char) -> OntokitStatus {
    guard(|| {
        let m = deref(model, "model")?;
        let text = serde_json::to_string(&m.0).map_err(|e| Failure(OntokitStatus::InvalidArgument, e.to_string()))?;
        write_out(out, "out", to_c_string(text)?)
    })
}

/// # Safety
/// `model` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ontokit_model_free(model: *mut OntokitModel) {
    if !model.is_null() {
        drop(Box::from_raw(model));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ontokit_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Checks that `model` reproduces the Born probabilities of its fragment.
///
/// # Safety
/// `model` must come from this library; `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ontokit_verify_reproduces(model: *const OntokitModel, tol: f64, out: *mut *mut OntokitReport) -> OntokitStatus {
    guard(|| {
        let m = deref(model, "model")?;
        if !(tol.is_finite() && tol > 0.0) {
            return Err(Failure(OntokitStatus::InvalidArgument, format!("tolerance must be positive, got {tol}")));
        }
        let r = verify_reproduces(&m.0, tol)?;
        write_out(out, "out", Box::into_raw(Box::new(OntokitReport(r))))
    })
}

/// # Safety
/// `report` must come from this library; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ontokit_report_verified(report: *const OntokitReport, out: *mut bool) -> OntokitStatus {
    guard(|| write_out(out, "out", deref(report, "report")?.0.verified))
}

/// # Safety
/// `report` must come from this library; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ontokit_report_max_residual(report: *const OntokitReport, out: *mut f64) -> OntokitStatus {
    guard(|| write_out(out, "out", deref(report, "report")?.0.max_residual))
}

/// JSON form of a report; release with [`ontokit_string_free`].
///
/// # Safety
/// `report` must come from this library; `out` must be valid for writing a pointer.
#[no_mangle]
pub unsafe extern "C" fn ontokit_report_to_json(report: *const OntokitReport, out: *mut *mut c_char) -> OntokitStatus {
    guard(|| {
        let r = deref(report, "report")?;
        let text = serde_json::to_string(&r.0).map_err(|e| Failure(OntokitStatus::InvalidArgument, e.to_string()))?;
        write_out(out, "out", to_c_string(text)?)
    })
}

/// # Safety
/// `report` must be null or a handle from this library not yet freed.
#[no_mangle]
pub unsafe extern "C" fn ontokit_report_free(report: *mut OntokitReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

unsafe fn read_state(amps: *const f64, dim: usize, what: &str) -> Result<UnitVector, Failure> {
    if amps.is_null() {
        return Err(null(what));
    }
    let raw = std::slice::from_raw_parts(amps, 2 * dim);
    let v: Vec<Complex64> = raw.chunks_exact(2).map(|c| Complex64::new(c[0], c[1])).collect();
    Ok(UnitVector::new(v)?)
}

/// `|<psi|phi>|^2` for unit vectors given as `dim` interleaved
/// (real, imaginary) pairs.
///
/// # Safety
/// `psi` and `phi` must each point to `2 * dim` doubles; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ontokit_pure_overlap(psi: *const f64, phi: *const f64, dim: usize, out: *mut f64) -> OntokitStatus {
    guard(|| {
        if dim == 0 {
            return Err(Failure(OntokitStatus::Dimension, "dimension 0".into()));
        }
        let (a, b) = (read_state(psi, dim, "psi")?, read_state(phi, dim, "phi")?);
        write_out(out, "out", pure_overlap(&a, &b)?)
    })
}

/// Closed form `I_N = 2N sin^2(pi / 4N)` of the chained Bell correlation and
/// its bound `pi^2 / 8N`.
///
/// # Safety
/// `value` and `bound` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ontokit_chained_closed_form(n: usize, value: *mut f64, bound: *mut f64) -> OntokitStatus {
    guard(|| {
        if value.is_null() || bound.is_null() {
            return Err(null("value/bound"));
        }
        let (v, b) = closed_form_in(n)?;
        write_out(value, "value", v)?;
        write_out(bound, "bound", b)
    })
}

/// KS qubit model prediction for preparing Bloch vector `psi` and testing
/// `phi` (each three doubles), by Gauss-Legendre quadrature.
///
/// # Safety
/// `psi` and `phi` must each point to 3 doubles; `out` must be valid for a write.
#[no_mangle]
pub unsafe extern "C" fn ontokit_ks_born_quadrature(psi: *const f64, phi: *const f64, out: *mut f64) -> OntokitStatus {
    guard(|| {
        let bloch = |p: *const f64, what: &str| -> Result<BlochVector, Failure> {
            if p.is_null() {
                return Err(null(what));
            }
            let v = std::slice::from_raw_parts(p, 3);
            Ok(BlochVector::new(v[0], v[1], v[2])?)
        };
        let r = ks_born_quadrature(&bloch(psi, "psi")?, &bloch(phi, "phi")?, Quadrature::default())?;
        write_out(out, "out", r.value)
    })
}
