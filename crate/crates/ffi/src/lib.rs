//! C interface to `gauss_hardy`.
//!
//! Functions and decompositions live behind opaque handles created by
//! `gh_function_from_json` / `gh_decompose` and released with the matching
//! `_free`. Every fallible call returns a [`GhStatus`]; on failure the message
//! is available from [`gh_last_error`] until the next failing call on the
//! same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use gauss_hardy::atoms::{atomic_norm, AtomicDecomposition};
use gauss_hardy::decompose::{decompose, DecomposeOptions};
use gauss_hardy::error::Error;
use gauss_hardy::func_repr::{Func, FunctionSpec};
use gauss_hardy::functionals::{e_plus, global_condition_report};
use gauss_hardy::maximal::local_maximal_norm;

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GhStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidInput = 2,
    NotInHardySpace = 3,
    Failed = 4,
    Panic = 5,
}

/// A represented function.
pub struct GhFunction {
    inner: Func,
}

/// An atomic decomposition together with the function it was built from.
pub struct GhDecomposition {
    inner: AtomicDecomposition,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> GhStatus {
    match e {
        Error::InvalidInput(_) | Error::DimensionMismatch { .. } => GhStatus::InvalidInput,
        Error::NotInHardySpace(_) => GhStatus::NotInHardySpace,
        Error::Construction(_) => GhStatus::Failed,
    }
}

fn guard(body: impl FnOnce() -> Result<(), (GhStatus, String)>) -> GhStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => GhStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(msg);
            s
        }
        Err(_) => {
            set_error("internal panic".into());
            GhStatus::Panic
        }
    }
}

fn lift<T>(r: gauss_hardy::error::Result<T>) -> Result<T, (GhStatus, String)> {
    r.map_err(|e| (status_of(&e), e.to_string()))
}

fn null(what: &str) -> (GhStatus, String) {
    (GhStatus::NullPointer, format!("{what} is null"))
}

unsafe fn func_ref<'a>(f: *const GhFunction) -> Result<&'a Func, (GhStatus, String)> {
    f.as_ref().map(|h| &h.inner).ok_or_else(|| null("function handle"))
}

unsafe fn write<T>(out: *mut T, v: T) -> Result<(), (GhStatus, String)> {
    if out.is_null() {
        return Err(null("output pointer"));
    }
    *out = v;
    Ok(())
}

/// Message of the last failure on this thread, or NULL. Owned by the library.
#[no_mangle]
pub extern "C" fn gh_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Parses a JSON function spec (`{"dim":…, "kind":…, "data":…}`).
///
/// # Safety
/// `json` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn gh_function_from_json(json: *const c_char, out: *mut *mut GhFunction) -> GhStatus {
    guard(|| {
        if json.is_null() {
            return Err(null("json"));
        }
        let text = CStr::from_ptr(json).to_str().map_err(|e| (GhStatus::InvalidInput, e.to_string()))?;
        let f = lift(FunctionSpec::from_json(text).and_then(|s| s.resolve()))?;
        write(out, Box::into_raw(Box::new(GhFunction { inner: f })))
    })
}

/// # Safety
/// `f` must come from `gh_function_from_json` or be NULL.
#[no_mangle]
pub unsafe extern "C" fn gh_function_free(f: *mut GhFunction) {
    if !f.is_null() {
        drop(Box::from_raw(f));
    }
}

/// Dimension of the function, 0 for NULL.
///
/// # Safety
/// `f` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn gh_function_dim(f: *const GhFunction) -> usize {
    f.as_ref().map_or(0, |h| h.inner.dim())
}

/// # Safety
/// `x` must point to `len` doubles, `len` equal to the dimension.
#[no_mangle]
pub unsafe extern "C" fn gh_function_eval(f: *const GhFunction, x: *const f64, len: usize, out: *mut f64) -> GhStatus {
    guard(|| {
        let f = func_ref(f)?;
        if x.is_null() {
            return Err(null("x"));
        }
        if len != f.dim() {
            return Err((GhStatus::InvalidInput, format!("point has {len} coordinates, function dimension is {}", f.dim())));
        }
        write(out, f.eval(std::slice::from_raw_parts(x, len)))
    })
}

/// ‖f‖ in L^p(γ), p ≥ 1 or +∞.
///
/// # Safety
/// `f` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gh_lp_norm(f: *const GhFunction, p: f64, out: *mut f64) -> GhStatus {
    guard(|| {
        let f = func_ref(f)?;
        if !(p >= 1.0) {
            return Err((GhStatus::InvalidInput, format!("exponent must be at least 1, got {p}")));
        }
        write(out, f.lp_norm_gauss(p))
    })
}

/// ‖M̂_loc f‖ in L^p(γ) on the adaptive grid with `per_unit` cells per
/// admissible radius and the standard dictionary.
///
/// # Safety
/// `f` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gh_maximal_norm(f: *const GhFunction, per_unit: usize, p: f64, out: *mut f64) -> GhStatus {
    guard(|| {
        let f = func_ref(f)?;
        write(out, lift(local_maximal_norm(f, per_unit, p))?)
    })
}

/// The one-dimensional functional E(f). `divergent` receives 1 when the
/// truncations grow.
///
/// # Safety
/// `f` must be a live handle; `out` and `divergent` valid.
#[no_mangle]
pub unsafe extern "C" fn gh_e_functional(f: *const GhFunction, out: *mut f64, divergent: *mut i32) -> GhStatus {
    guard(|| {
        let f = func_ref(f)?;
        let r = lift(global_condition_report(f))?;
        let Some(e) = r.e_value else {
            return Err((GhStatus::InvalidInput, "E is defined for one-dimensional functions".into()));
        };
        write(out, e)?;
        write(divergent, r.e_divergent() as i32)
    })
}

/// E₊(f) = ∫|x|²|f| dγ.
///
/// # Safety
/// `f` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gh_e_plus(f: *const GhFunction, out: *mut f64) -> GhStatus {
    guard(|| {
        let f = func_ref(f)?;
        write(out, e_plus(f))
    })
}

/// Atomic decomposition. Returns `NOT_IN_HARDY_SPACE` when a truncated
/// necessary condition diverges.
///
/// # Safety
/// `f` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gh_decompose(f: *const GhFunction, out: *mut *mut GhDecomposition) -> GhStatus {
    guard(|| {
        let f = func_ref(f)?;
        let (d, _) = lift(decompose(f, &DecomposeOptions::default()))?;
        write(out, Box::into_raw(Box::new(GhDecomposition { inner: d })))
    })
}

/// # Safety
/// `d` must come from `gh_decompose` or be NULL.
#[no_mangle]
pub unsafe extern "C" fn gh_decomposition_free(d: *mut GhDecomposition) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Number of atoms, 0 for NULL.
///
/// # Safety
/// `d` must be a live handle or NULL.
#[no_mangle]
pub unsafe extern "C" fn gh_decomposition_len(d: *const GhDecomposition) -> usize {
    d.as_ref().map_or(0, |h| h.inner.terms.len())
}

/// Coefficient of atom `index`.
///
/// # Safety
/// `d` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gh_decomposition_coefficient(d: *const GhDecomposition, index: usize, out: *mut f64) -> GhStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("decomposition handle"))?;
        let t = d.inner.terms.get(index).ok_or_else(|| (GhStatus::InvalidInput, format!("atom index {index} out of range")))?;
        write(out, t.coeff)
    })
}

/// Σ|λ_j| over the decomposition.
///
/// # Safety
/// `d` must be a live handle and `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gh_decomposition_norm(d: *const GhDecomposition, out: *mut f64) -> GhStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("decomposition handle"))?;
        write(out, lift(atomic_norm(&d.inner))?)
    })
}

/// Value of Σ λ_j a_j at `x`.
///
/// # Safety
/// `x` must point to `len` doubles; `out` valid.
#[no_mangle]
pub unsafe extern "C" fn gh_decomposition_eval(
    d: *const GhDecomposition,
    x: *const f64,
    len: usize,
    out: *mut f64,
) -> GhStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("decomposition handle"))?;
        if x.is_null() {
            return Err(null("x"));
        }
        let dim = d.inner.terms.first().map_or(len, |t| t.atom.dim());
        if len != dim {
            return Err((GhStatus::InvalidInput, format!("point has {len} coordinates, decomposition dimension is {dim}")));
        }
        write(out, d.inner.reconstruct_at(std::slice::from_raw_parts(x, len)))
    })
}
