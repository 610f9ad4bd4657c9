//! C ABI for the design toolkit.
//!
//! Every entry point returns a [`BecStatus`]; results come back through out
//! parameters. On failure the message is available from
//! [`bec_last_error_message`] on the same thread. Handles are opaque and
//! owned by the caller, who releases them with the matching `*_free`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use bec_design::bounds::{rate_upper_bound, threshold_upper_bound};
use bec_design::convergence::{check_convergent, threshold, DEFAULT_TOL};
use bec_design::design;
use bec_design::io::EnsembleFile;
use bec_design::{DegreeDistribution, DesignResult, Ensemble, Error, TaylorCoefficients};

/// Result code of every call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BecStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Infeasible = 3,
    Parse = 4,
    Io = 5,
    Internal = 6,
    Panic = 7,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BecDesignKind {
    TypeA = 0,
    TypeB = 1,
    TypeMb = 2,
}

/// Scalar summary of a design.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default)]
pub struct BecDesignInfo {
    pub n: usize,
    pub dv: usize,
    pub p: usize,
    pub design_eps: f64,
    pub design_rate: f64,
}

/// Opaque ensemble handle.
pub struct BecEnsemble {
    inner: Ensemble,
}

/// Opaque design handle.
pub struct BecDesign {
    inner: DesignResult,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(BecStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InfeasibleChannel { .. }
            | Error::InfeasibleRate { .. }
            | Error::Infeasible(_)
            | Error::DegreeLimit { .. } => BecStatus::Infeasible,
            Error::InvalidDistribution(_)
            | Error::CoefficientRange { .. }
            | Error::DegenerateCheckDistribution(_)
            | Error::Parameter { .. } => BecStatus::InvalidArgument,
            Error::Parse(_) => BecStatus::Parse,
            Error::Io(_) => BecStatus::Io,
            Error::SeriesDegradation { .. } | Error::Solver(_) => BecStatus::Internal,
        };
        Failure(status, e.to_string())
    }
}

fn null(what: &str) -> Failure {
    Failure(BecStatus::NullPointer, format!("{what} is null"))
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn guard(f: impl FnOnce() -> Result<(), Failure>) -> BecStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            LAST_ERROR.with(|e| *e.borrow_mut() = None);
            BecStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(msg);
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            BecStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| Failure(BecStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> Result<&'a T, Failure> {
    p.as_ref().ok_or_else(|| null(what))
}

unsafe fn out_arg<'a, T>(p: *mut T, what: &str) -> Result<&'a mut T, Failure> {
    p.as_mut().ok_or_else(|| null(what))
}

unsafe fn pairs(
    degrees: *const u32,
    coeffs: *const f64,
    len: usize,
    what: &str,
) -> Result<Vec<(u32, f64)>, Failure> {
    if len == 0 {
        return Err(Failure(BecStatus::InvalidArgument, format!("{what} is empty")));
    }
    if degrees.is_null() || coeffs.is_null() {
        return Err(null(what));
    }
    let d = std::slice::from_raw_parts(degrees, len);
    let c = std::slice::from_raw_parts(coeffs, len);
    Ok(d.iter().copied().zip(c.iter().copied()).collect())
}

/// Message of the last failed call on this thread, or NULL after a success.
/// Valid until the next call on the same thread.
#[no_mangle]
pub extern "C" fn bec_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// # Safety
/// `s` must come from this library and not be freed yet, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn bec_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds an ensemble from edge-perspective `(degree, coefficient)` arrays.
///
/// # Safety
/// Each array must hold its stated number of elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_new(
    lambda_degrees: *const u32,
    lambda_coeffs: *const f64,
    lambda_len: usize,
    rho_degrees: *const u32,
    rho_coeffs: *const f64,
    rho_len: usize,
    out: *mut *mut BecEnsemble,
) -> BecStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let lambda = DegreeDistribution::variable(pairs(
            lambda_degrees,
            lambda_coeffs,
            lambda_len,
            "lambda",
        )?)?;
        let rho = DegreeDistribution::check(pairs(rho_degrees, rho_coeffs, rho_len, "rho")?)?;
        *out = Box::into_raw(Box::new(BecEnsemble {
            inner: Ensemble::new(lambda, rho),
        }));
        Ok(())
    })
}

/// # Safety
/// `json` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_from_json(
    json: *const c_char,
    out: *mut *mut BecEnsemble,
) -> BecStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let file = EnsembleFile::from_json(str_arg(json, "json")?)?;
        *out = Box::into_raw(Box::new(BecEnsemble {
            inner: file.ensemble,
        }));
        Ok(())
    })
}

/// # Safety
/// `path` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_load(
    path: *const c_char,
    out: *mut *mut BecEnsemble,
) -> BecStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let file = EnsembleFile::load(str_arg(path, "path")?)?;
        *out = Box::into_raw(Box::new(BecEnsemble {
            inner: file.ensemble,
        }));
        Ok(())
    })
}

/// Serializes to JSON. Free the string with [`bec_string_free`].
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_to_json(
    e: *const BecEnsemble,
    out: *mut *mut c_char,
) -> BecStatus {
    guard(|| {
        let e = ref_arg(e, "ensemble")?;
        let out = out_arg(out, "out")?;
        let text = EnsembleFile::new(e.inner.clone()).to_json();
        *out = CString::new(text)
            .map_err(|_| Failure(BecStatus::Internal, "JSON contains NUL".into()))?
            .into_raw();
        Ok(())
    })
}

/// # Safety
/// `e` must be a live handle; `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_save(e: *const BecEnsemble, path: *const c_char) -> BecStatus {
    guard(|| {
        let e = ref_arg(e, "ensemble")?;
        EnsembleFile::new(e.inner.clone()).save(str_arg(path, "path")?)?;
        Ok(())
    })
}

/// # Safety
/// `e` must come from this library and not be freed yet, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_free(e: *mut BecEnsemble) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_rate(e: *const BecEnsemble, out: *mut f64) -> BecStatus {
    guard(|| {
        *out_arg(out, "out")? = ref_arg(e, "ensemble")?.inner.design_rate();
        Ok(())
    })
}

/// Copies the variable-side distribution. With `capacity` smaller than the
/// number of degrees only `len` is written.
///
/// # Safety
/// `degrees` and `coeffs` must hold `capacity` elements (may be NULL when it is 0).
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_lambda(
    e: *const BecEnsemble,
    degrees: *mut u32,
    coeffs: *mut f64,
    capacity: usize,
    len: *mut usize,
) -> BecStatus {
    guard(|| {
        let e = ref_arg(e, "ensemble")?;
        let len = out_arg(len, "len")?;
        let lambda = &e.inner.lambda;
        *len = lambda.coeffs().len();
        if capacity < *len {
            return Ok(());
        }
        if degrees.is_null() || coeffs.is_null() {
            return Err(null("output arrays"));
        }
        for (k, (d, c)) in lambda.iter().enumerate() {
            *degrees.add(k) = d;
            *coeffs.add(k) = c;
        }
        Ok(())
    })
}

/// Convergence test at `eps`. `margin` may be NULL.
///
/// # Safety
/// `e` must be a live handle; `convergent` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_check(
    e: *const BecEnsemble,
    eps: f64,
    convergent: *mut bool,
    margin: *mut f64,
) -> BecStatus {
    guard(|| {
        let e = ref_arg(e, "ensemble")?;
        let convergent = out_arg(convergent, "convergent")?;
        if !(0.0..=1.0).contains(&eps) {
            return Err(Failure(
                BecStatus::InvalidArgument,
                format!("eps must lie in [0, 1], got {eps}"),
            ));
        }
        let v = check_convergent(&e.inner, eps);
        *convergent = v.convergent;
        if let Some(m) = margin.as_mut() {
            *m = v.margin;
        }
        Ok(())
    })
}

/// Threshold by bisection; `tol <= 0` selects the default.
///
/// # Safety
/// `e` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_ensemble_threshold(
    e: *const BecEnsemble,
    tol: f64,
    out: *mut f64,
) -> BecStatus {
    guard(|| {
        let e = ref_arg(e, "ensemble")?;
        let tol = if tol > 0.0 { tol } else { DEFAULT_TOL };
        *out_arg(out, "out")? = threshold(&e.inner, tol);
        Ok(())
    })
}

#[allow(clippy::too_many_arguments)]
unsafe fn make_design(
    rho_degrees: *const u32,
    rho_coeffs: *const f64,
    rho_len: usize,
    value: f64,
    kind: BecDesignKind,
    p: usize,
    fixed_eps: bool,
    out: *mut *mut BecDesign,
) -> BecStatus {
    guard(|| {
        let out = out_arg(out, "out")?;
        let rho = DegreeDistribution::check(pairs(rho_degrees, rho_coeffs, rho_len, "rho")?)?;
        let d = match (fixed_eps, kind) {
            (true, BecDesignKind::TypeA) => design::type_a_eps(&rho, value)?,
            (true, BecDesignKind::TypeB) => design::type_b_eps(&rho, value, p)?,
            (true, BecDesignKind::TypeMb) => design::type_mb_eps(&rho, value, p)?,
            (false, BecDesignKind::TypeA) => design::type_a_rate(&rho, value)?,
            (false, BecDesignKind::TypeB) => design::type_b_rate(&rho, value, p)?,
            (false, BecDesignKind::TypeMb) => design::type_mb_rate(&rho, value, p)?,
        };
        *out = Box::into_raw(Box::new(BecDesign { inner: d }));
        Ok(())
    })
}

/// Highest-rate design at channel parameter `eps`. `p` is ignored for Type-A.
///
/// # Safety
/// The `rho` arrays must hold `rho_len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_design_eps(
    rho_degrees: *const u32,
    rho_coeffs: *const f64,
    rho_len: usize,
    eps: f64,
    kind: BecDesignKind,
    p: usize,
    out: *mut *mut BecDesign,
) -> BecStatus {
    make_design(rho_degrees, rho_coeffs, rho_len, eps, kind, p, true, out)
}

/// Highest-threshold design at rate `rate`. `p` is ignored for Type-A.
///
/// # Safety
/// The `rho` arrays must hold `rho_len` elements; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_design_rate(
    rho_degrees: *const u32,
    rho_coeffs: *const f64,
    rho_len: usize,
    rate: f64,
    kind: BecDesignKind,
    p: usize,
    out: *mut *mut BecDesign,
) -> BecStatus {
    make_design(rho_degrees, rho_coeffs, rho_len, rate, kind, p, false, out)
}

/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_design_info(d: *const BecDesign, out: *mut BecDesignInfo) -> BecStatus {
    guard(|| {
        let d = &ref_arg(d, "design")?.inner;
        *out_arg(out, "out")? = BecDesignInfo {
            n: d.n,
            dv: d.dv,
            p: d.p,
            design_eps: d.design_eps,
            design_rate: d.design_rate,
        };
        Ok(())
    })
}

/// New ensemble handle holding a copy of the design's ensemble.
///
/// # Safety
/// `d` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_design_ensemble(
    d: *const BecDesign,
    out: *mut *mut BecEnsemble,
) -> BecStatus {
    guard(|| {
        let d = ref_arg(d, "design")?;
        *out_arg(out, "out")? = Box::into_raw(Box::new(BecEnsemble {
            inner: d.inner.ensemble.clone(),
        }));
        Ok(())
    })
}

/// # Safety
/// `d` must come from this library and not be freed yet, or be NULL.
#[no_mangle]
pub unsafe extern "C" fn bec_design_free(d: *mut BecDesign) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// Writes `T_2, ..., T_{len+1}` of the check distribution into `out`.
///
/// # Safety
/// The `rho` arrays must hold `rho_len` elements; `out` must hold `len`.
#[no_mangle]
pub unsafe extern "C" fn bec_taylor(
    rho_degrees: *const u32,
    rho_coeffs: *const f64,
    rho_len: usize,
    out: *mut f64,
    len: usize,
) -> BecStatus {
    guard(|| {
        let rho = DegreeDistribution::check(pairs(rho_degrees, rho_coeffs, rho_len, "rho")?)?;
        if len == 0 {
            return Ok(());
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let t = TaylorCoefficients::for_rho(&rho, len + 1)?;
        let out = std::slice::from_raw_parts_mut(out, len);
        for (k, slot) in out.iter_mut().enumerate() {
            *slot = t.get(k + 2);
        }
        Ok(())
    })
}

/// Upper bounds for check-average degree `dc_bar`: threshold at `rate` and
/// rate at `eps`. Either output may be NULL.
///
/// # Safety
/// Non-NULL outputs must be writable.
#[no_mangle]
pub unsafe extern "C" fn bec_bounds(
    rate: f64,
    eps: f64,
    dc_bar: f64,
    threshold_bound: *mut f64,
    rate_bound: *mut f64,
) -> BecStatus {
    guard(|| {
        if !(dc_bar >= 2.0) {
            return Err(Failure(
                BecStatus::InvalidArgument,
                format!("dc_bar must be at least 2, got {dc_bar}"),
            ));
        }
        if let Some(t) = threshold_bound.as_mut() {
            *t = threshold_upper_bound(rate, dc_bar);
        }
        if let Some(r) = rate_bound.as_mut() {
            *r = rate_upper_bound(eps, dc_bar);
        }
        Ok(())
    })
}
