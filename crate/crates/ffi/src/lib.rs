//! C interface to `supnorm`.
//!
//! Domains and bound reports are opaque heap handles released with their
//! `_free` function. Every fallible call returns a [`SupnormStatus`]; on failure
//! the message is available from [`supnorm_last_error`] on the same thread.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use supnorm::bounds::{run_algorithm, BoundReport, BoundSource, EffectiveConstants};
use supnorm::domain::{load_domain, load_domain_str, psl2z, FundamentalDomain, RegionTag};
use supnorm::Error;

/// Result of a call.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupnormStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Load = 3,
    Numerical = 4,
    NotFound = 5,
    Panic = 6,
}

/// Which estimate produced a bound row.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SupnormSource {
    CompactPoincare = 0,
    CuspMaximumPrinciple = 1,
    CuspParabolic = 2,
    CocompactExponential = 3,
}

/// One row of a bound report. `cusp` is −1 for the compact part and the
/// zero-based cusp index otherwise; `lower` is NaN when no lower bound applies.
#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SupnormBoundRow {
    pub k: u32,
    pub cusp: i32,
    pub upper: f64,
    pub lower: f64,
    pub source: SupnormSource,
}

/// Opaque fundamental domain.
pub struct SupnormDomain {
    inner: FundamentalDomain,
}

/// Opaque result of running the bound engine.
pub struct SupnormReport {
    constants: EffectiveConstants,
    report: BoundReport,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn status_of(e: &Error) -> SupnormStatus {
    match e.root() {
        Error::Load(_) | Error::Io(_) | Error::Json(_) => SupnormStatus::Load,
        Error::Domain(_) | Error::Precondition(_) | Error::UnsupportedWeight(_) | Error::MissingData(_) | Error::NotHyperbolic(_) => {
            SupnormStatus::InvalidArgument
        }
        _ => SupnormStatus::Numerical,
    }
}

/// Runs `f`, converting errors and panics to a status.
fn guard(f: impl FnOnce() -> Result<(), (SupnormStatus, String)>) -> SupnormStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => SupnormStatus::Ok,
        Ok(Err((status, msg))) => {
            set_error(msg);
            status
        }
        Err(_) => {
            set_error("internal panic".into());
            SupnormStatus::Panic
        }
    }
}

fn lib_err(e: Error) -> (SupnormStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (SupnormStatus, String) {
    (SupnormStatus::NullPointer, format!("{what} is null"))
}

unsafe fn c_str<'a>(p: *const c_char, what: &str) -> Result<&'a str, (SupnormStatus, String)> {
    if p.is_null() {
        return Err(null(what));
    }
    CStr::from_ptr(p).to_str().map_err(|_| (SupnormStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn put_domain(out: *mut *mut SupnormDomain, d: FundamentalDomain) -> Result<(), (SupnormStatus, String)> {
    if out.is_null() {
        return Err(null("out"));
    }
    *out = Box::into_raw(Box::new(SupnormDomain { inner: d }));
    Ok(())
}

/// Message of the last failed call on this thread, or null. Valid until the next failing call.
#[no_mangle]
pub extern "C" fn supnorm_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Loads a domain description from a JSON file.
///
/// # Safety
/// `path` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn supnorm_domain_load(path: *const c_char, out: *mut *mut SupnormDomain) -> SupnormStatus {
    guard(|| {
        let p = c_str(path, "path")?;
        put_domain(out, load_domain(p).map_err(lib_err)?)
    })
}

/// Parses a domain description from JSON text.
///
/// # Safety
/// `json` must be a valid NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn supnorm_domain_from_json(json: *const c_char, out: *mut *mut SupnormDomain) -> SupnormStatus {
    guard(|| {
        let text = c_str(json, "json")?;
        put_domain(out, load_domain_str(text).map_err(lib_err)?)
    })
}

/// The bundled standard domain of the modular group.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn supnorm_domain_psl2z(out: *mut *mut SupnormDomain) -> SupnormStatus {
    guard(|| put_domain(out, psl2z()))
}

/// # Safety
/// `d` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn supnorm_domain_free(d: *mut SupnormDomain) {
    if !d.is_null() {
        drop(Box::from_raw(d));
    }
}

/// # Safety
/// `d` must be a live domain handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn supnorm_domain_covolume(d: *const SupnormDomain, out: *mut f64) -> SupnormStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("domain"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = d.inner.covolume();
        Ok(())
    })
}

/// Dimension of the space of cusp forms of weight `2k`.
///
/// # Safety
/// `d` must be a live domain handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn supnorm_domain_dimension(d: *const SupnormDomain, k: i64, out: *mut i64) -> SupnormStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("domain"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        *out = d.inner.dimension_d2k(k).map_err(lib_err)?;
        Ok(())
    })
}

/// Computes the constants and the bound table for `k_min ≤ k ≤ k_max`.
///
/// # Safety
/// `d` must be a live domain handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn supnorm_run(
    d: *const SupnormDomain,
    y0: f64,
    k_min: u32,
    k_max: u32,
    out: *mut *mut SupnormReport,
) -> SupnormStatus {
    guard(|| {
        let d = d.as_ref().ok_or_else(|| null("domain"))?;
        if out.is_null() {
            return Err(null("out"));
        }
        let (constants, report) = run_algorithm(&d.inner, y0, k_min, k_max).map_err(lib_err)?;
        *out = Box::into_raw(Box::new(SupnormReport { constants, report }));
        Ok(())
    })
}

/// # Safety
/// `r` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn supnorm_report_free(r: *mut SupnormReport) {
    if !r.is_null() {
        drop(Box::from_raw(r));
    }
}

/// Number of rows, or 0 for a null handle.
///
/// # Safety
/// `r` must be null or a live report handle.
#[no_mangle]
pub unsafe extern "C" fn supnorm_report_row_count(r: *const SupnormReport) -> usize {
    r.as_ref().map_or(0, |r| r.report.rows.len())
}

/// # Safety
/// `r` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn supnorm_report_row(r: *const SupnormReport, index: usize, out: *mut SupnormBoundRow) -> SupnormStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let row = r
            .report
            .rows
            .get(index)
            .ok_or_else(|| (SupnormStatus::NotFound, format!("row {index} out of range")))?;
        *out = SupnormBoundRow {
            k: row.k,
            cusp: match row.region {
                RegionTag::Compact => -1,
                RegionTag::Cusp(j) => j as i32,
            },
            upper: row.upper,
            lower: row.lower.unwrap_or(f64::NAN),
            source: match row.source {
                BoundSource::CompactPoincare => SupnormSource::CompactPoincare,
                BoundSource::CuspMaximumPrinciple => SupnormSource::CuspMaximumPrinciple,
                BoundSource::CuspParabolic => SupnormSource::CuspParabolic,
                BoundSource::CocompactExponential => SupnormSource::CocompactExponential,
            },
        };
        Ok(())
    })
}

/// Value of a named ledger constant (for example `"B_Y"` or `"sigma_Y"`).
/// Returns `NotFound` for unknown names and for constants absent on this domain.
///
/// # Safety
/// `r` must be a live report handle, `name` a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn supnorm_report_constant(r: *const SupnormReport, name: *const c_char, out: *mut f64) -> SupnormStatus {
    guard(|| {
        let r = r.as_ref().ok_or_else(|| null("report"))?;
        let name = c_str(name, "name")?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let entry = r
            .constants
            .ledger()
            .into_iter()
            .find(|e| e.name == name)
            .ok_or_else(|| (SupnormStatus::NotFound, format!("unknown constant {name}")))?;
        *out = entry.value.ok_or_else(|| (SupnormStatus::NotFound, format!("{name} is absent for this domain")))?;
        Ok(())
    })
}
