//! C ABI over the dirac-top engine.
//!
//! Every function returns a [`DtStatus`]; on failure the message is available
//! from [`dt_last_error_message`] on the same thread. Engines are opaque and
//! must be released with [`dt_engine_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};

use dirac_top::cli::{verify, RunConfig, Suite};
use dirac_top::error::TopError;
use dirac_top::geometry::{config_metric, curvature, ConfigPoint, DIM};
use dirac_top::lorentz::{lorentz_from_euler, EulerAngles};
use dirac_top::spin::a_from_mass;

#[repr(C)]
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DtStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidUtf8 = 2,
    Config = 3,
    Domain = 4,
    Numerical = 5,
    ChecksFailed = 6,
    Panic = 7,
}

/// Physical constants in natural units.
#[repr(C)]
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct DtConstants {
    pub hbar: f64,
    pub c: f64,
    pub m: f64,
    pub e: f64,
    pub a: f64,
    pub gamma2: f64,
}

/// Opaque engine handle.
pub struct DtEngine {
    config: RunConfig,
    report: Option<CString>,
}

thread_local! {
    static LAST_ERROR: RefCell<CString> = RefCell::new(CString::default());
}

fn set_error(msg: &str) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = c);
}

fn status_of(e: &TopError) -> DtStatus {
    match e {
        TopError::Config(_) | TopError::Io(_) => DtStatus::Config,
        TopError::Domain(_)
        | TopError::UnsupportedRep { .. }
        | TopError::NonpositiveMass(_)
        | TopError::OffShellMomentum(_)
        | TopError::TooShort(_) => DtStatus::Domain,
        _ => DtStatus::Numerical,
    }
}

fn guard(f: impl FnOnce() -> Result<(), (DtStatus, String)>) -> DtStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => DtStatus::Ok,
        Ok(Err((s, msg))) => {
            set_error(&msg);
            s
        }
        Err(_) => {
            set_error("internal panic");
            DtStatus::Panic
        }
    }
}

fn top(e: TopError) -> (DtStatus, String) {
    (status_of(&e), e.to_string())
}

fn null(what: &str) -> (DtStatus, String) {
    (DtStatus::NullPointer, format!("{what} is null"))
}

/// Message of the last failure on this thread; valid until the next failing call.
#[no_mangle]
pub extern "C" fn dt_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ptr())
}

/// Creates an engine with the default configuration.
///
/// # Safety
/// `out` must be a valid pointer to writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn dt_engine_new(out: *mut *mut DtEngine) -> DtStatus {
    guard(|| {
        if out.is_null() {
            return Err(null("out"));
        }
        let engine = Box::new(DtEngine { config: RunConfig::default(), report: None });
        *out = Box::into_raw(engine);
        Ok(())
    })
}

/// Creates an engine from TOML configuration text.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` writable storage for one handle.
#[no_mangle]
pub unsafe extern "C" fn dt_engine_from_toml(toml: *const c_char, out: *mut *mut DtEngine) -> DtStatus {
    guard(|| {
        if toml.is_null() {
            return Err(null("toml"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let text = CStr::from_ptr(toml).to_str().map_err(|e| (DtStatus::InvalidUtf8, e.to_string()))?;
        let config = RunConfig::from_toml(text).map_err(top)?;
        *out = Box::into_raw(Box::new(DtEngine { config, report: None }));
        Ok(())
    })
}

/// Releases an engine; null is ignored.
///
/// # Safety
/// `engine` must come from this library and not be used afterwards.
#[no_mangle]
pub unsafe extern "C" fn dt_engine_free(engine: *mut DtEngine) {
    if !engine.is_null() {
        drop(Box::from_raw(engine));
    }
}

/// # Safety
/// `engine` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn dt_engine_set_seed(engine: *mut DtEngine, seed: u64) -> DtStatus {
    guard(|| {
        let e = engine.as_mut().ok_or_else(|| null("engine"))?;
        e.config.seed = seed;
        Ok(())
    })
}

/// # Safety
/// `engine` must be a live handle and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dt_engine_constants(engine: *const DtEngine, out: *mut DtConstants) -> DtStatus {
    guard(|| {
        let e = engine.as_ref().ok_or_else(|| null("engine"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let k = e.config.physical_constants().map_err(top)?;
        *out = DtConstants { hbar: k.hbar, c: k.c, m: k.m, e: k.e, a: k.a, gamma2: k.gamma2 };
        Ok(())
    })
}

/// Scalar curvature of the configuration metric at q = (x⁰..x³, θ¹..θ⁶).
///
/// # Safety
/// `engine` must be live, `q` must point to 10 doubles and `out` to one.
#[no_mangle]
pub unsafe extern "C" fn dt_engine_scalar_curvature(engine: *const DtEngine, q: *const f64, out: *mut f64) -> DtStatus {
    guard(|| {
        let e = engine.as_ref().ok_or_else(|| null("engine"))?;
        if q.is_null() {
            return Err(null("q"));
        }
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let mut arr = [0.0; DIM];
        arr.copy_from_slice(std::slice::from_raw_parts(q, DIM));
        let p = ConfigPoint::from_array(&arr);
        p.validate().map_err(top)?;
        let k = e.config.physical_constants().map_err(top)?;
        *out = curvature(&config_metric(&k, e.config.sign), &p.to_array()).map_err(top)?.scalar;
        Ok(())
    })
}

/// Λ(θ) for six Euler angles, written row-major into 16 doubles.
///
/// # Safety
/// `theta` must point to 6 doubles and `out` to 16.
#[no_mangle]
pub unsafe extern "C" fn dt_lorentz_from_euler(theta: *const f64, out: *mut f64) -> DtStatus {
    guard(|| {
        if theta.is_null() {
            return Err(null("theta"));
        }
        if out.is_null() {
            return Err(null("out"));
        }
        let mut t = [0.0; 6];
        t.copy_from_slice(std::slice::from_raw_parts(theta, 6));
        let l = lorentz_from_euler(&EulerAngles(t)).map_err(top)?;
        let dst = std::slice::from_raw_parts_mut(out, 16);
        for (k, v) in dst.iter_mut().enumerate() {
            *v = l.0[k / 4][k % 4];
        }
        Ok(())
    })
}

/// Top length a that makes the reduced mass term equal m²c², using the engine's constants.
///
/// # Safety
/// `engine` must be live and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn dt_engine_a_from_mass(engine: *const DtEngine, m: f64, out: *mut f64) -> DtStatus {
    guard(|| {
        let e = engine.as_ref().ok_or_else(|| null("engine"))?;
        let out = out.as_mut().ok_or_else(|| null("out"))?;
        let k = e.config.physical_constants().map_err(top)?;
        *out = a_from_mass(m, &k).map_err(top)?;
        Ok(())
    })
}

/// Number of verification suites; bit i of a suite mask selects suite i.
#[no_mangle]
pub extern "C" fn dt_suite_count() -> u32 {
    Suite::ALL.len() as u32
}

/// Runs the suites in `suite_mask` (0 selects all) and stores the JSON report.
/// Returns `ChecksFailed` when any check fails; the report is still stored.
///
/// # Safety
/// `engine` must be live; `passed` may be null.
#[no_mangle]
pub unsafe extern "C" fn dt_engine_verify(engine: *mut DtEngine, suite_mask: u32, passed: *mut bool) -> DtStatus {
    guard(|| {
        let e = engine.as_mut().ok_or_else(|| null("engine"))?;
        let mut cfg = e.config.clone();
        cfg.suites = Suite::ALL.iter().enumerate().filter(|(i, _)| suite_mask & (1 << i) != 0).map(|(_, s)| *s).collect();
        let report = verify(&cfg, false).map_err(top)?;
        e.report = Some(CString::new(report.to_json()).expect("report has no NUL"));
        if let Some(p) = passed.as_mut() {
            *p = report.pass;
        }
        if report.pass {
            Ok(())
        } else {
            Err((DtStatus::ChecksFailed, "one or more checks failed".into()))
        }
    })
}

/// JSON text of the last report, or null before any verify call.
/// The pointer stays valid until the next verify call or until the engine is freed.
///
/// # Safety
/// `engine` must be live.
#[no_mangle]
pub unsafe extern "C" fn dt_engine_report_json(engine: *const DtEngine) -> *const c_char {
    match engine.as_ref().and_then(|e| e.report.as_ref()) {
        Some(s) => s.as_ptr(),
        None => std::ptr::null(),
    }
}
