//! C ABI over `shapecalc`.
//!
//! Objects are built from the same JSON descriptions the experiment configs
//! use and handed out as opaque pointers; every handle has a matching
//! `*_free`. Functions return an [`ScStatus`]; on failure the message is
//! available from [`sc_last_error_message`] on the calling thread. Strings
//! returned through `char **` out-parameters are owned by the caller and
//! released with [`sc_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::PathBuf;

use shapecalc::catalog::{FieldDesc, FunctionalDesc, ShapeDesc};
use shapecalc::derivative::{compare, eulerian_fd, FdConfig, Tolerances};
use shapecalc::experiment::{run_timed, ConfigError, ExperimentConfig};
use shapecalc::fields::AmbientField;
use shapecalc::flow::{flow_point, FlowConfig};
use shapecalc::functionals::ShapeFunctional;
use shapecalc::geometry::{Manifold, Region, Vec3};
use shapecalc::report::to_json;
use shapecalc::ShapeError;

/// Result codes. Zero is success; everything else leaves out-parameters
/// untouched.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ScStatus {
    Ok = 0,
    /// Null pointer, non-UTF-8 string, or out-of-range number.
    InvalidArgument = 1,
    /// JSON that does not describe a valid object.
    Parse = 2,
    /// Degenerate or otherwise unusable geometry or field.
    Geometry = 3,
    /// A field support leaves its allowed region.
    Support = 4,
    /// The finite-difference extrapolation did not settle.
    NoConvergence = 5,
    /// A NaN or infinity appeared during evaluation.
    NonFinite = 6,
    /// The operation is not available for this object.
    Unsupported = 7,
    /// Reading or writing files failed.
    Io = 8,
    /// The run completed but at least one check failed.
    SuiteFailed = 9,
    /// An internal panic was caught at the boundary.
    Panic = 10,
}

pub struct ScManifold {
    inner: Manifold,
}

pub struct ScField {
    inner: AmbientField,
}

pub struct ScFunctional {
    inner: ShapeFunctional,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

struct Failure(ScStatus, String);

type FfiResult<T> = Result<T, Failure>;

impl From<ShapeError> for Failure {
    fn from(e: ShapeError) -> Self {
        let status = match &e {
            ShapeError::SupportViolation { .. } => ScStatus::Support,
            ShapeError::NoConvergence(_) => ScStatus::NoConvergence,
            ShapeError::NonFinite(_) => ScStatus::NonFinite,
            ShapeError::Unsupported(_) | ShapeError::NoBoundary => ScStatus::Unsupported,
            ShapeError::InvalidArgument(_) => ScStatus::InvalidArgument,
            _ => ScStatus::Geometry,
        };
        Failure(status, e.to_string())
    }
}

impl From<ConfigError> for Failure {
    fn from(e: ConfigError) -> Self {
        let status = match &e {
            ConfigError::Io { .. } => ScStatus::Io,
            _ => ScStatus::Parse,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: ScStatus, msg: impl Into<String>) -> FfiResult<T> {
    Err(Failure(status, msg.into()))
}

fn set_error(msg: Option<String>) {
    LAST_ERROR.with(|slot| {
        *slot.borrow_mut() = msg.map(|m| CString::new(m.replace('\0', " ")).expect("NULs removed"));
    });
}

/// Runs `body` behind the panic boundary and records its error message.
fn guard(body: impl FnOnce() -> FfiResult<()>) -> ScStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => {
            set_error(None);
            ScStatus::Ok
        }
        Ok(Err(Failure(status, msg))) => {
            set_error(Some(msg));
            status
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(Some(format!("internal panic: {msg}")));
            ScStatus::Panic
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<&'a str> {
    if p.is_null() {
        return fail(ScStatus::InvalidArgument, format!("{what} is null"));
    }
    CStr::from_ptr(p)
        .to_str()
        .or_else(|_| fail(ScStatus::InvalidArgument, format!("{what} is not UTF-8")))
}

unsafe fn opt_str_arg<'a>(p: *const c_char, what: &str) -> FfiResult<Option<&'a str>> {
    if p.is_null() {
        Ok(None)
    } else {
        str_arg(p, what).map(Some)
    }
}

unsafe fn ref_arg<'a, T>(p: *const T, what: &str) -> FfiResult<&'a T> {
    p.as_ref()
        .map_or_else(|| fail(ScStatus::InvalidArgument, format!("{what} is null")), Ok)
}

fn check_out<T>(p: *mut T, what: &str) -> FfiResult<()> {
    if p.is_null() {
        return fail(ScStatus::InvalidArgument, format!("{what} is null"));
    }
    Ok(())
}

fn parse<T: serde::de::DeserializeOwned>(text: &str, what: &str) -> FfiResult<T> {
    serde_json::from_str(text).or_else(|e| fail(ScStatus::Parse, format!("{what}: {e}")))
}

fn parse_or_default<T: serde::de::DeserializeOwned + Default>(text: Option<&str>, what: &str) -> FfiResult<T> {
    text.map_or_else(|| Ok(T::default()), |t| parse(t, what))
}

fn c_string(s: String) -> FfiResult<*mut c_char> {
    CString::new(s)
        .map(CString::into_raw)
        .or_else(|_| fail(ScStatus::Unsupported, "string contains NUL"))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sc_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Message of the last failed call on this thread, or NULL after a success.
/// Valid until the next `sc_*` call on the same thread.
#[no_mangle]
pub extern "C" fn sc_last_error_message() -> *const c_char {
    LAST_ERROR.with(|slot| slot.borrow().as_ref().map_or(std::ptr::null(), |s| s.as_ptr()))
}

/// Releases a string returned by this library. NULL is ignored.
///
/// # Safety
/// `s` must come from this library and not have been freed.
#[no_mangle]
pub unsafe extern "C" fn sc_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Builds a curve or surface from a shape description such as
/// `{"kind": "circle", "radius": 1}`.
///
/// # Safety
/// `json` must be NULL or NUL-terminated; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sc_manifold_from_json(json: *const c_char, out: *mut *mut ScManifold) -> ScStatus {
    guard(|| {
        check_out(out, "out")?;
        let desc: ShapeDesc = parse(str_arg(json, "json")?, "shape")?;
        let inner = desc.build()?;
        *out = Box::into_raw(Box::new(ScManifold { inner }));
        Ok(())
    })
}

/// # Safety
/// `m` must be NULL or a live handle from [`sc_manifold_from_json`].
#[no_mangle]
pub unsafe extern "C" fn sc_manifold_free(m: *mut ScManifold) {
    if !m.is_null() {
        drop(Box::from_raw(m));
    }
}

/// Ambient dimension (2 or 3) of the manifold, or 0 for NULL.
///
/// # Safety
/// `m` must be NULL or a live handle.
#[no_mangle]
pub unsafe extern "C" fn sc_manifold_dim(m: *const ScManifold) -> u32 {
    m.as_ref().map_or(0, |m| m.inner.ambient_dim() as u32)
}

/// Builds a vector field in R^`dim` from a field description. `region_json`
/// is the hold-all region (e.g. `{"kind": "ball", "center": [0,0,0],
/// "radius": 5}`); NULL means all of space.
///
/// # Safety
/// String arguments must be NULL or NUL-terminated; `out` must be NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sc_field_from_json(
    json: *const c_char,
    dim: u32,
    region_json: *const c_char,
    out: *mut *mut ScField,
) -> ScStatus {
    guard(|| {
        check_out(out, "out")?;
        if dim != 2 && dim != 3 {
            return fail(ScStatus::InvalidArgument, format!("dim must be 2 or 3, got {dim}"));
        }
        let desc: FieldDesc = parse(str_arg(json, "json")?, "field")?;
        let region = match opt_str_arg(region_json, "region_json")? {
            Some(t) => parse(t, "region")?,
            None => Region::Everywhere,
        };
        let inner = desc.build(dim as usize, &region)?;
        *out = Box::into_raw(Box::new(ScField { inner }));
        Ok(())
    })
}

/// # Safety
/// `x` must be NULL or a live handle from [`sc_field_from_json`].
#[no_mangle]
pub unsafe extern "C" fn sc_field_free(x: *mut ScField) {
    if !x.is_null() {
        drop(Box::from_raw(x));
    }
}

/// Builds a shape functional for use on `m` (crack functionals check that
/// `m` lies inside their domain).
///
/// # Safety
/// `json` must be NULL or NUL-terminated; `m` NULL or live; `out` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sc_functional_from_json(
    json: *const c_char,
    m: *const ScManifold,
    out: *mut *mut ScFunctional,
) -> ScStatus {
    guard(|| {
        check_out(out, "out")?;
        let desc: FunctionalDesc = parse(str_arg(json, "json")?, "functional")?;
        let m = ref_arg(m, "manifold")?;
        let inner = desc.build(&m.inner)?;
        *out = Box::into_raw(Box::new(ScFunctional { inner }));
        Ok(())
    })
}

/// # Safety
/// `j` must be NULL or a live handle from [`sc_functional_from_json`].
#[no_mangle]
pub unsafe extern "C" fn sc_functional_free(j: *mut ScFunctional) {
    if !j.is_null() {
        drop(Box::from_raw(j));
    }
}

/// J(M).
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_evaluate(j: *const ScFunctional, m: *const ScManifold, out: *mut f64) -> ScStatus {
    guard(|| {
        check_out(out, "out")?;
        let (j, m) = (ref_arg(j, "functional")?, ref_arg(m, "manifold")?);
        *out = j.inner.evaluate(&m.inner)?;
        Ok(())
    })
}

/// Closed-form Eulerian derivative dJ(M)(X).
///
/// # Safety
/// Handles must be live; `out` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_analytic_derivative(
    j: *const ScFunctional,
    m: *const ScManifold,
    x: *const ScField,
    out: *mut f64,
) -> ScStatus {
    guard(|| {
        check_out(out, "out")?;
        let (j, m, x) = (ref_arg(j, "functional")?, ref_arg(m, "manifold")?, ref_arg(x, "field")?);
        *out = j.inner.analytic_derivative(&m.inner, &x.inner)?;
        Ok(())
    })
}

/// Finite-difference derivative along the flow of X. `fd_json` overrides the
/// schedule (`{"t0": .., "levels": .., "richardson": .., "flow": ..}`);
/// NULL uses the defaults. `out_error` may be NULL.
///
/// # Safety
/// Handles must be live; strings NULL or NUL-terminated; `out_value` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_eulerian_fd(
    j: *const ScFunctional,
    m: *const ScManifold,
    x: *const ScField,
    fd_json: *const c_char,
    out_value: *mut f64,
    out_error: *mut f64,
) -> ScStatus {
    guard(|| {
        check_out(out_value, "out_value")?;
        let (j, m, x) = (ref_arg(j, "functional")?, ref_arg(m, "manifold")?, ref_arg(x, "field")?);
        let cfg: FdConfig = parse_or_default(opt_str_arg(fd_json, "fd_json")?, "fd config")?;
        cfg.validate()?;
        let est = eulerian_fd(&j.inner, &m.inner, &x.inner, &cfg)?;
        *out_value = est.value;
        if !out_error.is_null() {
            *out_error = est.error_estimate;
        }
        Ok(())
    })
}

/// Analytic-versus-FD comparison. Writes the derivative report as JSON to
/// `*out_report` (free with [`sc_string_free`]) and its verdict to
/// `*out_pass` (may be NULL). A failed verdict still returns `Ok`.
///
/// # Safety
/// Handles must be live; strings NULL or NUL-terminated; `out_report` writable.
#[no_mangle]
pub unsafe extern "C" fn sc_compare(
    j: *const ScFunctional,
    m: *const ScManifold,
    x: *const ScField,
    fd_json: *const c_char,
    tolerances_json: *const c_char,
    out_report: *mut *mut c_char,
    out_pass: *mut bool,
) -> ScStatus {
    guard(|| {
        check_out(out_report, "out_report")?;
        let (j, m, x) = (ref_arg(j, "functional")?, ref_arg(m, "manifold")?, ref_arg(x, "field")?);
        let cfg: FdConfig = parse_or_default(opt_str_arg(fd_json, "fd_json")?, "fd config")?;
        cfg.validate()?;
        let tol: Tolerances = parse_or_default(opt_str_arg(tolerances_json, "tolerances_json")?, "tolerances")?;
        let c = compare(&j.inner, &m.inner, &x.inner, &cfg, &tol)?;
        let text = to_json(&c.report).or_else(|e| fail(ScStatus::Unsupported, e.to_string()))?;
        *out_report = c_string(text)?;
        if !out_pass.is_null() {
            *out_pass = c.report.verdict.is_pass();
        }
        Ok(())
    })
}

/// Φ_t(x0) by RK4 with `n_steps` steps (0 picks steps of at most 0.01).
///
/// # Safety
/// `x` must be live; `x0` and `out` must point to three doubles.
#[no_mangle]
pub unsafe extern "C" fn sc_flow_point(
    x: *const ScField,
    x0: *const f64,
    t_final: f64,
    n_steps: u32,
    out: *mut f64,
) -> ScStatus {
    guard(|| {
        check_out(out, "out")?;
        let x = ref_arg(x, "field")?;
        let p = ref_arg(x0.cast::<[f64; 3]>(), "x0")?;
        let cfg = if n_steps == 0 {
            let cfg = FlowConfig::with_default_steps(t_final);
            cfg.validate()?;
            cfg
        } else {
            FlowConfig::new(t_final, n_steps as usize)?
        };
        let y = flow_point(&x.inner, &Vec3::new(p[0], p[1], p[2]), &cfg)?;
        std::ptr::copy_nonoverlapping(y.as_slice().as_ptr(), out, 3);
        Ok(())
    })
}

/// Runs an experiment config given as JSON text. Reports go to `out_dir`
/// (NULL: the config's `output.path`). The run summary is written as JSON
/// to `*out_summary` if that is non-NULL. Returns `SuiteFailed` when any
/// check fails.
///
/// # Safety
/// Strings must be NULL or NUL-terminated; `out_summary` NULL or writable.
#[no_mangle]
pub unsafe extern "C" fn sc_run_config(
    config_json: *const c_char,
    out_dir: *const c_char,
    out_summary: *mut *mut c_char,
) -> ScStatus {
    let mut passed = true;
    let status = guard(|| {
        let mut cfg = ExperimentConfig::from_json(str_arg(config_json, "config_json")?)?;
        if let Some(dir) = opt_str_arg(out_dir, "out_dir")? {
            cfg.output.path = PathBuf::from(dir);
        }
        let (report, summary) = run_timed(&cfg, None)?;
        report
            .write(&cfg.output.path, &cfg.output.formats, &summary)
            .or_else(|e| fail(ScStatus::Io, format!("{}: {e}", cfg.output.path.display())))?;
        if !out_summary.is_null() {
            let text = to_json(&summary).or_else(|e| fail(ScStatus::Unsupported, e.to_string()))?;
            *out_summary = c_string(text)?;
        }
        passed = summary.pass;
        Ok(())
    });
    if status == ScStatus::Ok && !passed {
        set_error(Some("one or more checks failed".into()));
        return ScStatus::SuiteFailed;
    }
    status
}
