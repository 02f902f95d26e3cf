//! C ABI over the crisis-sim engine.
//!
//! Objects cross the boundary as opaque handles created by `cs_*_new`/`cs_*_load`
//! functions and released by the matching `cs_*_free`. Every fallible call
//! returns a [`CsStatus`]; on failure the message is available from
//! [`cs_last_error`] on the same thread. Panics never unwind into C.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use crisis_sim::engine;
use crisis_sim::params::Params;
use crisis_sim::report::{EnsembleStats, DEFAULT_QUANTILES};
use crisis_sim::{Error, Scenario};

/// Result code of every fallible call.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CsStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidString = 2,
    InvalidInput = 3,
    Io = 4,
    Runtime = 5,
    BufferTooSmall = 6,
    Panic = 7,
}

/// Calibration handle.
pub struct CsParams(Params);

/// Scenario handle.
pub struct CsScenario(Scenario);

/// Aggregated ensemble handle.
pub struct CsEnsemble {
    stats: EnsembleStats,
}

/// Horizon medians and path counts of an ensemble.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct CsSummary {
    pub gdp_med: f64,
    pub debt_med: f64,
    pub welfare_med: f64,
    pub reserves_med: f64,
    pub n_paths: usize,
    pub n_aborted: usize,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: impl Into<String>) {
    let text = msg.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

fn status_of(e: &Error) -> CsStatus {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::Validation(_) | Error::EmptyInput(_) => CsStatus::InvalidInput,
        Error::Io { .. } => CsStatus::Io,
        _ => CsStatus::Runtime,
    }
}

struct Fail(CsStatus, String);

impl From<Error> for Fail {
    fn from(e: Error) -> Self {
        Fail(status_of(&e), e.to_string())
    }
}

fn guard(f: impl FnOnce() -> Result<(), Fail>) -> CsStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => CsStatus::Ok,
        Ok(Err(Fail(code, msg))) => {
            set_error(msg);
            code
        }
        Err(payload) => {
            let msg = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("panic: {msg}"));
            CsStatus::Panic
        }
    }
}

unsafe fn borrow<'a, T>(p: *const T, what: &str) -> Result<&'a T, Fail> {
    p.as_ref().ok_or_else(|| Fail(CsStatus::NullPointer, format!("{what} is null")))
}

unsafe fn text<'a>(p: *const c_char, what: &str) -> Result<&'a str, Fail> {
    if p.is_null() {
        return Err(Fail(CsStatus::NullPointer, format!("{what} is null")));
    }
    CStr::from_ptr(p).to_str().map_err(|_| Fail(CsStatus::InvalidString, format!("{what} is not UTF-8")))
}

unsafe fn emit<T>(out: *mut *mut T, value: T) -> Result<(), Fail> {
    if out.is_null() {
        return Err(Fail(CsStatus::NullPointer, "output pointer is null".into()));
    }
    *out = Box::into_raw(Box::new(value));
    Ok(())
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn cs_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Copy of the last error message on this thread, or NULL if none.
/// Release with [`cs_string_free`].
#[no_mangle]
pub extern "C" fn cs_last_error() -> *mut c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null_mut(), |s| s.clone().into_raw()))
}

/// # Safety
/// `s` must be NULL or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn cs_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}

/// Reference calibration.
///
/// # Safety
/// `out` must be a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_params_reference(out: *mut *mut CsParams) -> CsStatus {
    guard(|| emit(out, CsParams(Params::reference())))
}

/// Loads and validates a parameter file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_params_load(path: *const c_char, out: *mut *mut CsParams) -> CsStatus {
    guard(|| {
        let p = Params::load(text(path, "path")?)?;
        emit(out, CsParams(p))
    })
}

/// # Safety
/// `p` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_params_free(p: *mut CsParams) {
    if !p.is_null() {
        drop(Box::from_raw(p));
    }
}

/// Scenario with no policy actions.
///
/// # Safety
/// `name` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_scenario_baseline(name: *const c_char, out: *mut *mut CsScenario) -> CsStatus {
    guard(|| emit(out, CsScenario(Scenario::baseline(text(name, "name")?))))
}

/// Loads a scenario file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_scenario_load(path: *const c_char, out: *mut *mut CsScenario) -> CsStatus {
    guard(|| {
        let s = Scenario::from_file(text(path, "path")?)?;
        emit(out, CsScenario(s))
    })
}

/// # Safety
/// `s` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_scenario_free(s: *mut CsScenario) {
    if !s.is_null() {
        drop(Box::from_raw(s));
    }
}

/// Runs `n_paths` paths for `horizon` quarters on `threads` workers (0 = one per core)
/// and aggregates them at the default quantile levels.
///
/// # Safety
/// Handles must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_ensemble_run(
    params: *const CsParams,
    scenario: *const CsScenario,
    seed: u64,
    n_paths: u64,
    horizon: u32,
    threads: usize,
    out: *mut *mut CsEnsemble,
) -> CsStatus {
    guard(|| {
        let params = &borrow(params, "params")?.0;
        let scenario = &borrow(scenario, "scenario")?.0;
        let stats = engine::with_threads(threads, || {
            let paths = engine::run_ensemble(scenario, params, seed, n_paths, horizon)?;
            EnsembleStats::from_paths(&paths, &DEFAULT_QUANTILES)
        })??;
        emit(out, CsEnsemble { stats })
    })
}

/// # Safety
/// `e` must be NULL or a handle from this library, not yet freed.
#[no_mangle]
pub unsafe extern "C" fn cs_ensemble_free(e: *mut CsEnsemble) {
    if !e.is_null() {
        drop(Box::from_raw(e));
    }
}

/// # Safety
/// `e` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_ensemble_summary(e: *const CsEnsemble, out: *mut CsSummary) -> CsStatus {
    guard(|| {
        let s = &borrow(e, "ensemble")?.stats.summary;
        let out = out.as_mut().ok_or_else(|| Fail(CsStatus::NullPointer, "output pointer is null".into()))?;
        *out = CsSummary {
            gdp_med: s.gdp_med,
            debt_med: s.debt_med,
            welfare_med: s.welfare_med,
            reserves_med: s.reserves_med,
            n_paths: s.n_paths,
            n_aborted: s.n_aborted,
        };
        Ok(())
    })
}

/// Number of quantile levels in every series.
///
/// # Safety
/// `e` must be live and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_ensemble_level_count(e: *const CsEnsemble, out: *mut usize) -> CsStatus {
    guard(|| {
        let n = borrow(e, "ensemble")?.stats.levels.len();
        *out.as_mut().ok_or_else(|| Fail(CsStatus::NullPointer, "output pointer is null".into()))? = n;
        Ok(())
    })
}

/// Copies quantile `level_index` of `variable` for quarters `0..=horizon` into `buf`.
/// `written` receives the number of quarters; if `len` is too small nothing is
/// copied, `written` holds the required length and `BUFFER_TOO_SMALL` is returned.
///
/// # Safety
/// `e` must be live, `variable` NUL-terminated, `buf` valid for `len` doubles
/// and `written` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn cs_ensemble_series(
    e: *const CsEnsemble,
    variable: *const c_char,
    level_index: usize,
    buf: *mut f64,
    len: usize,
    written: *mut usize,
) -> CsStatus {
    guard(|| {
        let stats = &borrow(e, "ensemble")?.stats;
        let name = text(variable, "variable")?;
        let written = written.as_mut().ok_or_else(|| Fail(CsStatus::NullPointer, "written is null".into()))?;
        let series =
            stats.series(name).ok_or_else(|| Fail(CsStatus::InvalidInput, format!("unknown variable {name:?}")))?;
        if level_index >= stats.levels.len() {
            return Err(Fail(CsStatus::InvalidInput, format!("level index {level_index} out of range")));
        }
        let need = series.values.len();
        *written = need;
        if len < need {
            return Err(Fail(CsStatus::BufferTooSmall, format!("buffer holds {len}, need {need}")));
        }
        if buf.is_null() {
            return Err(Fail(CsStatus::NullPointer, "buf is null".into()));
        }
        let dst = std::slice::from_raw_parts_mut(buf, need);
        for (d, row) in dst.iter_mut().zip(&series.values) {
            *d = row[level_index];
        }
        Ok(())
    })
}
