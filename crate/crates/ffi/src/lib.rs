//! C ABI over the experiment driver.
//!
//! Handles are opaque and owned by the caller, who releases them with the matching `_free`
//! function. Every fallible call returns an [`SioStatus`]; on failure the message is available
//! from [`sio_last_error`] on the same thread until the next failing call. Strings returned by the
//! library are released with [`sio_string_free`].

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::ptr;

use sio_channel::harness::{self, Experiment, ExperimentConfig, Format, Report, SuiteId};
use sio_channel::Error;

/// Status codes. The first three match the command-line exit codes.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SioStatus {
    Ok = 0,
    /// The run completed and at least one check failed.
    ChecksFailed = 1,
    /// Invalid configuration, unknown suite id, or an unreadable file.
    Usage = 2,
    NullArgument = 3,
    InvalidUtf8 = 4,
    /// Numerical or archive failure during a run.
    Runtime = 5,
    Panic = 6,
}

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SioFormat {
    Csv = 0,
    Json = 1,
}

/// A validated experiment: config, channel, grids and probes.
pub struct SioExperiment(Experiment);

/// A verification report.
pub struct SioReport(Report);

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(msg: String) {
    let c = CString::new(msg.replace('\0', " ")).unwrap_or_default();
    LAST_ERROR.with(|e| *e.borrow_mut() = Some(c));
}

fn fail(status: SioStatus, msg: impl Into<String>) -> SioStatus {
    set_error(msg.into());
    status
}

fn from_error(e: Error) -> SioStatus {
    let status = if e.exit_code() == 2 { SioStatus::Usage } else { SioStatus::Runtime };
    fail(status, e.to_string())
}

/// Runs `f`, turning panics into [`SioStatus::Panic`].
fn guarded(f: impl FnOnce() -> SioStatus) -> SioStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(s) => s,
        Err(p) => {
            let msg = p
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| p.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "panic".into());
            fail(SioStatus::Panic, msg)
        }
    }
}

unsafe fn str_arg<'a>(p: *const c_char, what: &str) -> Result<&'a str, SioStatus> {
    if p.is_null() {
        return Err(fail(SioStatus::NullArgument, format!("{what} is null")));
    }
    CStr::from_ptr(p)
        .to_str()
        .map_err(|_| fail(SioStatus::InvalidUtf8, format!("{what} is not valid UTF-8")))
}

fn workers_or_env(workers: usize) -> Result<usize, SioStatus> {
    if workers > 0 {
        Ok(workers)
    } else {
        harness::workers_from_env().map_err(from_error)
    }
}

macro_rules! try_status {
    ($e:expr) => {
        match $e {
            Ok(v) => v,
            Err(s) => return s,
        }
    };
}

/// Message of the last failure on this thread, or null. Owned by the library.
#[no_mangle]
pub extern "C" fn sio_last_error() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |c| c.as_ptr()))
}

/// Library version as a static NUL-terminated string.
#[no_mangle]
pub extern "C" fn sio_version() -> *const c_char {
    concat!(env!("CARGO_PKG_VERSION"), "\0").as_ptr().cast()
}

/// Parses and validates a TOML experiment config.
///
/// # Safety
/// `toml` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sio_experiment_from_toml(toml: *const c_char, out: *mut *mut SioExperiment) -> SioStatus {
    guarded(|| {
        if out.is_null() {
            return fail(SioStatus::NullArgument, "out is null");
        }
        let text = try_status!(str_arg(toml, "toml"));
        match ExperimentConfig::from_toml(text).and_then(|c| c.build()) {
            Ok(exp) => {
                *out = Box::into_raw(Box::new(SioExperiment(exp)));
                SioStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// Reads a TOML experiment config from a file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sio_experiment_load(path: *const c_char, out: *mut *mut SioExperiment) -> SioStatus {
    guarded(|| {
        if out.is_null() {
            return fail(SioStatus::NullArgument, "out is null");
        }
        let path = try_status!(str_arg(path, "path"));
        match ExperimentConfig::load(path.as_ref()).and_then(|c| c.build()) {
            Ok(exp) => {
                *out = Box::into_raw(Box::new(SioExperiment(exp)));
                SioStatus::Ok
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `exp` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sio_experiment_free(exp: *mut SioExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

/// Realizations per statistical suite.
///
/// # Safety
/// `exp` must be a live experiment handle.
#[no_mangle]
pub unsafe extern "C" fn sio_experiment_n_reps(exp: *const SioExperiment) -> usize {
    exp.as_ref().map_or(0, |e| e.0.config.n_reps)
}

/// Writes the realization archive to `path`. `workers = 0` reads `SIO_WORKERS`.
///
/// # Safety
/// `exp` must be a live experiment handle and `path` a NUL-terminated string.
#[no_mangle]
pub unsafe extern "C" fn sio_simulate(exp: *const SioExperiment, path: *const c_char, workers: usize) -> SioStatus {
    guarded(|| {
        let Some(exp) = exp.as_ref() else {
            return fail(SioStatus::NullArgument, "experiment is null");
        };
        let path = try_status!(str_arg(path, "path"));
        let workers = try_status!(workers_or_env(workers));
        let run = || -> sio_channel::Result<()> {
            let mut w = std::io::BufWriter::new(std::fs::File::create(path)?);
            harness::write_archive(&exp.0, workers, &mut w)?;
            std::io::Write::flush(&mut w)?;
            Ok(())
        };
        match run() {
            Ok(()) => SioStatus::Ok,
            Err(e) => from_error(e),
        }
    })
}

/// Runs suite `suite` (or `"all"` configured suites) and stores the report in `out`.
///
/// Returns [`SioStatus::ChecksFailed`] with a valid report when some check failed.
///
/// # Safety
/// `exp` must be a live experiment handle, `suite` a NUL-terminated string and `out` a valid
/// pointer.
#[no_mangle]
pub unsafe extern "C" fn sio_verify(
    exp: *const SioExperiment,
    suite: *const c_char,
    workers: usize,
    out: *mut *mut SioReport,
) -> SioStatus {
    guarded(|| {
        let Some(exp) = exp.as_ref() else {
            return fail(SioStatus::NullArgument, "experiment is null");
        };
        if out.is_null() {
            return fail(SioStatus::NullArgument, "out is null");
        }
        let suite = try_status!(str_arg(suite, "suite"));
        let ids = if suite == "all" {
            exp.0.config.suite_ids()
        } else {
            SuiteId::parse(suite).map(|id| vec![id])
        };
        let ids = try_status!(ids.map_err(from_error));
        let workers = try_status!(workers_or_env(workers));
        match harness::run_suites(&exp.0, &ids, workers, None) {
            Ok(rep) => {
                let passed = rep.all_passed();
                *out = Box::into_raw(Box::new(SioReport(rep)));
                if passed {
                    SioStatus::Ok
                } else {
                    fail(SioStatus::ChecksFailed, "some checks failed")
                }
            }
            Err(e) => from_error(e),
        }
    })
}

/// # Safety
/// `report` must come from this library and not be used afterwards. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sio_report_free(report: *mut SioReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// Row tallies of a report. Any of the out pointers may be null.
///
/// # Safety
/// `report` must be a live report handle; non-null out pointers must be valid.
#[no_mangle]
pub unsafe extern "C" fn sio_report_summary(
    report: *const SioReport,
    total: *mut usize,
    passed: *mut usize,
    failed: *mut usize,
) -> SioStatus {
    let Some(r) = report.as_ref() else {
        return fail(SioStatus::NullArgument, "report is null");
    };
    let s = &r.0.summary;
    for (p, v) in [(total, s.total), (passed, s.passed), (failed, s.failed)] {
        if !p.is_null() {
            *p = v;
        }
    }
    SioStatus::Ok
}

/// Renders the report; release `*out` with [`sio_string_free`].
///
/// # Safety
/// `report` must be a live report handle and `out` a valid pointer.
#[no_mangle]
pub unsafe extern "C" fn sio_report_render(report: *const SioReport, format: SioFormat, out: *mut *mut c_char) -> SioStatus {
    guarded(|| {
        let Some(r) = report.as_ref() else {
            return fail(SioStatus::NullArgument, "report is null");
        };
        if out.is_null() {
            return fail(SioStatus::NullArgument, "out is null");
        }
        let format = match format {
            SioFormat::Csv => Format::Csv,
            SioFormat::Json => Format::Json,
        };
        let bytes = try_status!(r.0.render(format).map_err(from_error));
        match CString::new(bytes) {
            Ok(c) => {
                *out = c.into_raw();
                SioStatus::Ok
            }
            Err(_) => fail(SioStatus::Runtime, "rendered report contains a NUL byte"),
        }
    })
}

/// # Safety
/// `s` must be a string returned by this library, not yet freed. Null is ignored.
#[no_mangle]
pub unsafe extern "C" fn sio_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
