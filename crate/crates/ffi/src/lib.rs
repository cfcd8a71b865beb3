//! C interface to the simulator.
//!
//! Handles are opaque and owned by the caller, who releases them with the
//! matching `_free` function. Every fallible call returns an [`IcnrStatus`];
//! on failure a description is available from [`icnr_last_error_message`]
//! until the next failing call on the same thread. Enumerations cross the
//! boundary as `uint32_t` so that out-of-range values are reported rather
//! than trusted.

use std::cell::RefCell;
use std::ffi::{c_char, CStr, CString};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use icnr_core::config::{key_names, parse_config, parse_config_str, to_config_text};
use icnr_core::report::{to_csv, to_json};
use icnr_core::{
    emit_report, fingerprint, run_experiment, Error, IntegrationLevel, Metric, MetricsReport,
    OutputFormat, ScenarioConfig,
};

/// Scenario parameters.
pub struct IcnrConfig(ScenarioConfig);

/// Summarized results of an experiment.
pub struct IcnrReport(MetricsReport);

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcnrStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidArgument = 2,
    Validation = 3,
    Parse = 4,
    Io = 5,
    Numerical = 6,
    NotFound = 7,
    Panic = 8,
}

#[repr(C)]
pub enum IcnrLevel {
    Traditional = 0,
    FunctionLevel = 1,
    SignalLevel = 2,
}

#[repr(C)]
pub enum IcnrMetric {
    OutageProbability = 0,
    ErgodicCapacity = 1,
    PositioningError = 2,
    TimingError = 3,
    NavAvailability = 4,
    RangeResolution = 5,
    Aoi = 6,
}

#[repr(C)]
pub enum IcnrFormat {
    Csv = 0,
    Json = 1,
    Svg = 2,
    All = 3,
}

/// One metric of one level. Fields are NaN when the metric had no samples.
#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct IcnrMetricSummary {
    pub samples: u64,
    pub mean: f64,
    pub std_error: f64,
    pub ci_low: f64,
    pub ci_high: f64,
}

thread_local! {
    static LAST_ERROR: RefCell<Option<CString>> = const { RefCell::new(None) };
}

fn set_error(message: impl Into<String>) {
    let text = message.into().replace('\0', " ");
    LAST_ERROR.with(|e| *e.borrow_mut() = CString::new(text).ok());
}

struct Failure(IcnrStatus, String);

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let status = match &e {
            Error::InvalidParameter { .. } => IcnrStatus::InvalidArgument,
            Error::Validation { .. } => IcnrStatus::Validation,
            Error::Parse { .. } => IcnrStatus::Parse,
            Error::Io { .. } => IcnrStatus::Io,
            Error::DegenerateGeometry(_)
            | Error::DegenerateView(_)
            | Error::InsufficientAnchors { .. }
            | Error::SingularGeometry { .. } => IcnrStatus::Numerical,
        };
        Failure(status, e.to_string())
    }
}

fn fail<T>(status: IcnrStatus, message: impl Into<String>) -> Result<T, Failure> {
    Err(Failure(status, message.into()))
}

/// Run `body`, recording any error or panic.
fn guard(body: impl FnOnce() -> Result<(), Failure>) -> IcnrStatus {
    match catch_unwind(AssertUnwindSafe(body)) {
        Ok(Ok(())) => IcnrStatus::Ok,
        Ok(Err(Failure(status, message))) => {
            set_error(message);
            status
        }
        Err(payload) => {
            let what = payload
                .downcast_ref::<&str>()
                .map(|s| s.to_string())
                .or_else(|| payload.downcast_ref::<String>().cloned())
                .unwrap_or_else(|| "unknown panic".into());
            set_error(format!("internal error: {what}"));
            IcnrStatus::Panic
        }
    }
}

unsafe fn text<'a>(p: *const c_char, name: &str) -> Result<&'a str, Failure> {
    if p.is_null() {
        return fail(IcnrStatus::NullPointer, format!("`{name}` is null"));
    }
    CStr::from_ptr(p).to_str().or_else(|_| {
        fail(
            IcnrStatus::InvalidArgument,
            format!("`{name}` is not UTF-8"),
        )
    })
}

unsafe fn borrow<'a, T>(p: *const T, name: &str) -> Result<&'a T, Failure> {
    p.as_ref()
        .ok_or_else(|| Failure(IcnrStatus::NullPointer, format!("`{name}` is null")))
}

unsafe fn out_ptr<'a, T>(p: *mut T, name: &str) -> Result<&'a mut T, Failure> {
    p.as_mut()
        .ok_or_else(|| Failure(IcnrStatus::NullPointer, format!("`{name}` is null")))
}

fn level(code: u32) -> Result<IntegrationLevel, Failure> {
    IntegrationLevel::ALL
        .get(code as usize)
        .copied()
        .ok_or_else(|| Failure(IcnrStatus::InvalidArgument, format!("unknown level {code}")))
}

fn metric(code: u32) -> Result<Metric, Failure> {
    Metric::ALL.get(code as usize).copied().ok_or_else(|| {
        Failure(
            IcnrStatus::InvalidArgument,
            format!("unknown metric {code}"),
        )
    })
}

fn format(code: u32) -> Result<OutputFormat, Failure> {
    Ok(match code {
        0 => OutputFormat::Csv,
        1 => OutputFormat::Json,
        2 => OutputFormat::Svg,
        3 => OutputFormat::All,
        _ => {
            return fail(
                IcnrStatus::InvalidArgument,
                format!("unknown format {code}"),
            )
        }
    })
}

fn into_c_string(s: String) -> *mut c_char {
    CString::new(s).map_or(ptr::null_mut(), CString::into_raw)
}

/// Description of the last failure on this thread, or null if none. The
/// pointer stays valid until the next failing call on the same thread.
#[no_mangle]
pub extern "C" fn icnr_last_error_message() -> *const c_char {
    LAST_ERROR.with(|e| e.borrow().as_ref().map_or(ptr::null(), |s| s.as_ptr()))
}

/// Default scenario. Never null.
#[no_mangle]
pub extern "C" fn icnr_config_default() -> *mut IcnrConfig {
    Box::into_raw(Box::new(IcnrConfig(ScenarioConfig::default())))
}

/// Parse a configuration file.
///
/// # Safety
/// `path` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icnr_config_from_file(
    path: *const c_char,
    out: *mut *mut IcnrConfig,
) -> IcnrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let config = parse_config(Path::new(text(path, "path")?))?;
        *out = Box::into_raw(Box::new(IcnrConfig(config)));
        Ok(())
    })
}

/// Parse configuration text in the file format.
///
/// # Safety
/// `source` must be a NUL-terminated string and `out` writable.
#[no_mangle]
pub unsafe extern "C" fn icnr_config_from_str(
    source: *const c_char,
    out: *mut *mut IcnrConfig,
) -> IcnrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let config = parse_config_str(text(source, "source")?)?;
        *out = Box::into_raw(Box::new(IcnrConfig(config)));
        Ok(())
    })
}

/// Set one key as it would be written in a configuration file, units
/// included. The handle is unchanged on failure.
///
/// # Safety
/// `config` must come from this library; `key` and `value` must be
/// NUL-terminated strings.
#[no_mangle]
pub unsafe extern "C" fn icnr_config_set(
    config: *mut IcnrConfig,
    key: *const c_char,
    value: *const c_char,
) -> IcnrStatus {
    guard(|| {
        let config = out_ptr(config, "config")?;
        let key = text(key, "key")?.trim();
        let value = text(value, "value")?;
        if !key_names().any(|k| k == key) {
            return fail(IcnrStatus::InvalidArgument, format!("unknown key `{key}`"));
        }
        if value.contains('\n') {
            return fail(IcnrStatus::InvalidArgument, "value spans several lines");
        }
        let mut source: String = to_config_text(&config.0)
            .lines()
            .filter(|l| l.split('=').next().map(str::trim) != Some(key))
            .map(|l| format!("{l}\n"))
            .collect();
        source.push_str(&format!("{key} = {value}\n"));
        config.0 = parse_config_str(&source)?;
        Ok(())
    })
}

/// SHA-256 fingerprint of the configuration as 64 hex digits. Release with
/// [`icnr_string_free`].
///
/// # Safety
/// `config` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn icnr_config_fingerprint(
    config: *const IcnrConfig,
    out: *mut *mut c_char,
) -> IcnrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = into_c_string(fingerprint(&borrow(config, "config")?.0));
        Ok(())
    })
}

/// # Safety
/// `config` must be null or come from this library, and not be used after.
#[no_mangle]
pub unsafe extern "C" fn icnr_config_free(config: *mut IcnrConfig) {
    if !config.is_null() {
        drop(Box::from_raw(config));
    }
}

/// Run `trials` paired trials of the listed levels (`IcnrLevel` values).
/// Trials run on the global thread pool; results do not depend on its size.
///
/// # Safety
/// `config` must come from this library, `levels` must point to
/// `level_count` values and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn icnr_run_experiment(
    config: *const IcnrConfig,
    levels: *const u32,
    level_count: usize,
    trials: u64,
    master_seed: u64,
    out: *mut *mut IcnrReport,
) -> IcnrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = ptr::null_mut();
        let config = borrow(config, "config")?;
        let codes = if level_count == 0 {
            &[][..]
        } else if levels.is_null() {
            return fail(IcnrStatus::NullPointer, "`levels` is null");
        } else {
            std::slice::from_raw_parts(levels, level_count)
        };
        let levels: Vec<IntegrationLevel> =
            codes.iter().map(|&c| level(c)).collect::<Result<_, _>>()?;
        let report = run_experiment(&levels, &config.0, trials, master_seed)?;
        *out = Box::into_raw(Box::new(IcnrReport(report)));
        Ok(())
    })
}

/// Number of trials behind the report.
///
/// # Safety
/// `report` must come from this library.
#[no_mangle]
pub unsafe extern "C" fn icnr_report_trials(report: *const IcnrReport) -> u64 {
    report.as_ref().map_or(0, |r| r.0.trials)
}

/// Summary of `metric` (an `IcnrMetric`) at `level` (an `IcnrLevel`).
/// Returns `ICNR_STATUS_NOT_FOUND` when the level was not run.
///
/// # Safety
/// `report` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn icnr_report_metric(
    report: *const IcnrReport,
    level_code: u32,
    metric_code: u32,
    out: *mut IcnrMetricSummary,
) -> IcnrStatus {
    guard(|| {
        let report = borrow(report, "report")?;
        let out = out_ptr(out, "out")?;
        let (l, m) = (level(level_code)?, metric(metric_code)?);
        let Some(lr) = report.0.level(l) else {
            return fail(
                IcnrStatus::NotFound,
                format!("level `{l}` is not in the report"),
            );
        };
        let s = lr.get(m);
        *out = IcnrMetricSummary {
            samples: s.samples,
            mean: s.mean,
            std_error: s.stderr,
            ci_low: s.ci_low,
            ci_high: s.ci_high,
        };
        Ok(())
    })
}

/// Write the report files selected by `format_code` (an `IcnrFormat`) into
/// `out_dir`, creating it if needed.
///
/// # Safety
/// `report` must come from this library; `out_dir` must be a NUL-terminated
/// string.
#[no_mangle]
pub unsafe extern "C" fn icnr_report_write(
    report: *const IcnrReport,
    format_code: u32,
    out_dir: *const c_char,
) -> IcnrStatus {
    guard(|| {
        let report = borrow(report, "report")?;
        let format = format(format_code)?;
        emit_report(&report.0, format, Path::new(text(out_dir, "out_dir")?))?;
        Ok(())
    })
}

/// The CSV report as a string. Release with [`icnr_string_free`].
///
/// # Safety
/// `report` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn icnr_report_csv(
    report: *const IcnrReport,
    out: *mut *mut c_char,
) -> IcnrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = into_c_string(to_csv(&borrow(report, "report")?.0));
        Ok(())
    })
}

/// The JSON report as a string. Release with [`icnr_string_free`].
///
/// # Safety
/// `report` must come from this library and `out` be writable.
#[no_mangle]
pub unsafe extern "C" fn icnr_report_json(
    report: *const IcnrReport,
    out: *mut *mut c_char,
) -> IcnrStatus {
    guard(|| {
        let out = out_ptr(out, "out")?;
        *out = into_c_string(to_json(&borrow(report, "report")?.0));
        Ok(())
    })
}

/// # Safety
/// `report` must be null or come from this library, and not be used after.
#[no_mangle]
pub unsafe extern "C" fn icnr_report_free(report: *mut IcnrReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}

/// # Safety
/// `s` must be null or a string returned by this library.
#[no_mangle]
pub unsafe extern "C" fn icnr_string_free(s: *mut c_char) {
    if !s.is_null() {
        drop(CString::from_raw(s));
    }
}
