//! C ABI over `rid_rvo`.
//!
//! Conventions:
//! - every fallible call returns a [`RidStatus`]; outputs go through pointers;
//! - on failure a message is kept per thread, see [`rid_last_error`];
//! - experiments and reports are opaque handles released with their `_free`.
//!
//! Panics never cross the boundary; they surface as `RID_STATUS_INTERNAL`.

use std::cell::RefCell;
use std::ffi::{c_char, CStr};
use std::panic::{catch_unwind, AssertUnwindSafe};
use std::path::Path;
use std::ptr;

use rid_rvo::config::ExperimentConfig;
use rid_rvo::remoteid::{self, MessageFormat, RemoteIdMessage, SafetyDiskPolicy, UavId};
use rid_rvo::report::RunReport;
use rid_rvo::separation;
use rid_rvo::sim::run_monte_carlo;
use rid_rvo::{Error, Vec2};

#[repr(C)]
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RidStatus {
    Ok = 0,
    NullPointer = 1,
    InvalidParameter = 2,
    MalformedMessage = 3,
    EncodeOverflow = 4,
    InvalidConfig = 5,
    Io = 6,
    BufferTooSmall = 7,
    Internal = 8,
}

/// Policy / message format codes, matching the wire format field.
pub const RID_FORMAT_SNMAC: u8 = 0;
pub const RID_FORMAT_STANDARD: u8 = 1;
pub const RID_FORMAT_CANDIDATE1: u8 = 2;
pub const RID_FORMAT_CANDIDATE2: u8 = 3;
/// Largest encoded frame, bytes.
pub const RID_MAX_FRAME_LEN: usize = 51;

thread_local! {
    static LAST_ERROR: RefCell<String> = const { RefCell::new(String::new()) };
}

fn set_last_error(msg: String) {
    LAST_ERROR.with(|e| *e.borrow_mut() = msg);
}

fn status_of(err: &Error) -> RidStatus {
    match err {
        Error::InvalidParameter(_) | Error::DegenerateGeometry(_) => RidStatus::InvalidParameter,
        Error::MalformedMessage(_) => RidStatus::MalformedMessage,
        Error::EncodeOverflow(_) => RidStatus::EncodeOverflow,
        Error::InvalidConfig(_) => RidStatus::InvalidConfig,
        Error::Io(_) | Error::Csv(_) | Error::Json(_) => RidStatus::Io,
    }
}

fn fail(status: RidStatus, msg: impl Into<String>) -> RidStatus {
    set_last_error(msg.into());
    status
}

/// Runs `f`, converting errors and panics into status codes.
fn guard(f: impl FnOnce() -> Result<(), RidStatus>) -> RidStatus {
    match catch_unwind(AssertUnwindSafe(f)) {
        Ok(Ok(())) => {
            set_last_error(String::new());
            RidStatus::Ok
        }
        Ok(Err(status)) => status,
        Err(_) => fail(RidStatus::Internal, "internal panic"),
    }
}

trait OrStatus<T> {
    fn or_status(self) -> Result<T, RidStatus>;
}

impl<T> OrStatus<T> for rid_rvo::Result<T> {
    fn or_status(self) -> Result<T, RidStatus> {
        self.map_err(|e| fail(status_of(&e), e.to_string()))
    }
}

fn non_null<T>(p: *const T, name: &str) -> Result<(), RidStatus> {
    if p.is_null() {
        Err(fail(RidStatus::NullPointer, format!("{name} is null")))
    } else {
        Ok(())
    }
}

fn format_from_code(code: u8) -> Result<MessageFormat, RidStatus> {
    MessageFormat::from_code(code)
        .ok_or_else(|| fail(RidStatus::InvalidParameter, format!("unknown format code {code}")))
}

/// Copies the calling thread's last error message into `buf` (NUL
/// terminated, truncated to `len`). Returns the full message length in bytes,
/// excluding the terminator; 0 means no error.
///
/// # Safety
/// `buf` must be null or point to `len` writable bytes.
#[no_mangle]
pub unsafe extern "C" fn rid_last_error(buf: *mut c_char, len: usize) -> usize {
    LAST_ERROR.with(|e| {
        let msg = e.borrow();
        if !buf.is_null() && len > 0 {
            let n = msg.len().min(len - 1);
            ptr::copy_nonoverlapping(msg.as_ptr(), buf as *mut u8, n);
            *buf.add(n) = 0;
        }
        msg.len()
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RidSeparation {
    pub mac_radius: f64,
    pub loc_term: f64,
    pub mobility_term: f64,
    pub unmac_radius: f64,
}

/// Pairwise MAC / uNMAC radii in meters.
///
/// # Safety
/// `out` must point to a writable `RidSeparation`.
#[no_mangle]
pub unsafe extern "C" fn rid_pairwise_unmac(
    airframe_i: f64,
    airframe_j: f64,
    eps_i: f64,
    eps_j: f64,
    speed_i: f64,
    speed_j: f64,
    dt: f64,
    out: *mut RidSeparation,
) -> RidStatus {
    guard(|| {
        non_null(out, "out")?;
        let b = separation::pairwise_unmac_from_airframes(airframe_i, airframe_j, eps_i, eps_j, speed_i, speed_j, dt)
            .or_status()?;
        *out = RidSeparation {
            mac_radius: b.mac_radius,
            loc_term: b.loc_term,
            mobility_term: b.mobility_term,
            unmac_radius: b.unmac_radius,
        };
        Ok(())
    })
}

/// `p`-quantile of the sum of two half-normal localization errors.
///
/// # Safety
/// `out` must point to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn rid_loc_error_sum_quantile(p: f64, sigma_i: f64, sigma_j: f64, out: *mut f64) -> RidStatus {
    guard(|| {
        non_null(out, "out")?;
        *out = separation::loc_error_sum_quantile(p, sigma_i, sigma_j).or_status()?;
        Ok(())
    })
}

/// Flat message record. Optional fields are present when their `has_` flag
/// is non-zero.
#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RidMessage {
    pub uav_id: [u8; 16],
    /// Seconds.
    pub timestamp: f64,
    pub position_x: f64,
    pub position_y: f64,
    pub velocity_x: f64,
    pub velocity_y: f64,
    pub control_station_x: f64,
    pub control_station_y: f64,
    pub emergency: u8,
    pub has_loc_error: u8,
    pub has_airframe: u8,
    pub loc_error: f64,
    pub airframe: f64,
}

impl From<&RidMessage> for RemoteIdMessage {
    fn from(m: &RidMessage) -> Self {
        RemoteIdMessage {
            uav_id: UavId(m.uav_id),
            timestamp: m.timestamp,
            position: Vec2::new(m.position_x, m.position_y),
            velocity: Vec2::new(m.velocity_x, m.velocity_y),
            control_station: Vec2::new(m.control_station_x, m.control_station_y),
            emergency: m.emergency != 0,
            loc_error: (m.has_loc_error != 0).then_some(m.loc_error),
            airframe: (m.has_airframe != 0).then_some(m.airframe),
        }
    }
}

impl From<&RemoteIdMessage> for RidMessage {
    fn from(m: &RemoteIdMessage) -> Self {
        RidMessage {
            uav_id: m.uav_id.0,
            timestamp: m.timestamp,
            position_x: m.position.x,
            position_y: m.position.y,
            velocity_x: m.velocity.x,
            velocity_y: m.velocity.y,
            control_station_x: m.control_station.x,
            control_station_y: m.control_station.y,
            emergency: m.emergency as u8,
            has_loc_error: m.loc_error.is_some() as u8,
            has_airframe: m.airframe.is_some() as u8,
            loc_error: m.loc_error.unwrap_or(0.0),
            airframe: m.airframe.unwrap_or(0.0),
        }
    }
}

/// Per-UAV safety-disk radius in meters under policy `format`, with the
/// default 7.5 m maximum airframe and 80 m error bound.
///
/// # Safety
/// `msg` must point to a valid `RidMessage`, `out` to a writable `double`.
#[no_mangle]
pub unsafe extern "C" fn rid_disk_radius(format: u8, msg: *const RidMessage, dt: f64, out: *mut f64) -> RidStatus {
    guard(|| {
        non_null(msg, "msg")?;
        non_null(out, "out")?;
        let policy = SafetyDiskPolicy::new(format_from_code(format)?);
        *out = remoteid::disk_radius(&policy, &RemoteIdMessage::from(&*msg), dt).or_status()?;
        Ok(())
    })
}

/// Encodes `msg` in `format` into `buf`; `written` receives the frame length.
/// `RID_STATUS_BUFFER_TOO_SMALL` leaves the required length in `written`.
///
/// # Safety
/// `msg` must be valid, `buf` must hold `len` writable bytes, `written` must
/// be writable.
#[no_mangle]
pub unsafe extern "C" fn rid_encode(
    format: u8,
    msg: *const RidMessage,
    buf: *mut u8,
    len: usize,
    written: *mut usize,
) -> RidStatus {
    guard(|| {
        non_null(msg, "msg")?;
        non_null(written, "written")?;
        let frame = remoteid::encode(&RemoteIdMessage::from(&*msg), format_from_code(format)?).or_status()?;
        *written = frame.len();
        if buf.is_null() || len < frame.len() {
            return Err(fail(
                RidStatus::BufferTooSmall,
                format!("frame needs {} bytes, buffer has {len}", frame.len()),
            ));
        }
        ptr::copy_nonoverlapping(frame.as_ptr(), buf, frame.len());
        Ok(())
    })
}

/// Decodes one frame. `format` receives the format code.
///
/// # Safety
/// `buf` must point to `len` readable bytes; `out` and `format` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rid_decode(buf: *const u8, len: usize, out: *mut RidMessage, format: *mut u8) -> RidStatus {
    guard(|| {
        non_null(buf, "buf")?;
        non_null(out, "out")?;
        non_null(format, "format")?;
        let (msg, f) = remoteid::decode(std::slice::from_raw_parts(buf, len)).or_status()?;
        *out = RidMessage::from(&msg);
        *format = f.code();
        Ok(())
    })
}

/// Opaque experiment configuration.
pub struct RidExperiment {
    config: ExperimentConfig,
}

/// Opaque simulation report.
pub struct RidReport {
    report: RunReport,
}

unsafe fn c_str<'a>(s: *const c_char, name: &str) -> Result<&'a str, RidStatus> {
    non_null(s, name)?;
    CStr::from_ptr(s).to_str().map_err(|_| fail(RidStatus::InvalidParameter, format!("{name} is not UTF-8")))
}

/// Parses an experiment from TOML text.
///
/// # Safety
/// `toml` must be a NUL-terminated string; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rid_experiment_from_toml(toml: *const c_char, out: *mut *mut RidExperiment) -> RidStatus {
    guard(|| {
        non_null(out, "out")?;
        let config = ExperimentConfig::from_toml_str(c_str(toml, "toml")?).or_status()?;
        *out = Box::into_raw(Box::new(RidExperiment { config }));
        Ok(())
    })
}

/// Overrides the run count per policy.
///
/// # Safety
/// `exp` must be a live handle.
#[no_mangle]
pub unsafe extern "C" fn rid_experiment_set_runs(exp: *mut RidExperiment, runs: usize) -> RidStatus {
    guard(|| {
        non_null(exp, "exp")?;
        if runs == 0 {
            return Err(fail(RidStatus::InvalidConfig, "runs must be at least 1"));
        }
        (*exp).config.runs = runs;
        Ok(())
    })
}

/// Releases an experiment; null is ignored.
///
/// # Safety
/// `exp` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rid_experiment_free(exp: *mut RidExperiment) {
    if !exp.is_null() {
        drop(Box::from_raw(exp));
    }
}

/// Runs every policy of the experiment.
///
/// # Safety
/// `exp` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rid_experiment_run(exp: *const RidExperiment, out: *mut *mut RidReport) -> RidStatus {
    guard(|| {
        non_null(exp, "exp")?;
        non_null(out, "out")?;
        let cfg = &(*exp).config;
        let results = cfg
            .policies
            .iter()
            .map(|&p| run_monte_carlo(&cfg.scenario_for(p), cfg.runs))
            .collect::<rid_rvo::Result<Vec<_>>>()
            .or_status()?;
        let report = RunReport::new(cfg, &results).or_status()?;
        *out = Box::into_raw(Box::new(RidReport { report }));
        Ok(())
    })
}

#[repr(C)]
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct RidPolicySummary {
    pub format: u8,
    pub runs: usize,
    pub flights: usize,
    pub arrived: usize,
    pub collided: usize,
    pub stalled: usize,
    pub mac_count: usize,
    pub mac_rate: f64,
    /// NaN when no flight arrived.
    pub median_time: f64,
    pub mean_time: f64,
    pub p95_time: f64,
}

/// Number of policy summaries in the report.
///
/// # Safety
/// `report` must be null or a live handle.
#[no_mangle]
pub unsafe extern "C" fn rid_report_policy_count(report: *const RidReport) -> usize {
    if report.is_null() {
        0
    } else {
        (&*report).report.summaries.len()
    }
}

/// Copies summary `index` into `out`.
///
/// # Safety
/// `report` must be a live handle; `out` must be writable.
#[no_mangle]
pub unsafe extern "C" fn rid_report_summary(
    report: *const RidReport,
    index: usize,
    out: *mut RidPolicySummary,
) -> RidStatus {
    guard(|| {
        non_null(report, "report")?;
        non_null(out, "out")?;
        let s = (&*report)
            .report
            .summaries
            .get(index)
            .ok_or_else(|| fail(RidStatus::InvalidParameter, format!("no summary at index {index}")))?;
        let nan = |x: Option<f64>| x.unwrap_or(f64::NAN);
        *out = RidPolicySummary {
            format: s.policy.code(),
            runs: s.runs,
            flights: s.flights,
            arrived: s.arrived,
            collided: s.collided,
            stalled: s.stalled,
            mac_count: s.mac_count,
            mac_rate: s.mac_rate,
            median_time: nan(s.median_time),
            mean_time: nan(s.mean_time),
            p95_time: nan(s.p95_time),
        };
        Ok(())
    })
}

/// Writes `report.json` and `runs.csv` into directory `dir` (created if missing).
///
/// # Safety
/// `report` must be a live handle; `dir` a NUL-terminated path.
#[no_mangle]
pub unsafe extern "C" fn rid_report_write(report: *const RidReport, dir: *const c_char) -> RidStatus {
    guard(|| {
        non_null(report, "report")?;
        let dir = Path::new(c_str(dir, "dir")?);
        let io = |e: std::io::Error| fail(RidStatus::Io, format!("{}: {e}", dir.display()));
        std::fs::create_dir_all(dir).map_err(io)?;
        let r = &(&*report).report;
        r.write_json(&dir.join("report.json")).or_status()?;
        r.write_runs_csv_file(&dir.join("runs.csv")).or_status()?;
        Ok(())
    })
}

/// Releases a report; null is ignored.
///
/// # Safety
/// `report` must be null or a handle not yet freed.
#[no_mangle]
pub unsafe extern "C" fn rid_report_free(report: *mut RidReport) {
    if !report.is_null() {
        drop(Box::from_raw(report));
    }
}
