//! Remote ID broadcast messages, their binary wire format, and the
//! safety-disk sizing policies built on them.
//!
//! # Wire layout
//!
//! All integers little-endian.
//!
//! | Offset | Size | Field |
//! |-------:|-----:|-------|
//! | 0  | 16 | UAV id (opaque bytes) |
//! | 16 | 6  | timestamp, unsigned microseconds (48 bit) |
//! | 22 | 4  | position x, i32 centimeters |
//! | 26 | 4  | position y, i32 centimeters |
//! | 30 | 4  | velocity x, i32 cm/s |
//! | 34 | 4  | velocity y, i32 cm/s |
//! | 38 | 4  | control station x, i32 centimeters |
//! | 42 | 4  | control station y, i32 centimeters |
//! | 46 | 1  | flags: bit 0 emergency, bits 1-2 format code, bits 3-7 zero |
//! | 47 | 2  | localization error, u16 centimeters (candidate formats) |
//! | 49 | 2  | airframe diameter, u16 centimeters (candidate 2 only) |
//!
//! Format codes: 0 sNMAC baseline, 1 standard, 2 candidate 1, 3 candidate 2.
//! Frames are 47, 49 or 51 bytes long.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{ensure_positive, invalid};
use crate::geometry::Vec2;
use crate::separation::AF_MAX;
use crate::{Error, Result};

pub const BASE_FRAME_LEN: usize = 47;
pub const CANDIDATE1_FRAME_LEN: usize = 49;
pub const CANDIDATE2_FRAME_LEN: usize = 51;

/// Localization error bound assumed when a message carries none (m).
pub const EPS_UPPER_BOUND: f64 = 80.0;

const TIMESTAMP_MAX_US: u64 = (1 << 48) - 1;
const FLAG_EMERGENCY: u8 = 0b0000_0001;
const FORMAT_SHIFT: u8 = 1;
const FORMAT_MASK: u8 = 0b0000_0110;
const RESERVED_MASK: u8 = 0b1111_1000;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MessageFormat {
    /// No error compensation: fixed disks from the two largest airframes.
    /// A control policy, not a broadcast format.
    #[serde(rename = "snmac", alias = "snmac_baseline")]
    SnmacBaseline,
    Standard,
    Candidate1,
    Candidate2,
}

impl MessageFormat {
    pub const ALL: [MessageFormat; 4] =
        [MessageFormat::SnmacBaseline, MessageFormat::Standard, MessageFormat::Candidate1, MessageFormat::Candidate2];

    pub fn code(self) -> u8 {
        match self {
            MessageFormat::SnmacBaseline => 0,
            MessageFormat::Standard => 1,
            MessageFormat::Candidate1 => 2,
            MessageFormat::Candidate2 => 3,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.get(code as usize).copied()
    }

    pub fn carries_loc_error(self) -> bool {
        matches!(self, MessageFormat::Candidate1 | MessageFormat::Candidate2)
    }

    pub fn carries_airframe(self) -> bool {
        self == MessageFormat::Candidate2
    }

    pub fn frame_len(self) -> usize {
        match self {
            MessageFormat::SnmacBaseline | MessageFormat::Standard => BASE_FRAME_LEN,
            MessageFormat::Candidate1 => CANDIDATE1_FRAME_LEN,
            MessageFormat::Candidate2 => CANDIDATE2_FRAME_LEN,
        }
    }

    /// Policies expected to never produce a mid-air collision.
    pub fn must_be_safe(self) -> bool {
        self != MessageFormat::SnmacBaseline
    }

    pub fn name(self) -> &'static str {
        match self {
            MessageFormat::SnmacBaseline => "snmac",
            MessageFormat::Standard => "standard",
            MessageFormat::Candidate1 => "candidate1",
            MessageFormat::Candidate2 => "candidate2",
        }
    }
}

impl fmt::Display for MessageFormat {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MessageFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().replace('-', "_").as_str() {
            "snmac" | "snmac_baseline" => Ok(MessageFormat::SnmacBaseline),
            "standard" | "remote_id" | "remoteid" => Ok(MessageFormat::Standard),
            "candidate1" | "candidate_1" | "c1" => Ok(MessageFormat::Candidate1),
            "candidate2" | "candidate_2" | "c2" => Ok(MessageFormat::Candidate2),
            other => Err(invalid(format!("unknown policy `{other}`"))),
        }
    }
}

/// 16-byte opaque identifier, hex encoded in text form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub struct UavId(pub [u8; 16]);

impl UavId {
    /// Identifier for the `index`-th simulated UAV.
    pub fn from_index(index: u32) -> Self {
        let mut bytes = *b"UAV-\0\0\0\0\0\0\0\0\0\0\0\0";
        bytes[12..].copy_from_slice(&index.to_be_bytes());
        UavId(bytes)
    }
}

impl fmt::Display for UavId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl Serialize for UavId {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&hex::encode(self.0))
    }
}

impl<'de> Deserialize<'de> for UavId {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let text = String::deserialize(d)?;
        let mut bytes = [0u8; 16];
        hex::decode_to_slice(&text, &mut bytes).map_err(serde::de::Error::custom)?;
        Ok(UavId(bytes))
    }
}

/// One broadcast. `loc_error` is the reported 3-sigma bound; `airframe` the
/// reported airframe diameter.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RemoteIdMessage {
    pub uav_id: UavId,
    pub timestamp: f64,
    pub position: Vec2,
    pub velocity: Vec2,
    pub control_station: Vec2,
    pub emergency: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loc_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub airframe: Option<f64>,
}

impl RemoteIdMessage {
    /// Checks optional-field presence and ranges against `format`.
    pub fn validate(&self, format: MessageFormat) -> Result<()> {
        if self.loc_error.is_some() != format.carries_loc_error() {
            return Err(Error::MalformedMessage(format!(
                "localization error field must be {} for {format}",
                if format.carries_loc_error() { "present" } else { "absent" }
            )));
        }
        if self.airframe.is_some() != format.carries_airframe() {
            return Err(Error::MalformedMessage(format!(
                "airframe field must be {} for {format}",
                if format.carries_airframe() { "present" } else { "absent" }
            )));
        }
        if let Some(e) = self.loc_error {
            if !(e.is_finite() && e >= 0.0) {
                return Err(Error::MalformedMessage(format!("localization error {e} must be >= 0")));
            }
        }
        if let Some(a) = self.airframe {
            if !(a > 0.0 && a <= AF_MAX) {
                return Err(Error::MalformedMessage(format!("airframe {a} outside (0, {AF_MAX}]")));
            }
        }
        Ok(())
    }
}

/// Rule mapping a received message to a per-UAV safety-disk radius.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SafetyDiskPolicy {
    pub format: MessageFormat,
    #[serde(default = "default_af_max")]
    pub af_max: f64,
    #[serde(default = "default_eps_upper_bound")]
    pub eps_upper_bound: f64,
}

fn default_af_max() -> f64 {
    AF_MAX
}

fn default_eps_upper_bound() -> f64 {
    EPS_UPPER_BOUND
}

impl SafetyDiskPolicy {
    pub fn new(format: MessageFormat) -> Self {
        Self { format, af_max: AF_MAX, eps_upper_bound: EPS_UPPER_BOUND }
    }

    pub fn validate(&self) -> Result<()> {
        ensure_positive("af_max", self.af_max)?;
        ensure_positive("eps_upper_bound", self.eps_upper_bound)
    }

    /// Per-UAV disk radius. Pairwise Minkowski sums add two of these.
    ///
    /// Policies without airframe data take the sNMAC share `af_max` per UAV
    /// (15 m pairwise for 7.5 m airframes); candidate 2 uses half the reported
    /// diameter. Error and mobility terms follow the unknown-heading region.
    pub fn disk_radius(&self, msg: &RemoteIdMessage, dt: f64) -> Result<f64> {
        let mobility = msg.velocity.norm() * dt;
        let radius = match self.format {
            MessageFormat::SnmacBaseline => self.af_max,
            MessageFormat::Standard => self.af_max + self.eps_upper_bound + mobility,
            MessageFormat::Candidate1 => self.af_max + required_loc_error(msg)? + mobility,
            MessageFormat::Candidate2 => {
                let airframe = msg
                    .airframe
                    .ok_or_else(|| Error::MalformedMessage("candidate 2 policy needs an airframe field".into()))?;
                0.5 * airframe + required_loc_error(msg)? + mobility
            }
        };
        Ok(radius)
    }
}

fn required_loc_error(msg: &RemoteIdMessage) -> Result<f64> {
    msg.loc_error.ok_or_else(|| Error::MalformedMessage("policy needs a localization error field".into()))
}

/// Free-function form of [`SafetyDiskPolicy::disk_radius`].
pub fn disk_radius(policy: &SafetyDiskPolicy, msg: &RemoteIdMessage, dt: f64) -> Result<f64> {
    policy.disk_radius(msg, dt)
}

fn to_fixed_i32(value: f64, scale: f64, field: &str) -> Result<i32> {
    let scaled = (value * scale).round();
    if scaled.is_finite() && scaled >= i32::MIN as f64 && scaled <= i32::MAX as f64 {
        Ok(scaled as i32)
    } else {
        Err(Error::EncodeOverflow(format!("{field} = {value} not representable")))
    }
}

fn to_fixed_u16(value: f64, field: &str) -> Result<u16> {
    let scaled = (value * 100.0).round();
    if scaled.is_finite() && scaled >= 0.0 && scaled <= u16::MAX as f64 {
        Ok(scaled as u16)
    } else {
        Err(Error::EncodeOverflow(format!("{field} = {value} not representable")))
    }
}

/// Serialises `msg` under `format`.
pub fn encode(msg: &RemoteIdMessage, format: MessageFormat) -> Result<Vec<u8>> {
    msg.validate(format)?;
    let micros = (msg.timestamp * 1e6).round();
    if !(micros.is_finite() && micros >= 0.0 && micros <= TIMESTAMP_MAX_US as f64) {
        return Err(Error::EncodeOverflow(format!("timestamp {} not representable", msg.timestamp)));
    }
    let micros = micros as u64;

    let mut out = Vec::with_capacity(format.frame_len());
    out.extend_from_slice(&msg.uav_id.0);
    out.extend_from_slice(&micros.to_le_bytes()[..6]);
    for (value, scale, field) in [
        (msg.position.x, 100.0, "position.x"),
        (msg.position.y, 100.0, "position.y"),
        (msg.velocity.x, 100.0, "velocity.x"),
        (msg.velocity.y, 100.0, "velocity.y"),
        (msg.control_station.x, 100.0, "control_station.x"),
        (msg.control_station.y, 100.0, "control_station.y"),
    ] {
        out.extend_from_slice(&to_fixed_i32(value, scale, field)?.to_le_bytes());
    }
    let mut flags = format.code() << FORMAT_SHIFT;
    if msg.emergency {
        flags |= FLAG_EMERGENCY;
    }
    out.push(flags);
    if let Some(e) = msg.loc_error {
        out.extend_from_slice(&to_fixed_u16(e, "loc_error")?.to_le_bytes());
    }
    if let Some(a) = msg.airframe {
        out.extend_from_slice(&to_fixed_u16(a, "airframe")?.to_le_bytes());
    }
    debug_assert_eq!(out.len(), format.frame_len());
    Ok(out)
}

fn read_i32(bytes: &[u8], at: usize) -> i32 {
    i32::from_le_bytes(bytes[at..at + 4].try_into().expect("slice of 4"))
}

fn read_u16(bytes: &[u8], at: usize) -> u16 {
    u16::from_le_bytes(bytes[at..at + 2].try_into().expect("slice of 2"))
}

/// Parses one frame.
pub fn decode(bytes: &[u8]) -> Result<(RemoteIdMessage, MessageFormat)> {
    if !matches!(bytes.len(), BASE_FRAME_LEN | CANDIDATE1_FRAME_LEN | CANDIDATE2_FRAME_LEN) {
        return Err(Error::MalformedMessage(format!("bad frame length {}", bytes.len())));
    }
    let flags = bytes[46];
    if flags & RESERVED_MASK != 0 {
        return Err(Error::MalformedMessage(format!("reserved flag bits set: {flags:#010b}")));
    }
    let format =
        MessageFormat::from_code((flags & FORMAT_MASK) >> FORMAT_SHIFT).expect("two-bit code always maps to a format");
    if format.frame_len() != bytes.len() {
        return Err(Error::MalformedMessage(format!(
            "{format} frame must be {} bytes, got {}",
            format.frame_len(),
            bytes.len()
        )));
    }

    let mut id = [0u8; 16];
    id.copy_from_slice(&bytes[..16]);
    let mut ts = [0u8; 8];
    ts[..6].copy_from_slice(&bytes[16..22]);
    let micros = u64::from_le_bytes(ts);
    let cm = |at: usize| read_i32(bytes, at) as f64 / 100.0;

    let loc_error = format.carries_loc_error().then(|| read_u16(bytes, 47) as f64 / 100.0);
    let airframe = if format.carries_airframe() {
        let raw = read_u16(bytes, 49);
        if raw == 0 || raw as f64 > AF_MAX * 100.0 {
            return Err(Error::MalformedMessage(format!("airframe {raw} cm outside (0, 750]")));
        }
        Some(raw as f64 / 100.0)
    } else {
        None
    };

    let msg = RemoteIdMessage {
        uav_id: UavId(id),
        timestamp: micros as f64 / 1e6,
        position: Vec2::new(cm(22), cm(26)),
        velocity: Vec2::new(cm(30), cm(34)),
        control_station: Vec2::new(cm(38), cm(42)),
        emergency: flags & FLAG_EMERGENCY != 0,
        loc_error,
        airframe,
    };
    Ok((msg, format))
}

#[derive(Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JsonFrame {
    format: MessageFormat,
    uav_id: UavId,
    timestamp: f64,
    position: Vec2,
    velocity: Vec2,
    control_station: Vec2,
    emergency: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    loc_error: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    airframe: Option<f64>,
}

/// One-line JSON rendering used in logs and fixtures; same field names as
/// [`RemoteIdMessage`] plus `format`.
pub fn to_json_line(msg: &RemoteIdMessage, format: MessageFormat) -> Result<String> {
    msg.validate(format)?;
    let frame = JsonFrame {
        format,
        uav_id: msg.uav_id,
        timestamp: msg.timestamp,
        position: msg.position,
        velocity: msg.velocity,
        control_station: msg.control_station,
        emergency: msg.emergency,
        loc_error: msg.loc_error,
        airframe: msg.airframe,
    };
    Ok(serde_json::to_string(&frame)?)
}

pub fn from_json_line(line: &str) -> Result<(RemoteIdMessage, MessageFormat)> {
    let f: JsonFrame = serde_json::from_str(line).map_err(|e| Error::MalformedMessage(e.to_string()))?;
    let msg = RemoteIdMessage {
        uav_id: f.uav_id,
        timestamp: f.timestamp,
        position: f.position,
        velocity: f.velocity,
        control_station: f.control_station,
        emergency: f.emergency,
        loc_error: f.loc_error,
        airframe: f.airframe,
    };
    msg.validate(f.format)?;
    Ok((msg, f.format))
}
