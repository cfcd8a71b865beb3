//! Flat `key = value` scenario files.
//!
//! One assignment per line; `#` starts a comment; blank lines are ignored.
//! A numeric value may carry a unit suffix, either separated by whitespace
//! (`250 MHz`) or attached (`0.25GHz`); it is converted to the unit named by
//! the key. Unknown and repeated keys are rejected. Keys not present keep
//! their case-study defaults.

use std::fmt::Write as _;
use std::path::Path;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};
use crate::geometry::{cap_half_angle, GpsLayout};
use crate::navigation::BandwidthScaling;
use crate::rng::RngAlgorithm;
use crate::scenario::ScenarioConfig;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Unit {
    None,
    Mhz,
    Watt,
    Km,
    Meter,
    Km2,
    Kmh,
    Deg,
    Db,
    DbmHz,
    Mbps,
    Gbit,
    Byte,
    BpsPerHz,
    Km3S2,
    MeterPerSecond,
}

impl Unit {
    /// Accepted suffixes and their factor to the key's unit.
    fn suffixes(self) -> &'static [(&'static str, f64)] {
        match self {
            Unit::None => &[],
            Unit::Mhz => &[("Hz", 1e-6), ("kHz", 1e-3), ("MHz", 1.0), ("GHz", 1e3)],
            Unit::Watt => &[("mW", 1e-3), ("W", 1.0), ("kW", 1e3)],
            Unit::Km => &[("m", 1e-3), ("km", 1.0)],
            Unit::Meter => &[("mm", 1e-3), ("cm", 1e-2), ("m", 1.0), ("km", 1e3)],
            Unit::Km2 => &[("m2", 1e-6), ("km2", 1.0)],
            Unit::Kmh => &[("km/h", 1.0), ("m/s", 3.6)],
            Unit::Deg => &[("deg", 1.0)],
            Unit::Db => &[("dB", 1.0)],
            Unit::DbmHz => &[("dBm/Hz", 1.0)],
            Unit::Mbps => &[("bps", 1e-6), ("kbps", 1e-3), ("Mbps", 1.0), ("Gbps", 1e3)],
            Unit::Gbit => &[
                ("bit", 1e-9),
                ("kbit", 1e-6),
                ("Mbit", 1e-3),
                ("Gbit", 1.0),
                ("Tbit", 1e3),
            ],
            Unit::Byte => &[("B", 1.0)],
            Unit::BpsPerHz => &[("bps/Hz", 1.0)],
            Unit::Km3S2 => &[("km3/s2", 1.0)],
            Unit::MeterPerSecond => &[("m/s", 1.0), ("km/s", 1e3)],
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Bound {
    Any,
    Positive,
    NonNegative,
    AtLeast(u64),
    /// `[lo, hi)`
    HalfOpen(f64, f64),
    /// `(lo, hi]`
    OpenClosed(f64, f64),
}

impl Bound {
    fn describe(self) -> String {
        match self {
            Bound::Any => "a finite number".into(),
            Bound::Positive => "> 0".into(),
            Bound::NonNegative => ">= 0".into(),
            Bound::AtLeast(n) => format!(">= {n}"),
            Bound::HalfOpen(lo, hi) => format!("in [{lo}, {hi})"),
            Bound::OpenClosed(lo, hi) => format!("in ({lo}, {hi}]"),
        }
    }

    fn holds(self, v: f64) -> bool {
        v.is_finite()
            && match self {
                Bound::Any => true,
                Bound::Positive => v > 0.0,
                Bound::NonNegative => v >= 0.0,
                Bound::AtLeast(n) => v >= n as f64,
                Bound::HalfOpen(lo, hi) => v >= lo && v < hi,
                Bound::OpenClosed(lo, hi) => v > lo && v <= hi,
            }
    }
}

#[derive(Debug, Clone, PartialEq)]
enum Value {
    Count(u64),
    Real(f64),
    Flag(bool),
    Word(String),
}

impl Value {
    fn numeric(&self) -> Option<f64> {
        match self {
            Value::Count(n) => Some(*n as f64),
            Value::Real(x) => Some(*x),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy)]
enum Kind {
    Count,
    Real,
    Flag,
    Word(&'static [&'static str]),
}

struct Key {
    name: &'static str,
    kind: Kind,
    unit: Unit,
    bound: Bound,
    get: fn(&ScenarioConfig) -> Value,
    set: fn(&mut ScenarioConfig, Value),
}

macro_rules! real_key {
    ($name:literal, $unit:expr, $bound:expr, |$c:ident| $field:expr) => {
        Key {
            name: $name,
            kind: Kind::Real,
            unit: $unit,
            bound: $bound,
            get: |$c| Value::Real($field),
            set: |$c, v| {
                if let Value::Real(x) = v {
                    $field = x;
                }
            },
        }
    };
}

macro_rules! count_key {
    ($name:literal, $unit:expr, $bound:expr, |$c:ident| $field:expr, $ty:ty) => {
        Key {
            name: $name,
            kind: Kind::Count,
            unit: $unit,
            bound: $bound,
            get: |$c| Value::Count($field as u64),
            set: |$c, v| {
                if let Value::Count(n) = v {
                    $field = n as $ty;
                }
            },
        }
    };
}

const LAYOUTS: &[&str] = &["uniform", "walker"];
const SCALINGS: &[&str] = &["off", "linear", "sqrt"];
const GENERATORS: &[&str] = &["chacha8", "chacha20"];

static KEYS: &[Key] = &[
    count_key!(
        "comm_satellites",
        Unit::None,
        Bound::NonNegative,
        |c| c.comm_satellites,
        u64
    ),
    count_key!(
        "nav_satellites",
        Unit::None,
        Bound::NonNegative,
        |c| c.nav_satellites,
        u64
    ),
    count_key!(
        "sensing_satellites",
        Unit::None,
        Bound::AtLeast(1),
        |c| c.sensing_satellites,
        u64
    ),
    real_key!("comm_bandwidth_mhz", Unit::Mhz, Bound::Positive, |c| c
        .comm_bandwidth_mhz),
    real_key!("nav_bandwidth_mhz", Unit::Mhz, Bound::Positive, |c| c
        .nav_bandwidth_mhz),
    real_key!("sensing_bandwidth_mhz", Unit::Mhz, Bound::Positive, |c| c
        .sensing_bandwidth_mhz),
    real_key!("comm_tx_power_w", Unit::Watt, Bound::Positive, |c| c
        .comm_tx_power_w),
    real_key!("nav_tx_power_w", Unit::Watt, Bound::Positive, |c| c
        .nav_tx_power_w),
    real_key!("sensing_tx_power_w", Unit::Watt, Bound::Positive, |c| c
        .sensing_tx_power_w),
    real_key!("altitude_km", Unit::Km, Bound::Positive, |c| c.altitude_km),
    count_key!(
        "vehicle_count",
        Unit::None,
        Bound::AtLeast(1),
        |c| c.vehicle_count,
        u64
    ),
    real_key!("cap_area_km2", Unit::Km2, Bound::Positive, |c| c
        .cap_area_km2),
    real_key!("max_speed_kmh", Unit::Kmh, Bound::Positive, |c| c
        .max_speed_kmh),
    real_key!("report_spacing_m", Unit::Meter, Bound::Positive, |c| c
        .report_spacing_m),
    count_key!(
        "perception_objects",
        Unit::None,
        Bound::NonNegative,
        |c| c.perception_objects,
        u64
    ),
    count_key!(
        "perception_bytes_per_object",
        Unit::Byte,
        Bound::NonNegative,
        |c| c.perception_bytes_per_object,
        u64
    ),
    count_key!(
        "maneuver_bytes",
        Unit::Byte,
        Bound::NonNegative,
        |c| c.maneuver_bytes,
        u64
    ),
    real_key!(
        "ranging_error_per_unit_distance",
        Unit::None,
        Bound::Positive,
        |c| c.ranging_error_per_unit_distance
    ),
    real_key!(
        "comm_elevation_deg",
        Unit::Deg,
        Bound::HalfOpen(0.0, 90.0),
        |c| c.comm_elevation_deg
    ),
    real_key!(
        "nav_elevation_deg",
        Unit::Deg,
        Bound::HalfOpen(0.0, 90.0),
        |c| c.nav_elevation_deg
    ),
    real_key!(
        "sar_view_angle_deg",
        Unit::Deg,
        Bound::OpenClosed(0.0, 90.0),
        |c| c.sar_view_angle_deg
    ),
    real_key!("sar_swath_km", Unit::Km, Bound::Positive, |c| c
        .sar_swath_km),
    real_key!("rate_threshold_mbps", Unit::Mbps, Bound::NonNegative, |c| c
        .rate_threshold_mbps),
    real_key!("sensing_data_gbits", Unit::Gbit, Bound::NonNegative, |c| c
        .sensing_data_gbits),
    real_key!(
        "sensing_delivery_bps_per_hz",
        Unit::BpsPerHz,
        Bound::Positive,
        |c| c.sensing_delivery_bps_per_hz
    ),
    real_key!("path_loss_intercept_db", Unit::Db, Bound::Any, |c| c
        .path_loss
        .intercept_db),
    real_key!("path_loss_slope_db", Unit::Db, Bound::Positive, |c| c
        .path_loss
        .slope_db),
    real_key!("combined_gain_db", Unit::Db, Bound::Any, |c| c
        .combined_gain_db),
    real_key!("noise_psd_dbm_hz", Unit::DbmHz, Bound::Any, |c| c
        .noise_psd_dbm_hz),
    real_key!("noise_figure_db", Unit::Db, Bound::NonNegative, |c| c
        .noise_figure_db),
    Key {
        name: "gps_enabled",
        kind: Kind::Flag,
        unit: Unit::None,
        bound: Bound::Any,
        get: |c| Value::Flag(c.gps_enabled),
        set: |c, v| {
            if let Value::Flag(b) = v {
                c.gps_enabled = b;
            }
        },
    },
    count_key!(
        "gps_satellites",
        Unit::None,
        Bound::AtLeast(1),
        |c| c.gps.count,
        usize
    ),
    real_key!("gps_altitude_km", Unit::Km, Bound::Positive, |c| c
        .gps
        .altitude_km),
    Key {
        name: "gps_layout",
        kind: Kind::Word(LAYOUTS),
        unit: Unit::None,
        bound: Bound::Any,
        get: |c| Value::Word(c.gps.layout.as_str().into()),
        set: |c, v| {
            if let Value::Word(w) = v {
                c.gps.layout = w.parse().unwrap_or(c.gps.layout);
            }
        },
    },
    real_key!(
        "gps_elevation_deg",
        Unit::Deg,
        Bound::HalfOpen(0.0, 90.0),
        |c| c.gps_elevation_deg
    ),
    Key {
        name: "ranging_bandwidth_scaling",
        kind: Kind::Word(SCALINGS),
        unit: Unit::None,
        bound: Bound::Any,
        get: |c| Value::Word(c.ranging_bandwidth_scaling.as_str().into()),
        set: |c, v| {
            if let Value::Word(w) = v {
                c.ranging_bandwidth_scaling = w
                    .parse::<BandwidthScaling>()
                    .unwrap_or(c.ranging_bandwidth_scaling);
            }
        },
    },
    real_key!(
        "ranging_reference_bandwidth_mhz",
        Unit::Mhz,
        Bound::Positive,
        |c| c.ranging_reference_bandwidth_mhz
    ),
    count_key!(
        "fusion_factor",
        Unit::None,
        Bound::AtLeast(1),
        |c| c.fusion_factor,
        u32
    ),
    Key {
        name: "fusion_halves_revisit",
        kind: Kind::Flag,
        unit: Unit::None,
        bound: Bound::Any,
        get: |c| Value::Flag(c.fusion_halves_revisit),
        set: |c, v| {
            if let Value::Flag(b) = v {
                c.fusion_halves_revisit = b;
            }
        },
    },
    real_key!("sar_antenna_length_m", Unit::Meter, Bound::Positive, |c| c
        .sar_antenna_length_m),
    real_key!("earth_radius_km", Unit::Km, Bound::Positive, |c| c
        .earth
        .radius_km),
    real_key!("earth_mu_km3_s2", Unit::Km3S2, Bound::Positive, |c| c
        .earth
        .mu_km3_s2),
    real_key!(
        "speed_of_light_m_s",
        Unit::MeterPerSecond,
        Bound::Positive,
        |c| c.earth.speed_of_light_m_s
    ),
    Key {
        name: "rng_algorithm",
        kind: Kind::Word(GENERATORS),
        unit: Unit::None,
        bound: Bound::Any,
        get: |c| Value::Word(c.rng.as_str().into()),
        set: |c, v| {
            if let Value::Word(w) = v {
                c.rng = w.parse::<RngAlgorithm>().unwrap_or(c.rng);
            }
        },
    },
];

/// Names of all configuration keys in file order.
pub fn key_names() -> impl Iterator<Item = &'static str> {
    KEYS.iter().map(|k| k.name)
}

fn split_number_suffix<'a>(text: &'a str, unit: Unit) -> (&'a str, &'a str) {
    if let Some((num, suffix)) = text.split_once(char::is_whitespace) {
        return (num.trim(), suffix.trim());
    }
    unit.suffixes()
        .iter()
        .filter_map(|(suffix, _)| {
            let num = text.strip_suffix(suffix)?;
            num.parse::<f64>().is_ok().then(|| text.split_at(num.len()))
        })
        .max_by_key(|(_, suffix)| suffix.len())
        .unwrap_or((text, ""))
}

fn parse_value(key: &Key, text: &str, line: usize) -> Result<Value> {
    let bad = |what: &str| Error::Parse {
        line,
        message: format!("`{}`: {what}", key.name),
    };
    match key.kind {
        Kind::Flag => match text {
            "true" => Ok(Value::Flag(true)),
            "false" => Ok(Value::Flag(false)),
            _ => Err(bad("expected `true` or `false`")),
        },
        Kind::Word(choices) => {
            if choices.contains(&text) {
                Ok(Value::Word(text.to_string()))
            } else {
                Err(bad(&format!("expected one of {}", choices.join(", "))))
            }
        }
        Kind::Count | Kind::Real => {
            let (num, suffix) = split_number_suffix(text, key.unit);
            let factor = if suffix.is_empty() {
                1.0
            } else {
                key.unit
                    .suffixes()
                    .iter()
                    .find(|(s, _)| *s == suffix)
                    .map(|&(_, f)| f)
                    .ok_or_else(|| bad(&format!("unit `{suffix}` not accepted")))?
            };
            if let Kind::Count = key.kind {
                if factor != 1.0 {
                    return Err(bad("counts take no scaled unit"));
                }
                if let Some(rest) = num.strip_prefix('-') {
                    if rest.parse::<u64>().is_ok() {
                        return Err(Error::Validation {
                            key: key.name.into(),
                            bound: key.bound.describe(),
                        });
                    }
                }
                return num
                    .parse::<u64>()
                    .map(Value::Count)
                    .map_err(|_| bad(&format!("`{num}` is not a non-negative integer")));
            }
            let x: f64 = num
                .parse()
                .map_err(|_| bad(&format!("`{num}` is not a number")))?;
            Ok(Value::Real(x * factor))
        }
    }
}

fn check_bound(key: &Key, value: &Value) -> Result<()> {
    if let Some(x) = value.numeric() {
        if !key.bound.holds(x) {
            return Err(Error::Validation {
                key: key.name.into(),
                bound: key.bound.describe(),
            });
        }
    }
    Ok(())
}

impl ScenarioConfig {
    /// Check every key bound plus the constraints spanning several keys.
    pub fn validate(&self) -> Result<()> {
        for key in KEYS {
            check_bound(key, &(key.get)(self))?;
        }
        let hemisphere = std::f64::consts::TAU * self.earth.radius_km * self.earth.radius_km;
        if cap_half_angle(self.cap_area_km2, &self.earth).is_err() {
            return Err(Error::Validation {
                key: "cap_area_km2".into(),
                bound: format!("< {hemisphere} (one hemisphere)"),
            });
        }
        if self.gps.layout == GpsLayout::Walker && self.gps.count % 6 != 0 {
            return Err(Error::Validation {
                key: "gps_satellites".into(),
                bound: "a multiple of 6 with the walker layout".into(),
            });
        }
        let total = self.comm_satellites + self.nav_satellites + self.sensing_satellites;
        if self.fusion_halves_revisit && total < self.fusion_factor as u64 {
            return Err(Error::Validation {
                key: "fusion_factor".into(),
                bound: format!("<= total satellite count {total}"),
            });
        }
        Ok(())
    }
}

/// Parse configuration text. Missing keys keep their defaults.
pub fn parse_config_str(text: &str) -> Result<ScenarioConfig> {
    let mut config = ScenarioConfig::default();
    let mut seen: Vec<Option<usize>> = vec![None; KEYS.len()];
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (name, value) = body.split_once('=').ok_or_else(|| Error::Parse {
            line,
            message: format!("expected `key = value`, found `{body}`"),
        })?;
        let name = name.trim();
        let value = value.trim();
        let pos = KEYS
            .iter()
            .position(|k| k.name == name)
            .ok_or_else(|| Error::Parse {
                line,
                message: format!("unknown key `{name}`"),
            })?;
        if let Some(first) = seen[pos] {
            return Err(Error::Parse {
                line,
                message: format!("duplicate key `{name}` (first set on line {first})"),
            });
        }
        seen[pos] = Some(line);
        if value.is_empty() {
            return Err(Error::Parse {
                line,
                message: format!("`{name}` has no value"),
            });
        }
        let key = &KEYS[pos];
        let v = parse_value(key, value, line)?;
        check_bound(key, &v)?;
        (key.set)(&mut config, v);
    }
    config.validate()?;
    Ok(config)
}

pub fn parse_config(path: impl AsRef<Path>) -> Result<ScenarioConfig> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    parse_config_str(&text)
}

/// Canonical text form: every key, in file order, in its own unit.
pub fn to_config_text(config: &ScenarioConfig) -> String {
    let mut out = String::new();
    for key in KEYS {
        let v = match (key.get)(config) {
            Value::Count(n) => n.to_string(),
            Value::Real(x) => format!("{x}"),
            Value::Flag(b) => b.to_string(),
            Value::Word(w) => w,
        };
        let _ = writeln!(out, "{} = {}", key.name, v);
    }
    out
}

/// SHA-256 of the canonical text form, lowercase hex.
pub fn fingerprint(config: &ScenarioConfig) -> String {
    let digest = Sha256::digest(to_config_text(config).as_bytes());
    digest.iter().fold(String::with_capacity(64), |mut s, b| {
        let _ = write!(s, "{b:02x}");
        s
    })
}
