//! Flat key-value scenario config files.
//!
//! One `key = value` pair per line; `#` starts a comment line; blank lines
//! are ignored. Keys are exactly the [`ScenarioConfig`] field names (angles
//! in radians, SI units), with the Earth model under a `earth.` prefix.
//! The Earth keys may be omitted (default spherical model); everything
//! else is required, and unknown or duplicate keys are errors.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::geodesy::EarthModel;
use crate::trajgen::{PathKind, ScenarioConfig};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfigError {
    #[error("line {line}: expected `key = value`, got `{content}`")]
    MalformedLine { line: usize, content: String },
    #[error("unknown config key `{0}`")]
    UnknownKey(String),
    #[error("duplicate config key `{0}`")]
    DuplicateKey(String),
    #[error("missing required config key `{0}`")]
    MissingKey(&'static str),
    #[error("invalid value `{value}` for key `{key}`: {reason}")]
    InvalidValue { key: String, value: String, reason: String },
}

const REQUIRED_KEYS: [&str; 8] = [
    "path_kind",
    "lon0",
    "lat0",
    "height0",
    "speed",
    "duration",
    "imu_rate",
    "gnss_rate",
];

/// Parses a scenario config from its text form. Fails loudly on unknown
/// keys, duplicates, malformed lines and missing required keys; the result
/// is additionally validated with [`ScenarioConfig::validate`] by callers
/// that run it.
pub fn parse_config(text: &str) -> Result<ScenarioConfig, ConfigError> {
    let mut seen = BTreeSet::new();
    let mut cfg = ScenarioConfig {
        path_kind: PathKind::Meridian,
        lon0: 0.0,
        lat0: 0.0,
        height0: 0.0,
        speed: 0.0,
        duration: 0.0,
        imu_rate: 0.0,
        gnss_rate: 0.0,
        earth: EarthModel::default(),
    };

    for (idx, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(ConfigError::MalformedLine { line: idx + 1, content: raw.to_string() });
        };
        let key = key.trim();
        let value = value.trim();
        if !seen.insert(key.to_string()) {
            return Err(ConfigError::DuplicateKey(key.to_string()));
        }

        let bad = |reason: &str| ConfigError::InvalidValue {
            key: key.to_string(),
            value: value.to_string(),
            reason: reason.to_string(),
        };
        let num = || value.parse::<f64>().map_err(|e| bad(&e.to_string()));

        match key {
            "path_kind" => cfg.path_kind = value.parse().map_err(|e: String| bad(&e))?,
            "lon0" => cfg.lon0 = num()?,
            "lat0" => cfg.lat0 = num()?,
            "height0" => cfg.height0 = num()?,
            "speed" => cfg.speed = num()?,
            "duration" => cfg.duration = num()?,
            "imu_rate" => cfg.imu_rate = num()?,
            "gnss_rate" => cfg.gnss_rate = num()?,
            "earth.equatorial_radius" => cfg.earth.equatorial_radius = num()?,
            "earth.eccentricity_sq" => cfg.earth.eccentricity_sq = num()?,
            "earth.rotation_rate" => cfg.earth.rotation_rate = num()?,
            "earth.gravity_magnitude" => cfg.earth.gravity_magnitude = num()?,
            other => return Err(ConfigError::UnknownKey(other.to_string())),
        }
    }

    for key in REQUIRED_KEYS {
        if !seen.contains(key) {
            return Err(ConfigError::MissingKey(key));
        }
    }
    Ok(cfg)
}

/// Renders a config in the exact form [`parse_config`] accepts. Angle keys
/// carry a degree comment for readability.
pub fn emit_config(cfg: &ScenarioConfig) -> String {
    let mut out = String::new();
    out.push_str(&format!("path_kind = {}\n", cfg.path_kind));
    out.push_str(&format!("# lon0 = {} deg, lat0 = {} deg\n", cfg.lon0.to_degrees(), cfg.lat0.to_degrees()));
    out.push_str(&format!("lon0 = {:.17e}\n", cfg.lon0));
    out.push_str(&format!("lat0 = {:.17e}\n", cfg.lat0));
    out.push_str(&format!("height0 = {}\n", cfg.height0));
    out.push_str(&format!("speed = {}\n", cfg.speed));
    out.push_str(&format!("duration = {}\n", cfg.duration));
    out.push_str(&format!("imu_rate = {}\n", cfg.imu_rate));
    out.push_str(&format!("gnss_rate = {}\n", cfg.gnss_rate));
    out.push_str(&format!("earth.equatorial_radius = {}\n", cfg.earth.equatorial_radius));
    out.push_str(&format!("earth.eccentricity_sq = {}\n", cfg.earth.eccentricity_sq));
    out.push_str(&format!("earth.rotation_rate = {:.17e}\n", cfg.earth.rotation_rate));
    out.push_str(&format!("earth.gravity_magnitude = {}\n", cfg.earth.gravity_magnitude));
    out
}
