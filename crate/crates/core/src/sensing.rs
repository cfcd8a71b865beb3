//! SAR resolution, constellation revisit time and age of information.
//! Everything here is closed form.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::EarthModel;

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SarConfig {
    pub bandwidth_hz: f64,
    /// Satellite-centered angle between target and nadir.
    pub view_angle_deg: f64,
    pub swath_width_km: f64,
    pub antenna_length_m: f64,
    /// Satellites co-illuminating one swath.
    pub fusion_factor: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SensingMetrics {
    pub range_resolution_m: f64,
    pub azimuth_resolution_m: f64,
    pub revisit_time_s: f64,
    pub download_time_s: f64,
    pub aoi_s: f64,
}

/// Ground-range resolution `c / (2 B sin(view)) / fusion`.
pub fn range_resolution_m(
    bandwidth_hz: f64,
    view_angle_deg: f64,
    fusion_factor: u32,
) -> Result<f64> {
    range_resolution_with_c(
        bandwidth_hz,
        view_angle_deg,
        fusion_factor,
        SPEED_OF_LIGHT_M_S,
    )
}

pub fn range_resolution_with_c(
    bandwidth_hz: f64,
    view_angle_deg: f64,
    fusion_factor: u32,
    speed_of_light_m_s: f64,
) -> Result<f64> {
    if !(bandwidth_hz > 0.0) {
        return Err(Error::invalid("bandwidth_hz", "must be positive"));
    }
    if view_angle_deg == 0.0 {
        return Err(Error::DegenerateView(view_angle_deg));
    }
    if !(view_angle_deg > 0.0 && view_angle_deg <= 90.0) {
        return Err(Error::invalid(
            "view_angle_deg",
            "must be in (0, 90] degrees",
        ));
    }
    if fusion_factor == 0 {
        return Err(Error::invalid("fusion_factor", "must be at least 1"));
    }
    let s = view_angle_deg.to_radians().sin();
    Ok(speed_of_light_m_s / (2.0 * bandwidth_hz * s) / fusion_factor as f64)
}

pub fn azimuth_resolution_m(antenna_length_m: f64) -> Result<f64> {
    if !(antenna_length_m > 0.0) {
        return Err(Error::invalid("antenna_length_m", "must be positive"));
    }
    Ok(antenna_length_m / 2.0)
}

/// Speed of the sub-satellite point for a circular orbit, km/s.
pub fn ground_track_speed_km_s(altitude_km: f64, earth: &EarthModel) -> f64 {
    let r = earth.radius_km + altitude_km;
    (earth.mu_km3_s2 / r).sqrt() * earth.radius_km / r
}

/// Area-sweep revisit time: the Earth's surface divided by the rate at which
/// `sat_count / fusion_factor` independent swaths sweep new ground.
pub fn revisit_time_s(
    sat_count: u64,
    swath_width_km: f64,
    altitude_km: f64,
    earth: &EarthModel,
    fusion_factor: u32,
) -> Result<f64> {
    if fusion_factor == 0 {
        return Err(Error::invalid("fusion_factor", "must be at least 1"));
    }
    if sat_count < fusion_factor as u64 {
        return Err(Error::invalid(
            "sat_count",
            format!("{sat_count} satellites cannot form groups of {fusion_factor}"),
        ));
    }
    if !(swath_width_km > 0.0) {
        return Err(Error::invalid("swath_width_km", "must be positive"));
    }
    if !(altitude_km > 0.0) {
        return Err(Error::invalid("altitude_km", "must be positive"));
    }
    let area = 4.0 * PI * earth.radius_km * earth.radius_km;
    let effective = sat_count as f64 / fusion_factor as f64;
    Ok(area / (effective * swath_width_km * ground_track_speed_km_s(altitude_km, earth)))
}

pub fn download_time_s(
    data_size_bits: f64,
    spectral_efficiency_bps_hz: f64,
    bandwidth_hz: f64,
) -> Result<f64> {
    if !(data_size_bits >= 0.0) {
        return Err(Error::invalid("data_size_bits", "must be non-negative"));
    }
    if !(spectral_efficiency_bps_hz > 0.0) {
        return Err(Error::invalid(
            "spectral_efficiency_bps_hz",
            "must be positive",
        ));
    }
    if !(bandwidth_hz > 0.0) {
        return Err(Error::invalid("bandwidth_hz", "must be positive"));
    }
    Ok(data_size_bits / (spectral_efficiency_bps_hz * bandwidth_hz))
}

/// Age of information: revisit time plus download time.
pub fn aoi_s(revisit_time_s: f64, download_time_s: f64) -> Result<f64> {
    if !(revisit_time_s >= 0.0 && download_time_s >= 0.0) {
        return Err(Error::invalid(
            "aoi",
            "revisit and download times must be non-negative",
        ));
    }
    Ok(revisit_time_s + download_time_s)
}
