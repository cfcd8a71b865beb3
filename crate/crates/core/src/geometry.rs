//! Spherical-Earth geometry: satellite shells, vehicle placement on a
//! spherical cap, elevation and slant range.

use std::f64::consts::{PI, TAU};
use std::ops::Sub;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::unit_f64;

/// Earth-centered Cartesian point, kilometers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EcefPoint {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl EcefPoint {
    pub const fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    /// Point at `radius` with polar angle `theta` (from +z) and azimuth `phi`, radians.
    pub fn from_spherical(radius: f64, theta: f64, phi: f64) -> Self {
        let (st, ct) = theta.sin_cos();
        let (sp, cp) = phi.sin_cos();
        Self::new(radius * st * cp, radius * st * sp, radius * ct)
    }

    pub fn dot(&self, other: &EcefPoint) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn scale(&self, k: f64) -> Self {
        Self::new(self.x * k, self.y * k, self.z * k)
    }

    /// Angle between the position vectors, radians.
    pub fn central_angle(&self, other: &EcefPoint) -> f64 {
        let c = self.dot(other) / (self.norm() * other.norm());
        c.clamp(-1.0, 1.0).acos()
    }
}

impl Sub for EcefPoint {
    type Output = EcefPoint;

    fn sub(self, rhs: EcefPoint) -> EcefPoint {
        EcefPoint::new(self.x - rhs.x, self.y - rhs.y, self.z - rhs.z)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EarthModel {
    pub radius_km: f64,
    pub mu_km3_s2: f64,
    pub speed_of_light_m_s: f64,
}

impl Default for EarthModel {
    fn default() -> Self {
        Self {
            radius_km: 6371.0,
            mu_km3_s2: 398_600.441_8,
            speed_of_light_m_s: 299_792_458.0,
        }
    }
}

impl EarthModel {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("earth_radius_km", self.radius_km),
            ("earth_mu_km3_s2", self.mu_km3_s2),
            ("speed_of_light_m_s", self.speed_of_light_m_s),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(name, "must be positive"));
            }
        }
        Ok(())
    }

    pub fn north_pole(&self) -> EcefPoint {
        EcefPoint::new(0.0, 0.0, self.radius_km)
    }
}

/// A set of satellites at a common orbital radius.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Shell {
    pub radius_km: f64,
    pub points: Vec<EcefPoint>,
}

impl Shell {
    pub fn empty(radius_km: f64) -> Self {
        Self {
            radius_km,
            points: Vec::new(),
        }
    }

    pub fn count(&self) -> usize {
        self.points.len()
    }

    pub fn altitude_km(&self, earth: &EarthModel) -> f64 {
        self.radius_km - earth.radius_km
    }

    /// Concatenation of shells at the same radius. Indices of the first
    /// shell are preserved, the second follows, and so on.
    pub fn union(shells: &[&Shell]) -> Result<Shell> {
        let Some(first) = shells.first() else {
            return Err(Error::invalid("shells", "union of zero shells"));
        };
        let radius_km = first.radius_km;
        let mut points = Vec::with_capacity(shells.iter().map(|s| s.count()).sum());
        for s in shells {
            if (s.radius_km - radius_km).abs() > 1e-9 * radius_km {
                return Err(Error::invalid("shells", "union requires a common radius"));
            }
            points.extend_from_slice(&s.points);
        }
        Ok(Shell { radius_km, points })
    }

    /// Indices of satellites whose central angle to `center` is at most
    /// `max_angle_rad`. Used to prune visibility scans for users clustered
    /// around `center`.
    pub fn indices_within(&self, center: &EcefPoint, max_angle_rad: f64) -> Vec<usize> {
        if max_angle_rad >= PI {
            return (0..self.count()).collect();
        }
        let c = *center;
        let cos_max = max_angle_rad.cos();
        let cn = c.norm();
        self.points
            .iter()
            .enumerate()
            .filter(|(_, p)| p.dot(&c) >= cos_max * cn * p.norm())
            .map(|(i, _)| i)
            .collect()
    }
}

fn uniform_direction<R: RngCore + ?Sized>(rng: &mut R, radius: f64) -> EcefPoint {
    let z = 2.0 * unit_f64(rng) - 1.0;
    let phi = TAU * unit_f64(rng);
    let rho = (1.0 - z * z).max(0.0).sqrt();
    let (sp, cp) = phi.sin_cos();
    EcefPoint::new(radius * rho * cp, radius * rho * sp, radius * z)
}

/// `count` independent points uniform on the sphere of `radius_km`.
pub fn sample_uniform_sphere<R: RngCore + ?Sized>(
    count: usize,
    radius_km: f64,
    rng: &mut R,
) -> Result<Shell> {
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    if !(radius_km > 0.0 && radius_km.is_finite()) {
        return Err(Error::invalid("radius", "must be positive"));
    }
    let points = (0..count)
        .map(|_| uniform_direction(rng, radius_km))
        .collect();
    Ok(Shell { radius_km, points })
}

/// Half-angle (radians) of the spherical cap of the given area.
pub fn cap_half_angle(cap_area_km2: f64, earth: &EarthModel) -> Result<f64> {
    let hemisphere = TAU * earth.radius_km * earth.radius_km;
    if !(cap_area_km2 > 0.0 && cap_area_km2 < hemisphere) {
        return Err(Error::invalid(
            "cap_area_km2",
            format!("must be in (0, {hemisphere}) km^2"),
        ));
    }
    Ok((1.0 - cap_area_km2 / hemisphere).acos())
}

/// Users uniform over the cap of `cap_area_km2` centered on the north pole.
pub fn sample_cap_users<R: RngCore + ?Sized>(
    count: usize,
    cap_area_km2: f64,
    earth: &EarthModel,
    rng: &mut R,
) -> Result<Vec<EcefPoint>> {
    if count == 0 {
        return Err(Error::invalid("count", "must be at least 1"));
    }
    let half_angle = cap_half_angle(cap_area_km2, earth)?;
    let span = 1.0 - half_angle.cos();
    let re = earth.radius_km;
    Ok((0..count)
        .map(|_| {
            let z = 1.0 - span * unit_f64(rng);
            let phi = TAU * unit_f64(rng);
            let rho = (1.0 - z * z).max(0.0).sqrt();
            let (sp, cp) = phi.sin_cos();
            EcefPoint::new(re * rho * cp, re * rho * sp, re * z)
        })
        .collect())
}

pub fn slant_range(a: &EcefPoint, b: &EcefPoint) -> Result<f64> {
    let d = (*b - *a).norm();
    if d == 0.0 {
        return Err(Error::DegenerateGeometry("coincident points"));
    }
    Ok(d)
}

/// Sine of the elevation of `sat` seen from `user`, with the slant range.
fn sin_elevation(user: &EcefPoint, sat: &EcefPoint) -> Option<(f64, f64)> {
    let d = *sat - *user;
    let range = d.norm();
    if range == 0.0 {
        return None;
    }
    let s = d.dot(user) / (user.norm() * range);
    Some((s.clamp(-1.0, 1.0), range))
}

/// Elevation of `sat` above the local horizon at `user`, degrees.
pub fn elevation_angle(user: &EcefPoint, sat: &EcefPoint) -> Result<f64> {
    let (s, _) =
        sin_elevation(user, sat).ok_or(Error::DegenerateGeometry("satellite at user position"))?;
    Ok(s.asin().to_degrees())
}

/// Earth-central angle (degrees) from a user to the edge of the region where
/// a satellite at `orbit_radius_km` clears `mask_deg`.
pub fn coverage_central_angle_deg(
    mask_deg: f64,
    earth_radius_km: f64,
    orbit_radius_km: f64,
) -> f64 {
    let m = mask_deg.to_radians();
    let nadir = (m.cos() * earth_radius_km / orbit_radius_km).asin();
    (PI / 2.0 - m - nadir).to_degrees()
}

/// Expected fraction of a uniform shell visible above `mask_deg`.
pub fn visible_fraction(mask_deg: f64, earth_radius_km: f64, orbit_radius_km: f64) -> f64 {
    let lambda =
        coverage_central_angle_deg(mask_deg, earth_radius_km, orbit_radius_km).to_radians();
    (1.0 - lambda.cos()) / 2.0
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Visible {
    pub index: usize,
    pub slant_range_km: f64,
    pub elevation_deg: f64,
}

fn sort_visible(v: &mut [Visible]) {
    // indices are unique, so the unstable sort is deterministic
    v.sort_unstable_by(|a, b| {
        a.slant_range_km
            .total_cmp(&b.slant_range_km)
            .then(a.index.cmp(&b.index))
    });
}

/// Sine of the elevation and the slant range of `sat` when it clears
/// `sin_mask`. Satellites below a non-negative mask are rejected on the sign
/// of the projection alone.
#[inline]
fn clears_mask(
    user: &EcefPoint,
    user_norm: f64,
    sat: &EcefPoint,
    sin_mask: f64,
) -> Option<(f64, f64)> {
    let d = *sat - *user;
    let proj = d.dot(user);
    if sin_mask > 0.0 && proj <= 0.0 {
        return None;
    }
    let range_sq = d.dot(&d);
    if sin_mask > 0.0 {
        // clear rejections skip the square root; the margin leaves borderline
        // cases to the exact test below
        let bound = sin_mask * user_norm;
        if proj * proj < bound * bound * range_sq * (1.0 - 1e-9) {
            return None;
        }
    }
    let range = range_sq.sqrt();
    if range == 0.0 {
        return None;
    }
    let s = (proj / (user_norm * range)).clamp(-1.0, 1.0);
    (s >= sin_mask).then_some((s, range))
}

/// Satellites of `shell` at or above `min_elevation_deg`, nearest first.
pub fn visible_satellites(user: &EcefPoint, shell: &Shell, min_elevation_deg: f64) -> Vec<Visible> {
    visible_among(user, shell, 0..shell.count(), min_elevation_deg)
}

/// As [`visible_satellites`], restricted to the given candidate indices.
pub fn visible_among(
    user: &EcefPoint,
    shell: &Shell,
    candidates: impl IntoIterator<Item = usize>,
    min_elevation_deg: f64,
) -> Vec<Visible> {
    let sin_mask = min_elevation_deg.to_radians().sin();
    let user_norm = user.norm();
    let mut out: Vec<Visible> = candidates
        .into_iter()
        .filter_map(|i| {
            let (s, range) = clears_mask(user, user_norm, &shell.points[i], sin_mask)?;
            Some(Visible {
                index: i,
                slant_range_km: range,
                elevation_deg: s.asin().to_degrees(),
            })
        })
        .collect();
    sort_visible(&mut out);
    out
}

/// Call `f(index, slant_range_km)` for every candidate at or above
/// `min_elevation_deg`, in candidate order.
pub fn for_each_visible(
    user: &EcefPoint,
    shell: &Shell,
    candidates: impl IntoIterator<Item = usize>,
    min_elevation_deg: f64,
    mut f: impl FnMut(usize, f64),
) {
    let sin_mask = min_elevation_deg.to_radians().sin();
    let user_norm = user.norm();
    for i in candidates {
        if let Some((_, range)) = clears_mask(user, user_norm, &shell.points[i], sin_mask) {
            f(i, range);
        }
    }
}

/// First entry of [`visible_among`] without building the whole list:
/// `(index, slant_range_km)` of the nearest visible candidate.
pub fn nearest_visible_among(
    user: &EcefPoint,
    shell: &Shell,
    candidates: impl IntoIterator<Item = usize>,
    min_elevation_deg: f64,
) -> Option<(usize, f64)> {
    let sin_mask = min_elevation_deg.to_radians().sin();
    let user_norm = user.norm();
    let mut best: Option<(usize, f64)> = None;
    for i in candidates {
        if let Some((_, range)) = clears_mask(user, user_norm, &shell.points[i], sin_mask) {
            let closer = match best {
                None => true,
                Some((bi, br)) => range.total_cmp(&br).then(i.cmp(&bi)).is_lt(),
            };
            if closer {
                best = Some((i, range));
            }
        }
    }
    best
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum GpsLayout {
    Uniform,
    Walker,
}

impl GpsLayout {
    pub fn as_str(self) -> &'static str {
        match self {
            GpsLayout::Uniform => "uniform",
            GpsLayout::Walker => "walker",
        }
    }
}

impl std::str::FromStr for GpsLayout {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "uniform" => Ok(GpsLayout::Uniform),
            "walker" => Ok(GpsLayout::Walker),
            other => Err(format!("unknown GPS layout `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GpsConfig {
    pub count: usize,
    pub altitude_km: f64,
    pub layout: GpsLayout,
}

impl Default for GpsConfig {
    fn default() -> Self {
        Self {
            count: 24,
            altitude_km: 20_180.0,
            layout: GpsLayout::Uniform,
        }
    }
}

const GPS_PLANES: usize = 6;
const GPS_INCLINATION_DEG: f64 = 55.0;

/// The MEO reference constellation. Walker layout is 6 planes at 55 degrees
/// inclination with evenly spaced slots and a one-slot phase step between
/// adjacent planes; it consumes no randomness.
pub fn gps_shell<R: RngCore + ?Sized>(
    config: &GpsConfig,
    earth: &EarthModel,
    rng: &mut R,
) -> Result<Shell> {
    if config.count == 0 {
        return Err(Error::invalid("gps_satellites", "must be at least 1"));
    }
    let radius = earth.radius_km + config.altitude_km;
    match config.layout {
        GpsLayout::Uniform => sample_uniform_sphere(config.count, radius, rng),
        GpsLayout::Walker => {
            if config.count % GPS_PLANES != 0 {
                return Err(Error::invalid(
                    "gps_satellites",
                    "walker layout needs a multiple of 6 satellites",
                ));
            }
            let slots = config.count / GPS_PLANES;
            let inc = GPS_INCLINATION_DEG.to_radians();
            let (si, ci) = inc.sin_cos();
            let mut points = Vec::with_capacity(config.count);
            for plane in 0..GPS_PLANES {
                let raan = TAU * plane as f64 / GPS_PLANES as f64;
                let (sr, cr) = raan.sin_cos();
                for slot in 0..slots {
                    let u = TAU * (slot as f64 / slots as f64 + plane as f64 / config.count as f64);
                    let (su, cu) = u.sin_cos();
                    points.push(EcefPoint::new(
                        radius * (cr * cu - sr * su * ci),
                        radius * (sr * cu + cr * su * ci),
                        radius * su * si,
                    ));
                }
            }
            Ok(Shell {
                radius_km: radius,
                points,
            })
        }
    }
}
