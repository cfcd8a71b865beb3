//! Ranging error model and weighted least-squares solution covariance.
//!
//! Each visible satellite contributes one linearized distance equation in the
//! unknowns `(x, y, z, c*t)`. With ranging standard deviations `sigma_i`,
//! the estimate covariance is `(H^T W H)^-1`, `W = diag(1 / sigma_i^2)`. When
//! all `sigma_i` are equal this is `sigma^2 (H^T H)^-1` and its root trace is
//! GDOP times the ranging error.

use std::str::FromStr;

use nalgebra::{Matrix4, MatrixXx4, RowVector4};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{visible_among, visible_satellites, EcefPoint, Shell, Visible};

pub const SPEED_OF_LIGHT_M_S: f64 = 299_792_458.0;

/// Frobenius condition number above which the geometry counts as singular.
pub const MAX_CONDITION: f64 = 1e12;

/// Minimum number of ranging equations for a position and clock fix.
pub const MIN_ANCHORS: usize = 4;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Anchor {
    pub position: EcefPoint,
    pub ranging_sigma_m: f64,
}

/// How ranging error scales with the navigation signal bandwidth.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BandwidthScaling {
    Off,
    Linear,
    Sqrt,
}

impl BandwidthScaling {
    pub fn as_str(self) -> &'static str {
        match self {
            BandwidthScaling::Off => "off",
            BandwidthScaling::Linear => "linear",
            BandwidthScaling::Sqrt => "sqrt",
        }
    }
}

impl FromStr for BandwidthScaling {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s {
            "off" => Ok(BandwidthScaling::Off),
            "linear" => Ok(BandwidthScaling::Linear),
            "sqrt" => Ok(BandwidthScaling::Sqrt),
            other => Err(format!("unknown bandwidth scaling `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RangingModel {
    /// Meters of ranging error per meter of range.
    pub per_unit_distance_coeff: f64,
    pub bandwidth_scaling: BandwidthScaling,
    pub reference_bandwidth_hz: f64,
}

impl Default for RangingModel {
    fn default() -> Self {
        Self {
            per_unit_distance_coeff: 2.28e-8,
            bandwidth_scaling: BandwidthScaling::Linear,
            reference_bandwidth_hz: 25e6,
        }
    }
}

/// Ranging standard deviation (m) over `distance_km` with a signal of
/// `nav_bandwidth_hz`.
pub fn ranging_sigma_m(
    distance_km: f64,
    nav_bandwidth_hz: f64,
    model: &RangingModel,
) -> Result<f64> {
    if !(distance_km > 0.0) {
        return Err(Error::invalid("distance_km", "must be positive"));
    }
    if !(nav_bandwidth_hz > 0.0) {
        return Err(Error::invalid("nav_bandwidth_hz", "must be positive"));
    }
    Ok(model.per_unit_distance_coeff
        * distance_km
        * 1000.0
        * model.bandwidth_factor(nav_bandwidth_hz))
}

impl RangingModel {
    /// Ratio of the ranging error at `nav_bandwidth_hz` to the error at the
    /// reference bandwidth.
    pub fn bandwidth_factor(&self, nav_bandwidth_hz: f64) -> f64 {
        let ratio = self.reference_bandwidth_hz / nav_bandwidth_hz;
        match self.bandwidth_scaling {
            BandwidthScaling::Off => 1.0,
            BandwidthScaling::Linear => ratio,
            BandwidthScaling::Sqrt => ratio.sqrt(),
        }
    }
}

fn design_row(user: &EcefPoint, sat: &EcefPoint) -> Result<RowVector4<f64>> {
    let d = *sat - *user;
    let r = d.norm();
    if r == 0.0 {
        return Err(Error::DegenerateGeometry("anchor coincides with user"));
    }
    Ok(RowVector4::new(-d.x / r, -d.y / r, -d.z / r, 1.0))
}

/// Linearized distance-equation matrix, one row per anchor.
pub fn geometry_matrix(user: &EcefPoint, anchors: &[Anchor]) -> Result<MatrixXx4<f64>> {
    if anchors.len() < MIN_ANCHORS {
        return Err(Error::InsufficientAnchors {
            found: anchors.len(),
        });
    }
    let mut h = MatrixXx4::zeros(anchors.len());
    for (i, a) in anchors.iter().enumerate() {
        h.set_row(i, &design_row(user, &a.position)?);
    }
    Ok(h)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NavSolutionError {
    /// Units m^2; the fourth coordinate is `c * t`.
    pub covariance: Matrix4<f64>,
    pub positioning_error_m: f64,
    pub timing_error_s: f64,
}

/// Running sum of `H^T W H` over ranging equations.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Information {
    // upper triangle, row-major
    upper: [f64; 10],
    equations: usize,
}

impl Information {
    pub fn new() -> Self {
        Self::default()
    }

    /// Add the equation of a satellite at `sat` ranged with `sigma_m`.
    pub fn add(&mut self, user: &EcefPoint, sat: &EcefPoint, sigma_m: f64) -> Result<()> {
        if !(sigma_m > 0.0) {
            return Err(Error::invalid("ranging_sigma_m", "must be positive"));
        }
        let row = design_row(user, sat)?;
        self.accumulate(&row, sigma_m);
        Ok(())
    }

    /// As [`Information::add`] for a satellite known to be at positive
    /// `range_km = |sat - user|`, with positive `sigma_m`.
    pub(crate) fn add_visible(
        &mut self,
        user: &EcefPoint,
        sat: &EcefPoint,
        range_km: f64,
        sigma_m: f64,
    ) {
        debug_assert!(range_km > 0.0 && sigma_m > 0.0);
        let d = *sat - *user;
        let inv = 1.0 / range_km;
        self.accumulate(
            &RowVector4::new(-d.x * inv, -d.y * inv, -d.z * inv, 1.0),
            sigma_m,
        );
    }

    fn accumulate(&mut self, row: &RowVector4<f64>, sigma_m: f64) {
        let w = 1.0 / (sigma_m * sigma_m);
        let mut k = 0;
        for i in 0..4 {
            let wi = w * row[i];
            for j in i..4 {
                self.upper[k] += wi * row[j];
                k += 1;
            }
        }
        self.equations += 1;
    }

    pub fn equations(&self) -> usize {
        self.equations
    }

    /// `self + weight * other`: the equations of `other` with every variance
    /// divided by `weight`.
    pub fn combined(&self, other: &Information, weight: f64) -> Information {
        let mut out = *self;
        for (a, b) in out.upper.iter_mut().zip(&other.upper) {
            *a += weight * b;
        }
        out.equations += other.equations;
        out
    }

    pub fn matrix(&self) -> Matrix4<f64> {
        let mut m = Matrix4::zeros();
        let mut k = 0;
        for i in 0..4 {
            for j in i..4 {
                m[(i, j)] = self.upper[k];
                m[(j, i)] = self.upper[k];
                k += 1;
            }
        }
        m
    }

    /// Covariance of the fix these equations support.
    pub fn solve(&self, speed_of_light_m_s: f64) -> Result<NavSolutionError> {
        if self.equations < MIN_ANCHORS {
            return Err(Error::InsufficientAnchors {
                found: self.equations,
            });
        }
        let info = self.matrix();
        let singular = |condition| Error::SingularGeometry { condition };
        let cov = info
            .cholesky()
            .ok_or_else(|| singular(f64::INFINITY))?
            .inverse();
        let condition = info.norm() * cov.norm();
        if !(condition <= MAX_CONDITION) {
            return Err(singular(condition));
        }
        let cov = 0.5 * (cov + cov.transpose());
        Ok(NavSolutionError {
            covariance: cov,
            positioning_error_m: (cov[(0, 0)] + cov[(1, 1)] + cov[(2, 2)]).sqrt(),
            timing_error_s: cov[(3, 3)].sqrt() / speed_of_light_m_s,
        })
    }
}

/// Error covariance of the weighted least-squares fix.
pub fn solution_error(user: &EcefPoint, anchors: &[Anchor]) -> Result<NavSolutionError> {
    solution_error_with_c(user, anchors, SPEED_OF_LIGHT_M_S)
}

pub fn solution_error_with_c(
    user: &EcefPoint,
    anchors: &[Anchor],
    speed_of_light_m_s: f64,
) -> Result<NavSolutionError> {
    if anchors.len() < MIN_ANCHORS {
        return Err(Error::InsufficientAnchors {
            found: anchors.len(),
        });
    }
    let mut info = Information::new();
    for a in anchors {
        info.add(user, &a.position, a.ranging_sigma_m)?;
    }
    info.solve(speed_of_light_m_s)
}

/// Visibility masks and ranging parameters for a GPS + LEO fix.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HybridParams {
    pub leo_mask_deg: f64,
    pub gps_mask_deg: f64,
    pub ranging: RangingModel,
    /// Navigation signal bandwidth of the LEO satellites.
    pub leo_bandwidth_hz: f64,
}

/// Anchors from already computed visibility lists. GPS ranging stays at the
/// reference bandwidth; LEO ranging uses `params.leo_bandwidth_hz`.
pub fn anchors_from_visible(
    leo: &Shell,
    leo_visible: &[Visible],
    gps: &Shell,
    gps_visible: &[Visible],
    params: &HybridParams,
) -> Result<Vec<Anchor>> {
    let mut anchors = Vec::with_capacity(leo_visible.len() + gps_visible.len());
    for v in gps_visible {
        anchors.push(Anchor {
            position: gps.points[v.index],
            ranging_sigma_m: ranging_sigma_m(
                v.slant_range_km,
                params.ranging.reference_bandwidth_hz,
                &params.ranging,
            )?,
        });
    }
    for v in leo_visible {
        anchors.push(Anchor {
            position: leo.points[v.index],
            ranging_sigma_m: ranging_sigma_m(
                v.slant_range_km,
                params.leo_bandwidth_hz,
                &params.ranging,
            )?,
        });
    }
    Ok(anchors)
}

/// Visible GPS anchors followed by visible LEO navigation anchors.
pub fn hybrid_anchor_set(
    user: &EcefPoint,
    leo_nav_shell: &Shell,
    gps: &Shell,
    params: &HybridParams,
) -> Result<Vec<Anchor>> {
    let leo_visible = visible_satellites(user, leo_nav_shell, params.leo_mask_deg);
    let gps_visible = visible_satellites(user, gps, params.gps_mask_deg);
    anchors_from_visible(leo_nav_shell, &leo_visible, gps, &gps_visible, params)
}

/// As [`hybrid_anchor_set`] with the LEO scan restricted to `leo_candidates`.
pub fn hybrid_anchor_set_among(
    user: &EcefPoint,
    leo_nav_shell: &Shell,
    leo_candidates: &[usize],
    gps: &Shell,
    params: &HybridParams,
) -> Result<Vec<Anchor>> {
    let leo_visible = visible_among(
        user,
        leo_nav_shell,
        leo_candidates.iter().copied(),
        params.leo_mask_deg,
    );
    let gps_visible = visible_satellites(user, gps, params.gps_mask_deg);
    anchors_from_visible(leo_nav_shell, &leo_visible, gps, &gps_visible, params)
}

#[cfg(test)]
mod tests {
    use super::*;

    const RE: f64 = 6371.0;

    fn pole() -> EcefPoint {
        EcefPoint::new(0.0, 0.0, RE)
    }

    fn anchor(theta_deg: f64, phi_deg: f64, sigma: f64) -> Anchor {
        Anchor {
            position: EcefPoint::from_spherical(
                RE + 500.0,
                theta_deg.to_radians(),
                phi_deg.to_radians(),
            ),
            ranging_sigma_m: sigma,
        }
    }

    #[test]
    fn sigma_examples() {
        let m = RangingModel::default();
        assert!((ranging_sigma_m(1000.0, 25e6, &m).unwrap() - 0.0228).abs() < 1e-15);
        assert!((ranging_sigma_m(1000.0, 300e6, &m).unwrap() - 0.0019).abs() < 1e-15);
        assert!((ranging_sigma_m(21_500.0, 25e6, &m).unwrap() - 0.4902).abs() < 1e-12);
        let sqrt = RangingModel {
            bandwidth_scaling: BandwidthScaling::Sqrt,
            ..m
        };
        let s = ranging_sigma_m(1000.0, 100e6, &sqrt).unwrap();
        assert!((s - 0.0114).abs() < 1e-15);
        let off = RangingModel {
            bandwidth_scaling: BandwidthScaling::Off,
            ..m
        };
        assert_eq!(
            ranging_sigma_m(1000.0, 300e6, &off).unwrap(),
            ranging_sigma_m(1000.0, 25e6, &m).unwrap()
        );
        assert!(ranging_sigma_m(0.0, 25e6, &m).is_err());
        assert!(ranging_sigma_m(10.0, 0.0, &m).is_err());
    }

    #[test]
    fn zenith_row() {
        let anchors = vec![anchor(0.0, 0.0, 1.0); 4];
        let h = geometry_matrix(&pole(), &anchors).unwrap();
        for i in 0..4 {
            let r = h.row(i);
            assert!(r[0].abs() < 1e-15 && r[1].abs() < 1e-15);
            assert!((r[2] + 1.0).abs() < 1e-15);
            assert_eq!(r[3], 1.0);
        }
        assert!(matches!(
            solution_error(&pole(), &anchors),
            Err(Error::SingularGeometry { .. })
        ));
    }

    #[test]
    fn too_few_anchors() {
        let anchors = vec![
            anchor(0.0, 0.0, 1.0),
            anchor(5.0, 0.0, 1.0),
            anchor(5.0, 120.0, 1.0),
        ];
        assert!(matches!(
            geometry_matrix(&pole(), &anchors),
            Err(Error::InsufficientAnchors { found: 3 })
        ));
        assert!(matches!(
            solution_error(&pole(), &anchors),
            Err(Error::InsufficientAnchors { found: 3 })
        ));
    }

    #[test]
    fn coincident_anchor() {
        let mut anchors = vec![
            anchor(0.0, 0.0, 1.0),
            anchor(5.0, 0.0, 1.0),
            anchor(5.0, 120.0, 1.0),
        ];
        anchors.push(Anchor {
            position: pole(),
            ranging_sigma_m: 1.0,
        });
        assert!(matches!(
            geometry_matrix(&pole(), &anchors),
            Err(Error::DegenerateGeometry(_))
        ));
    }

    #[test]
    fn coplanar_anchors_are_singular() {
        // all satellites in the x-z plane, which contains the user
        let anchors: Vec<Anchor> = [-6.0, -3.0, 0.0, 2.0, 5.0]
            .iter()
            .map(|&t: &f64| Anchor {
                position: EcefPoint::from_spherical(
                    RE + 500.0,
                    t.abs().to_radians(),
                    if t < 0.0 { std::f64::consts::PI } else { 0.0 },
                ),
                ranging_sigma_m: 1.0,
            })
            .collect();
        assert!(matches!(
            solution_error(&pole(), &anchors),
            Err(Error::SingularGeometry { .. })
        ));
    }

    #[test]
    fn sigma_homogeneity() {
        let base = [
            anchor(0.0, 0.0, 1.0),
            anchor(6.0, 0.0, 2.0),
            anchor(6.0, 120.0, 0.5),
            anchor(6.0, 240.0, 1.5),
            anchor(3.0, 60.0, 1.0),
        ];
        let e1 = solution_error(&pole(), &base).unwrap();
        let scaled: Vec<Anchor> = base
            .iter()
            .map(|a| Anchor {
                ranging_sigma_m: a.ranging_sigma_m * 3.0,
                ..*a
            })
            .collect();
        let e3 = solution_error(&pole(), &scaled).unwrap();
        assert!((e3.positioning_error_m / e1.positioning_error_m - 3.0).abs() < 1e-12);
        assert!((e3.timing_error_s / e1.timing_error_s - 3.0).abs() < 1e-12);
    }

    #[test]
    fn covariance_symmetric_and_errors_consistent() {
        let anchors = [
            anchor(0.0, 0.0, 1.0),
            anchor(6.0, 10.0, 1.0),
            anchor(7.0, 130.0, 1.0),
            anchor(5.0, 250.0, 1.0),
        ];
        let e = solution_error(&pole(), &anchors).unwrap();
        let c = e.covariance;
        for i in 0..4 {
            for j in 0..4 {
                assert!((c[(i, j)] - c[(j, i)]).abs() <= 1e-12 * c.norm());
            }
        }
        assert!(c.cholesky().is_some());
        assert!((e.positioning_error_m - (c[(0, 0)] + c[(1, 1)] + c[(2, 2)]).sqrt()).abs() < 1e-15);
        assert!((e.timing_error_s - c[(3, 3)].sqrt() / SPEED_OF_LIGHT_M_S).abs() < 1e-24);
    }

    #[test]
    fn hybrid_with_empty_leo_is_gps_only() {
        let gps = Shell {
            radius_km: RE + 20_180.0,
            points: vec![
                EcefPoint::new(0.0, 0.0, RE + 20_180.0),
                EcefPoint::from_spherical(RE + 20_180.0, 0.5, 0.0),
            ],
        };
        let leo = Shell::empty(RE + 500.0);
        let params = HybridParams {
            leo_mask_deg: 20.0,
            gps_mask_deg: 20.0,
            ranging: RangingModel::default(),
            leo_bandwidth_hz: 300e6,
        };
        let a = hybrid_anchor_set(&pole(), &leo, &gps, &params).unwrap();
        assert_eq!(a.len(), 2);
        // zenith GPS at reference bandwidth
        assert!((a[0].ranging_sigma_m - 2.28e-8 * 20_180e3).abs() < 1e-12);
    }
}
