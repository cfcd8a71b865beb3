//! Integration regimes, the case-study parameter set, and user association.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{nearest_visible_among, EarthModel, EcefPoint, GpsConfig, Shell};
use crate::linkbudget::{LinkBudget, PathLossModel};
use crate::navigation::{BandwidthScaling, HybridParams, RangingModel};
use crate::rng::RngAlgorithm;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IntegrationLevel {
    /// Separate communication, navigation and sensing constellations.
    Traditional,
    /// Every satellite hosts all three functions, each on its own spectrum.
    FunctionLevel,
    /// Every function additionally uses the pooled spectrum.
    SignalLevel,
}

impl IntegrationLevel {
    pub const ALL: [IntegrationLevel; 3] = [
        IntegrationLevel::Traditional,
        IntegrationLevel::FunctionLevel,
        IntegrationLevel::SignalLevel,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            IntegrationLevel::Traditional => "traditional",
            IntegrationLevel::FunctionLevel => "function",
            IntegrationLevel::SignalLevel => "signal",
        }
    }

    pub fn label(self) -> &'static str {
        match self {
            IntegrationLevel::Traditional => "Traditional",
            IntegrationLevel::FunctionLevel => "Function-level",
            IntegrationLevel::SignalLevel => "Signal-level",
        }
    }

    pub fn is_integrated(self) -> bool {
        self != IntegrationLevel::Traditional
    }
}

impl fmt::Display for IntegrationLevel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for IntegrationLevel {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        match s.trim().to_ascii_lowercase().as_str() {
            "traditional" | "l0" => Ok(IntegrationLevel::Traditional),
            "function" | "function-level" | "l1" => Ok(IntegrationLevel::FunctionLevel),
            "signal" | "signal-level" | "l2" => Ok(IntegrationLevel::SignalLevel),
            other => Err(format!("unknown integration level `{other}`")),
        }
    }
}

/// Complete parameter set of a run. Each field carries the unit named by its
/// suffix, which is also its key in the configuration file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ScenarioConfig {
    pub comm_satellites: u64,
    pub nav_satellites: u64,
    pub sensing_satellites: u64,
    pub comm_bandwidth_mhz: f64,
    pub nav_bandwidth_mhz: f64,
    pub sensing_bandwidth_mhz: f64,
    pub comm_tx_power_w: f64,
    pub nav_tx_power_w: f64,
    /// Stored for completeness; no sensing computation consumes it.
    pub sensing_tx_power_w: f64,
    pub altitude_km: f64,
    pub vehicle_count: u64,
    pub cap_area_km2: f64,
    pub max_speed_kmh: f64,
    pub report_spacing_m: f64,
    pub perception_objects: u64,
    pub perception_bytes_per_object: u64,
    pub maneuver_bytes: u64,
    pub ranging_error_per_unit_distance: f64,
    pub comm_elevation_deg: f64,
    pub nav_elevation_deg: f64,
    pub sar_view_angle_deg: f64,
    pub sar_swath_km: f64,
    pub rate_threshold_mbps: f64,
    pub sensing_data_gbits: f64,
    pub sensing_delivery_bps_per_hz: f64,
    pub path_loss: PathLossModel,
    pub combined_gain_db: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    pub gps_enabled: bool,
    pub gps: GpsConfig,
    pub gps_elevation_deg: f64,
    pub ranging_bandwidth_scaling: BandwidthScaling,
    pub ranging_reference_bandwidth_mhz: f64,
    pub fusion_factor: u32,
    /// Whether co-illuminating satellites also divide the revisit sweep.
    pub fusion_halves_revisit: bool,
    pub sar_antenna_length_m: f64,
    pub earth: EarthModel,
    pub rng: RngAlgorithm,
}

impl Default for ScenarioConfig {
    fn default() -> Self {
        Self {
            comm_satellites: 4500,
            nav_satellites: 250,
            sensing_satellites: 250,
            comm_bandwidth_mhz: 250.0,
            nav_bandwidth_mhz: 25.0,
            sensing_bandwidth_mhz: 25.0,
            comm_tx_power_w: 20.0,
            nav_tx_power_w: 20.0,
            sensing_tx_power_w: 80.0,
            altitude_km: 500.0,
            vehicle_count: 1400,
            cap_area_km2: 7.36e5,
            max_speed_kmh: 108.0,
            report_spacing_m: 3.0,
            perception_objects: 100,
            perception_bytes_per_object: 80,
            maneuver_bytes: 500,
            ranging_error_per_unit_distance: 2.28e-8,
            comm_elevation_deg: 60.0,
            nav_elevation_deg: 20.0,
            sar_view_angle_deg: 30.0,
            sar_swath_km: 20.0,
            rate_threshold_mbps: 0.7,
            sensing_data_gbits: 360.0,
            sensing_delivery_bps_per_hz: 1.0,
            path_loss: PathLossModel::default(),
            combined_gain_db: 55.0,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 7.0,
            gps_enabled: true,
            gps: GpsConfig::default(),
            gps_elevation_deg: 20.0,
            ranging_bandwidth_scaling: BandwidthScaling::Linear,
            ranging_reference_bandwidth_mhz: 25.0,
            fusion_factor: 2,
            fusion_halves_revisit: false,
            sar_antenna_length_m: 10.0,
            earth: EarthModel::default(),
            rng: RngAlgorithm::ChaCha8,
        }
    }
}

impl ScenarioConfig {
    pub fn rate_threshold_bps(&self) -> f64 {
        self.rate_threshold_mbps * 1e6
    }

    pub fn sensing_data_bits(&self) -> f64 {
        self.sensing_data_gbits * 1e9
    }

    pub fn orbit_radius_km(&self) -> f64 {
        self.earth.radius_km + self.altitude_km
    }

    pub fn ranging_model(&self) -> RangingModel {
        RangingModel {
            per_unit_distance_coeff: self.ranging_error_per_unit_distance,
            bandwidth_scaling: self.ranging_bandwidth_scaling,
            reference_bandwidth_hz: self.ranging_reference_bandwidth_mhz * 1e6,
        }
    }

    pub fn hybrid_params(&self, nav_bandwidth_hz: f64) -> HybridParams {
        HybridParams {
            leo_mask_deg: self.nav_elevation_deg,
            gps_mask_deg: self.gps_elevation_deg,
            ranging: self.ranging_model(),
            leo_bandwidth_hz: nav_bandwidth_hz,
        }
    }

    /// Downlink budget of a communication link at `distance_km` with a
    /// per-user allocation of `bandwidth_hz`.
    pub fn comm_budget(&self, distance_km: f64, bandwidth_hz: f64) -> LinkBudget {
        LinkBudget {
            tx_power_w: self.comm_tx_power_w,
            combined_gain_db: self.combined_gain_db,
            noise_psd_dbm_hz: self.noise_psd_dbm_hz,
            noise_figure_db: self.noise_figure_db,
            bandwidth_hz,
            distance_km,
            path_loss: self.path_loss,
        }
    }

    /// Co-illumination factor used by `level`.
    pub fn sar_fusion(&self, level: IntegrationLevel) -> u32 {
        if level.is_integrated() {
            self.fusion_factor
        } else {
            1
        }
    }

    pub fn safety_message_rate_bps(&self) -> Result<f64> {
        safety_message_rate_bps(
            self.max_speed_kmh * 1000.0 / 3600.0,
            self.report_spacing_m,
            self.perception_objects,
            self.perception_bytes_per_object,
            self.maneuver_bytes,
        )
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FunctionResources {
    pub satellites: u64,
    pub bandwidth_hz: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RegimeResources {
    pub comm: FunctionResources,
    pub nav: FunctionResources,
    pub sensing: FunctionResources,
}

/// Satellites and spectrum seen by each function under `level`.
pub fn build_regime(level: IntegrationLevel, config: &ScenarioConfig) -> RegimeResources {
    let separate = |satellites, bandwidth_hz| FunctionResources {
        satellites,
        bandwidth_hz,
    };
    let total_sats = config.comm_satellites + config.nav_satellites + config.sensing_satellites;
    let comm_hz = config.comm_bandwidth_mhz * 1e6;
    let nav_hz = config.nav_bandwidth_mhz * 1e6;
    let sensing_hz = config.sensing_bandwidth_mhz * 1e6;
    let total_bw =
        (config.comm_bandwidth_mhz + config.nav_bandwidth_mhz + config.sensing_bandwidth_mhz) * 1e6;
    match level {
        IntegrationLevel::Traditional => RegimeResources {
            comm: separate(config.comm_satellites, comm_hz),
            nav: separate(config.nav_satellites, nav_hz),
            sensing: separate(config.sensing_satellites, sensing_hz),
        },
        IntegrationLevel::FunctionLevel => RegimeResources {
            comm: separate(total_sats, comm_hz),
            nav: separate(total_sats, nav_hz),
            sensing: separate(total_sats, sensing_hz),
        },
        IntegrationLevel::SignalLevel => RegimeResources {
            comm: separate(total_sats, total_bw),
            nav: separate(total_sats, total_bw),
            sensing: separate(total_sats, total_bw),
        },
    }
}

/// Bit rate needed to send one perception-and-maneuver report every
/// `report_spacing_m` at `speed_m_s`.
pub fn safety_message_rate_bps(
    speed_m_s: f64,
    report_spacing_m: f64,
    perception_objects: u64,
    bytes_per_object: u64,
    maneuver_bytes: u64,
) -> Result<f64> {
    if !(speed_m_s > 0.0) {
        return Err(Error::invalid("speed_m_s", "must be positive"));
    }
    if !(report_spacing_m > 0.0) {
        return Err(Error::invalid("report_spacing_m", "must be positive"));
    }
    let bits = ((perception_objects * bytes_per_object + maneuver_bytes) * 8) as f64;
    Ok(bits * speed_m_s / report_spacing_m)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Association {
    pub satellite: Option<usize>,
    pub slant_range_km: f64,
    pub bandwidth_hz: f64,
}

impl Association {
    const NONE: Association = Association {
        satellite: None,
        slant_range_km: f64::NAN,
        bandwidth_hz: 0.0,
    };
}

#[derive(Debug, Clone, PartialEq)]
pub struct AssociationMap {
    pub vehicles: Vec<Association>,
}

impl AssociationMap {
    pub fn covered(&self) -> usize {
        self.vehicles
            .iter()
            .filter(|a| a.satellite.is_some())
            .count()
    }

    /// Same serving satellites with every share rescaled to a new
    /// per-satellite bandwidth.
    pub fn with_bandwidth(&self, from_hz: f64, to_hz: f64) -> AssociationMap {
        let k = to_hz / from_hz;
        AssociationMap {
            vehicles: self
                .vehicles
                .iter()
                .map(|a| Association {
                    bandwidth_hz: a.bandwidth_hz * k,
                    ..*a
                })
                .collect(),
        }
    }
}

/// Nearest-visible association with an equal split of each satellite's
/// bandwidth among the vehicles it serves.
pub fn associate_and_allocate(
    vehicles: &[EcefPoint],
    comm_shell: &Shell,
    mask_deg: f64,
    regime: &RegimeResources,
) -> AssociationMap {
    associate_among(
        vehicles,
        comm_shell,
        &(0..comm_shell.count()).collect::<Vec<_>>(),
        mask_deg,
        regime.comm.bandwidth_hz,
    )
}

/// As [`associate_and_allocate`], scanning only `candidates`.
pub fn associate_among(
    vehicles: &[EcefPoint],
    comm_shell: &Shell,
    candidates: &[usize],
    mask_deg: f64,
    satellite_bandwidth_hz: f64,
) -> AssociationMap {
    let mut load = vec![0u32; comm_shell.count()];
    let mut serving: Vec<Option<(usize, f64)>> = Vec::with_capacity(vehicles.len());
    for v in vehicles {
        let best = nearest_visible_among(v, comm_shell, candidates.iter().copied(), mask_deg);
        if let Some((i, _)) = best {
            load[i] += 1;
        }
        serving.push(best);
    }
    AssociationMap {
        vehicles: serving
            .into_iter()
            .map(|s| match s {
                Some((i, d)) => Association {
                    satellite: Some(i),
                    slant_range_km: d,
                    bandwidth_hz: satellite_bandwidth_hz / load[i] as f64,
                },
                None => Association::NONE,
            })
            .collect(),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const RE: f64 = 6371.0;

    #[test]
    fn regimes() {
        let c = ScenarioConfig::default();
        let t = build_regime(IntegrationLevel::Traditional, &c);
        assert_eq!((t.comm.satellites, t.comm.bandwidth_hz), (4500, 250e6));
        assert_eq!((t.nav.satellites, t.nav.bandwidth_hz), (250, 25e6));
        assert_eq!((t.sensing.satellites, t.sensing.bandwidth_hz), (250, 25e6));
        let f = build_regime(IntegrationLevel::FunctionLevel, &c);
        assert_eq!((f.nav.satellites, f.nav.bandwidth_hz), (5000, 25e6));
        assert_eq!((f.comm.satellites, f.comm.bandwidth_hz), (5000, 250e6));
        let s = build_regime(IntegrationLevel::SignalLevel, &c);
        assert_eq!(
            (s.sensing.satellites, s.sensing.bandwidth_hz),
            (5000, 300e6)
        );
        assert_eq!((s.comm.satellites, s.comm.bandwidth_hz), (5000, 300e6));
    }

    #[test]
    fn level_dominance() {
        let c = ScenarioConfig::default();
        let [t, f, s] = IntegrationLevel::ALL.map(|l| build_regime(l, &c));
        for (a, b) in [(t.comm, f.comm), (t.nav, f.nav), (t.sensing, f.sensing)] {
            assert!(b.satellites >= a.satellites && b.bandwidth_hz >= a.bandwidth_hz);
        }
        for (a, b) in [(f.comm, s.comm), (f.nav, s.nav), (f.sensing, s.sensing)] {
            assert!(b.bandwidth_hz >= a.bandwidth_hz);
        }
    }

    #[test]
    fn safety_rate() {
        assert_eq!(
            safety_message_rate_bps(30.0, 3.0, 100, 80, 500).unwrap(),
            680_000.0
        );
        assert_eq!(
            safety_message_rate_bps(15.0, 3.0, 100, 80, 500).unwrap(),
            340_000.0
        );
        assert_eq!(
            safety_message_rate_bps(30.0, 3.0, 0, 80, 500).unwrap(),
            40_000.0
        );
        let c = ScenarioConfig::default();
        let r = c.safety_message_rate_bps().unwrap();
        assert_eq!(r, 680_000.0);
        assert!(r < c.rate_threshold_bps());
        assert!(safety_message_rate_bps(0.0, 3.0, 1, 1, 1).is_err());
    }

    #[test]
    fn level_names_round_trip() {
        for l in IntegrationLevel::ALL {
            assert_eq!(l.as_str().parse::<IntegrationLevel>().unwrap(), l);
        }
        assert!("l3".parse::<IntegrationLevel>().is_err());
    }

    fn one_sat_regime(bw: f64) -> RegimeResources {
        let r = FunctionResources {
            satellites: 1,
            bandwidth_hz: bw,
        };
        RegimeResources {
            comm: r,
            nav: r,
            sensing: r,
        }
    }

    #[test]
    fn single_satellite_shares() {
        let shell = Shell {
            radius_km: RE + 500.0,
            points: vec![EcefPoint::new(0.0, 0.0, RE + 500.0)],
        };
        let v = [EcefPoint::new(0.0, 0.0, RE)];
        let m = associate_and_allocate(&v, &shell, 60.0, &one_sat_regime(250e6));
        assert_eq!(m.vehicles[0].satellite, Some(0));
        assert_eq!(m.vehicles[0].bandwidth_hz, 250e6);

        let v2 = [
            EcefPoint::new(0.0, 0.0, RE),
            EcefPoint::from_spherical(RE, 0.001, 0.0),
        ];
        let m = associate_and_allocate(&v2, &shell, 60.0, &one_sat_regime(250e6));
        assert!(m.vehicles.iter().all(|a| a.bandwidth_hz == 125e6));
    }

    #[test]
    fn uncovered_vehicle_has_no_share() {
        let shell = Shell {
            radius_km: RE + 500.0,
            points: vec![EcefPoint::from_spherical(RE + 500.0, 0.3, 0.0)],
        };
        let v = [EcefPoint::new(0.0, 0.0, RE)];
        let m = associate_and_allocate(&v, &shell, 60.0, &one_sat_regime(250e6));
        assert_eq!(m.vehicles[0].satellite, None);
        assert_eq!(m.vehicles[0].bandwidth_hz, 0.0);
        assert_eq!(m.covered(), 0);
    }
}
