//! Seeded Monte Carlo trials over the integration levels.
//!
//! A trial draws vehicle positions, one shell per traditional function, the
//! GPS shell and one unit-mean fading draw per vehicle. The integrated
//! constellation is the concatenation of the three traditional shells, so
//! every level of a trial sees the same satellites and the same fading, and
//! cross-level differences come from the regime alone.

use rayon::prelude::*;

use crate::config::fingerprint;
use crate::error::{Error, Result};
use crate::geometry::{
    cap_half_angle, coverage_central_angle_deg, for_each_visible, gps_shell, sample_cap_users,
    sample_uniform_sphere, EcefPoint, Shell,
};
use crate::linkbudget::{
    ergodic_capacity_bps, mean_snr_linear, outage_probability, shannon_rate_bps,
};
use crate::navigation::{Information, RangingModel};
use crate::report::{summarize, MetricsReport};
use crate::rng::{derive_trial_seed, exp1, SimRng, Stream};
use crate::scenario::{
    associate_among, build_regime, AssociationMap, IntegrationLevel, ScenarioConfig,
};
use crate::sensing::{
    aoi_s, download_time_s, range_resolution_with_c, revisit_time_s, SensingMetrics,
};

/// Margin added to pruning angles so that rounding never drops a candidate.
const PRUNE_MARGIN_RAD: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialMetrics {
    /// Fraction of vehicles whose faded rate misses the threshold.
    pub outage_probability: f64,
    /// Mean over vehicles of the closed-form outage at each link's mean SNR.
    pub outage_closed_form: f64,
    pub ergodic_capacity_bps: f64,
    /// Mean over vehicles with a valid fix; `None` when no vehicle has one.
    pub positioning_error_m: Option<f64>,
    pub timing_error_s: Option<f64>,
    pub nav_availability: f64,
    pub range_resolution_m: f64,
    pub aoi_s: f64,
}

/// Closed-form sensing figures of `level`.
pub fn sensing_metrics(level: IntegrationLevel, config: &ScenarioConfig) -> Result<SensingMetrics> {
    let regime = build_regime(level, config);
    let fusion = config.sar_fusion(level);
    let revisit_fusion = if config.fusion_halves_revisit {
        fusion
    } else {
        1
    };
    let range_resolution_m = range_resolution_with_c(
        regime.sensing.bandwidth_hz,
        config.sar_view_angle_deg,
        fusion,
        config.earth.speed_of_light_m_s,
    )?;
    let revisit = revisit_time_s(
        regime.sensing.satellites,
        config.sar_swath_km,
        config.altitude_km,
        &config.earth,
        revisit_fusion,
    )?;
    let download = download_time_s(
        config.sensing_data_bits(),
        config.sensing_delivery_bps_per_hz,
        regime.sensing.bandwidth_hz,
    )?;
    Ok(SensingMetrics {
        range_resolution_m,
        azimuth_resolution_m: crate::sensing::azimuth_resolution_m(config.sar_antenna_length_m)?,
        revisit_time_s: revisit,
        download_time_s: download,
        aoi_s: aoi_s(revisit, download)?,
    })
}

struct TrialDraws {
    vehicles: Vec<EcefPoint>,
    comm: Shell,
    nav: Shell,
    sensing: Shell,
    gps: Shell,
    fading: Vec<f64>,
}

fn shell_or_empty(count: u64, radius_km: f64, rng: &mut SimRng) -> Result<Shell> {
    if count == 0 {
        Ok(Shell::empty(radius_km))
    } else {
        sample_uniform_sphere(count as usize, radius_km, rng)
    }
}

fn draw(config: &ScenarioConfig, trial_seed: u64) -> Result<TrialDraws> {
    let stream = |s| SimRng::for_trial(config.rng, trial_seed, s);
    let radius = config.orbit_radius_km();
    let n = config.vehicle_count as usize;
    let vehicles = sample_cap_users(
        n,
        config.cap_area_km2,
        &config.earth,
        &mut stream(Stream::Vehicles),
    )?;
    let comm = shell_or_empty(
        config.comm_satellites,
        radius,
        &mut stream(Stream::CommShell),
    )?;
    let nav = shell_or_empty(config.nav_satellites, radius, &mut stream(Stream::NavShell))?;
    let sensing = shell_or_empty(
        config.sensing_satellites,
        radius,
        &mut stream(Stream::SensingShell),
    )?;
    let gps = if config.gps_enabled {
        gps_shell(&config.gps, &config.earth, &mut stream(Stream::Gps))?
    } else {
        Shell::empty(config.earth.radius_km + config.gps.altitude_km)
    };
    let mut fading_rng = stream(Stream::Fading);
    let fading = (0..n).map(|_| exp1(&mut fading_rng)).collect();
    Ok(TrialDraws {
        vehicles,
        comm,
        nav,
        sensing,
        gps,
        fading,
    })
}

/// Ranging equations of the satellites of `shell` visible from `user`, at
/// the reference bandwidth.
fn equations(
    user: &EcefPoint,
    shell: &Shell,
    candidates: impl IntoIterator<Item = usize>,
    mask_deg: f64,
    ranging: &RangingModel,
) -> Information {
    // sigma at the reference bandwidth; the coefficient is validated positive
    // and visible satellites have positive range
    let per_km = ranging.per_unit_distance_coeff * 1000.0;
    let mut info = Information::new();
    for_each_visible(user, shell, candidates, mask_deg, |i, d| {
        info.add_visible(user, &shell.points[i], d, per_km * d);
    });
    info
}

/// Per-vehicle ranging equations of one LEO shell at the reference
/// bandwidth. Every LEO variance scales by the same bandwidth factor, so a
/// level's information is `gps + leo / factor^2`.
struct NavView {
    leo: Vec<Information>,
}

struct TrialContext<'a> {
    config: &'a ScenarioConfig,
    draws: TrialDraws,
    icnr: Option<Shell>,
    gps_info: Vec<Information>,
    comm_prune_rad: f64,
    nav_prune_rad: f64,
}

impl<'a> TrialContext<'a> {
    fn new(config: &'a ScenarioConfig, trial_seed: u64, integrated: bool) -> Result<Self> {
        let draws = draw(config, trial_seed)?;
        let icnr = if integrated {
            Some(Shell::union(&[&draws.comm, &draws.nav, &draws.sensing])?)
        } else {
            None
        };
        let ranging = config.ranging_model();
        let gps_info = draws
            .vehicles
            .iter()
            .map(|v| {
                equations(
                    v,
                    &draws.gps,
                    0..draws.gps.count(),
                    config.gps_elevation_deg,
                    &ranging,
                )
            })
            .collect();
        let cap = cap_half_angle(config.cap_area_km2, &config.earth)?;
        let re = config.earth.radius_km;
        let r = config.orbit_radius_km();
        Ok(Self {
            config,
            draws,
            icnr,
            gps_info,
            comm_prune_rad: cap
                + coverage_central_angle_deg(config.comm_elevation_deg, re, r).to_radians()
                + PRUNE_MARGIN_RAD,
            nav_prune_rad: cap
                + coverage_central_angle_deg(config.nav_elevation_deg, re, r).to_radians()
                + PRUNE_MARGIN_RAD,
        })
    }

    fn comm_shell(&self, level: IntegrationLevel) -> &Shell {
        match (level.is_integrated(), &self.icnr) {
            (true, Some(s)) => s,
            _ => &self.draws.comm,
        }
    }

    fn nav_shell(&self, level: IntegrationLevel) -> &Shell {
        match (level.is_integrated(), &self.icnr) {
            (true, Some(s)) => s,
            _ => &self.draws.nav,
        }
    }

    /// Association with unit satellite bandwidth; shares are fractions.
    fn associate(&self, shell: &Shell) -> AssociationMap {
        let center = self.config.earth.north_pole();
        let candidates = shell.indices_within(&center, self.comm_prune_rad);
        associate_among(
            &self.draws.vehicles,
            shell,
            &candidates,
            self.config.comm_elevation_deg,
            1.0,
        )
    }

    fn nav_view(&self, shell: &Shell) -> NavView {
        let center = self.config.earth.north_pole();
        let candidates = shell.indices_within(&center, self.nav_prune_rad);
        let ranging = self.config.ranging_model();
        let leo = self
            .draws
            .vehicles
            .iter()
            .map(|v| {
                equations(
                    v,
                    shell,
                    candidates.iter().copied(),
                    self.config.nav_elevation_deg,
                    &ranging,
                )
            })
            .collect();
        NavView { leo }
    }

    fn comm_metrics(&self, assoc: &AssociationMap, bandwidth_hz: f64) -> Result<(f64, f64, f64)> {
        let rate = self.config.rate_threshold_bps();
        let n = self.draws.vehicles.len() as f64;
        let (mut outage, mut closed, mut capacity) = (0.0, 0.0, 0.0);
        for (a, fade) in assoc.vehicles.iter().zip(&self.draws.fading) {
            if a.satellite.is_none() {
                outage += 1.0;
                closed += 1.0;
                continue;
            }
            let share = bandwidth_hz * a.bandwidth_hz;
            let snr = mean_snr_linear(&self.config.comm_budget(a.slant_range_km, share))?;
            if shannon_rate_bps(share, snr * fade) < rate {
                outage += 1.0;
            }
            closed += outage_probability(snr, share, rate)?;
            capacity += ergodic_capacity_bps(snr, share)?;
        }
        Ok((outage / n, closed / n, capacity / n))
    }

    fn nav_metrics(
        &self,
        view: &NavView,
        nav_bandwidth_hz: f64,
    ) -> Result<(Option<f64>, Option<f64>, f64)> {
        if !(nav_bandwidth_hz > 0.0) {
            return Err(Error::invalid("nav_bandwidth_hz", "must be positive"));
        }
        let factor = self
            .config
            .ranging_model()
            .bandwidth_factor(nav_bandwidth_hz);
        let weight = 1.0 / (factor * factor);
        let c = self.config.earth.speed_of_light_m_s;
        let (mut pos, mut tim, mut ok) = (0.0, 0.0, 0usize);
        for (leo, gps) in view.leo.iter().zip(&self.gps_info) {
            match gps.combined(leo, weight).solve(c) {
                Ok(fix) => {
                    pos += fix.positioning_error_m;
                    tim += fix.timing_error_s;
                    ok += 1;
                }
                Err(Error::InsufficientAnchors { .. })
                | Err(Error::SingularGeometry { .. })
                | Err(Error::DegenerateGeometry(_)) => {}
                Err(e) => return Err(e),
            }
        }
        let n = self.draws.vehicles.len() as f64;
        let mean = |s: f64| (ok > 0).then(|| s / ok as f64);
        Ok((mean(pos), mean(tim), ok as f64 / n))
    }
}

/// Evaluate `levels` on one shared draw. Results follow the order of `levels`.
pub fn run_paired_trial(
    levels: &[IntegrationLevel],
    config: &ScenarioConfig,
    trial_seed: u64,
) -> Result<Vec<TrialMetrics>> {
    let sensing: Vec<SensingMetrics> = levels
        .iter()
        .map(|&l| sensing_metrics(l, config))
        .collect::<Result<_>>()?;
    let integrated = levels.iter().any(|l| l.is_integrated());
    let ctx = TrialContext::new(config, trial_seed, integrated)?;

    // index 0: traditional shells, index 1: integrated shell
    let mut assoc: [Option<AssociationMap>; 2] = [None, None];
    let mut views: [Option<NavView>; 2] = [None, None];

    let mut out = Vec::with_capacity(levels.len());
    for (&level, sense) in levels.iter().zip(&sensing) {
        let slot = level.is_integrated() as usize;
        let regime = build_regime(level, config);

        let comm_shell = ctx.comm_shell(level);
        let a = assoc[slot].get_or_insert_with(|| ctx.associate(comm_shell));
        let (outage, closed, capacity) = ctx.comm_metrics(a, regime.comm.bandwidth_hz)?;

        let nav_shell = ctx.nav_shell(level);
        let view = match &mut views[slot] {
            Some(v) => v,
            slot_view => slot_view.insert(ctx.nav_view(nav_shell)),
        };
        let (pos, tim, avail) = ctx.nav_metrics(view, regime.nav.bandwidth_hz)?;

        out.push(TrialMetrics {
            outage_probability: outage,
            outage_closed_form: closed,
            ergodic_capacity_bps: capacity,
            positioning_error_m: pos,
            timing_error_s: tim,
            nav_availability: avail,
            range_resolution_m: sense.range_resolution_m,
            aoi_s: sense.aoi_s,
        });
    }
    Ok(out)
}

pub fn run_trial(
    level: IntegrationLevel,
    config: &ScenarioConfig,
    trial_seed: u64,
) -> Result<TrialMetrics> {
    Ok(run_paired_trial(&[level], config, trial_seed)?.remove(0))
}

fn check_levels(levels: &[IntegrationLevel]) -> Result<()> {
    if levels.is_empty() {
        return Err(Error::invalid(
            "levels",
            "at least one integration level is required",
        ));
    }
    for (i, l) in levels.iter().enumerate() {
        if levels[..i].contains(l) {
            return Err(Error::invalid("levels", format!("`{l}` listed twice")));
        }
    }
    Ok(())
}

/// All trials of an experiment, indexed `[trial][level]`. Trials run on the
/// current rayon pool; results are returned in trial order.
pub fn run_trials(
    levels: &[IntegrationLevel],
    config: &ScenarioConfig,
    trials: u64,
    master_seed: u64,
) -> Result<Vec<Vec<TrialMetrics>>> {
    if trials == 0 {
        return Err(Error::invalid("trials", "must be at least 1"));
    }
    check_levels(levels)?;
    config.validate()?;
    (0..trials)
        .into_par_iter()
        .map(|i| run_paired_trial(levels, config, derive_trial_seed(master_seed, i)))
        .collect()
}

pub fn run_experiment(
    levels: &[IntegrationLevel],
    config: &ScenarioConfig,
    trials: u64,
    master_seed: u64,
) -> Result<MetricsReport> {
    let per_trial = run_trials(levels, config, trials, master_seed)?;
    let sensing: Vec<SensingMetrics> = levels
        .iter()
        .map(|&l| sensing_metrics(l, config))
        .collect::<Result<_>>()?;
    Ok(summarize(
        levels,
        &per_trial,
        &sensing,
        master_seed,
        config.rng,
        fingerprint(config),
    ))
}
