//! Noise-limited downlink budget with Rayleigh block fading.
//!
//! The instantaneous SNR of a link is exponential with mean set by the
//! large-scale budget; achievable rate is the Shannon rate `B log2(1 + snr)`.

use std::f64::consts::LN_2;

use rand::RngCore;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::integrate_half_line;
use crate::rng::exp1;

/// Relative tolerance of the ergodic-capacity quadrature.
pub const ERGODIC_RTOL: f64 = 1e-9;

/// Log-distance large-scale fading, distance in kilometers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PathLossModel {
    pub intercept_db: f64,
    pub slope_db: f64,
}

impl Default for PathLossModel {
    fn default() -> Self {
        Self {
            intercept_db: 110.0,
            slope_db: 37.6,
        }
    }
}

impl PathLossModel {
    pub fn loss_db(&self, distance_km: f64) -> Result<f64> {
        if !(distance_km > 0.0) {
            return Err(Error::invalid("distance_km", "must be positive"));
        }
        Ok(self.intercept_db + self.slope_db * distance_km.log10())
    }
}

/// `110 + 37.6 log10(d)` with `d` in km.
pub fn path_loss_db(distance_km: f64) -> Result<f64> {
    PathLossModel::default().loss_db(distance_km)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LinkBudget {
    pub tx_power_w: f64,
    /// Transmit plus receive antenna gain.
    pub combined_gain_db: f64,
    pub noise_psd_dbm_hz: f64,
    pub noise_figure_db: f64,
    /// Bandwidth allocated to this user.
    pub bandwidth_hz: f64,
    pub distance_km: f64,
    pub path_loss: PathLossModel,
}

impl LinkBudget {
    fn validate(&self) -> Result<()> {
        if !(self.tx_power_w > 0.0) {
            return Err(Error::invalid("tx_power_w", "must be positive"));
        }
        if !(self.bandwidth_hz > 0.0) {
            return Err(Error::invalid("bandwidth_hz", "must be positive"));
        }
        if !(self.distance_km > 0.0) {
            return Err(Error::invalid("distance_km", "must be positive"));
        }
        Ok(())
    }

    /// Received SNR in dB before fading.
    pub fn mean_snr_db(&self) -> Result<f64> {
        self.validate()?;
        let ptx_dbm = 10.0 * (self.tx_power_w * 1000.0).log10();
        let pl = self.path_loss.loss_db(self.distance_km)?;
        Ok(ptx_dbm + self.combined_gain_db
            - pl
            - self.noise_psd_dbm_hz
            - self.noise_figure_db
            - 10.0 * self.bandwidth_hz.log10())
    }
}

pub fn mean_snr_linear(budget: &LinkBudget) -> Result<f64> {
    Ok(10f64.powf(budget.mean_snr_db()? / 10.0))
}

pub fn shannon_rate_bps(bandwidth_hz: f64, snr: f64) -> f64 {
    bandwidth_hz * snr.ln_1p() / LN_2
}

fn check_snr_bandwidth(mean_snr: f64, bandwidth_hz: f64) -> Result<()> {
    if !(mean_snr > 0.0) {
        return Err(Error::invalid("mean_snr", "must be positive"));
    }
    if !(bandwidth_hz > 0.0) {
        return Err(Error::invalid("bandwidth_hz", "must be positive"));
    }
    Ok(())
}

/// SNR below which the Shannon rate over `bandwidth_hz` misses `rate_bps`.
pub fn snr_threshold(bandwidth_hz: f64, rate_bps: f64) -> f64 {
    (rate_bps / bandwidth_hz * LN_2).exp_m1()
}

/// Probability that a Rayleigh-faded link with the given mean SNR cannot
/// carry `rate_threshold_bps`.
pub fn outage_probability(
    mean_snr: f64,
    bandwidth_hz: f64,
    rate_threshold_bps: f64,
) -> Result<f64> {
    check_snr_bandwidth(mean_snr, bandwidth_hz)?;
    if !(rate_threshold_bps >= 0.0) {
        return Err(Error::invalid("rate_threshold_bps", "must be non-negative"));
    }
    let g = snr_threshold(bandwidth_hz, rate_threshold_bps);
    Ok((-(-g / mean_snr).exp_m1()).clamp(0.0, 1.0))
}

/// `e^x E1(x)` for `x > 0`: power series below 1, continued fraction above.
pub fn scaled_exp_integral(x: f64) -> f64 {
    const EULER_GAMMA: f64 = 0.577_215_664_901_532_9;
    if x <= 1.0 {
        // E1(x) = -gamma - ln x - sum (-x)^k / (k k!)
        let mut term = 1.0;
        let mut sum = 0.0;
        for k in 1..60 {
            term *= -x / k as f64;
            let t = term / k as f64;
            sum += t;
            if t.abs() < 1e-17 * sum.abs() {
                break;
            }
        }
        (-EULER_GAMMA - x.ln() - sum) * x.exp()
    } else {
        // modified Lentz on 1/(x+1 - 1/(x+3 - 4/(x+5 - ...)))
        let tiny = 1e-300;
        let mut b = x + 1.0;
        let mut c = 1.0 / tiny;
        let mut d = 1.0 / b;
        let mut h = d;
        for i in 1..1000 {
            let a = -((i * i) as f64);
            b += 2.0;
            d = 1.0 / (a * d + b);
            c = b + a / c;
            let delta = c * d;
            h *= delta;
            if (delta - 1.0).abs() < 1e-16 {
                break;
            }
        }
        h
    }
}

/// Fading-averaged Shannon rate, `B E[log2(1 + snr)]`, from the closed form
/// `B e^(1/s) E1(1/s) / ln 2`.
pub fn ergodic_capacity_bps(mean_snr: f64, bandwidth_hz: f64) -> Result<f64> {
    check_snr_bandwidth(mean_snr, bandwidth_hz)?;
    Ok(bandwidth_hz * scaled_exp_integral(1.0 / mean_snr) / LN_2)
}

/// The same average by adaptive quadrature of `ln(1 + s x) e^-x`.
pub fn ergodic_capacity_quadrature_bps(mean_snr: f64, bandwidth_hz: f64) -> Result<f64> {
    check_snr_bandwidth(mean_snr, bandwidth_hz)?;
    let nats = integrate_half_line(|x| (mean_snr * x).ln_1p() * (-x).exp(), ERGODIC_RTOL);
    Ok(bandwidth_hz * nats / LN_2)
}

/// One exponential SNR sample with the given mean.
pub fn draw_instantaneous_snr<R: RngCore + ?Sized>(mean_snr: f64, rng: &mut R) -> f64 {
    mean_snr * exp1(rng)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CapacityStats {
    pub mean_snr_linear: f64,
    pub outage_probability: f64,
    pub ergodic_capacity_bps: f64,
}

pub fn capacity_stats(budget: &LinkBudget, rate_threshold_bps: f64) -> Result<CapacityStats> {
    let snr = mean_snr_linear(budget)?;
    Ok(CapacityStats {
        mean_snr_linear: snr,
        outage_probability: outage_probability(snr, budget.bandwidth_hz, rate_threshold_bps)?,
        ergodic_capacity_bps: ergodic_capacity_bps(snr, budget.bandwidth_hz)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::SimRng;

    fn budget(distance_km: f64, bandwidth_hz: f64) -> LinkBudget {
        LinkBudget {
            tx_power_w: 20.0,
            combined_gain_db: 55.0,
            noise_psd_dbm_hz: -174.0,
            noise_figure_db: 7.0,
            bandwidth_hz,
            distance_km,
            path_loss: PathLossModel::default(),
        }
    }

    #[test]
    fn path_loss_examples() {
        assert_eq!(path_loss_db(1.0).unwrap(), 110.0);
        assert!((path_loss_db(1000.0).unwrap() - 222.8).abs() < 1e-9);
        assert!((path_loss_db(500.0).unwrap() - 211.48).abs() < 5e-3);
        assert!(path_loss_db(0.0).is_err());
        assert!(path_loss_db(-3.0).is_err());
    }

    #[test]
    fn snr_hand_budget() {
        // 43.0103 + 55 - 110 + 174 - 7 - 0 = 155.0103 dB
        let s = mean_snr_linear(&budget(1.0, 1.0)).unwrap();
        let expected = 10f64.powf((10.0 * 20_000f64.log10() + 55.0 - 110.0 + 174.0 - 7.0) / 10.0);
        assert!((s / expected - 1.0).abs() < 1e-12);
        assert!((s.log10() - 15.501).abs() < 1e-3);

        // 43.0103 + 55 - 213.3319 + 174 - 7 - 60.9691 = -9.2907 dB
        let far = mean_snr_linear(&budget(560.0, 1.25e6)).unwrap();
        assert!((10.0 * far.log10() - (-9.2907)).abs() < 1e-3, "{far}");
    }

    #[test]
    fn doubling_bandwidth_halves_snr() {
        let a = mean_snr_linear(&budget(700.0, 1e6)).unwrap();
        let b = mean_snr_linear(&budget(700.0, 2e6)).unwrap();
        assert!((a / b - 2.0).abs() < 1e-12);
    }

    #[test]
    fn budget_rejects_bad_fields() {
        let mut b = budget(700.0, 1e6);
        b.tx_power_w = 0.0;
        assert!(mean_snr_linear(&b).is_err());
        let mut b = budget(700.0, 1e6);
        b.bandwidth_hz = -1.0;
        assert!(mean_snr_linear(&b).is_err());
        assert!(mean_snr_linear(&budget(0.0, 1e6)).is_err());
    }

    #[test]
    fn outage_examples() {
        assert_eq!(outage_probability(1.0, 1e6, 0.0).unwrap(), 0.0);
        let p = outage_probability(1.0, 1e6, 0.7e6).unwrap();
        let expected = 1.0 - (-(2f64.powf(0.7) - 1.0)).exp();
        assert!((p - expected).abs() < 1e-15);
        assert!((p - 0.4645).abs() < 1e-4);
        let mut last = 1.0;
        for k in 0..10 {
            let q = outage_probability(10f64.powi(k), 1e6, 0.7e6).unwrap();
            assert!(q <= last);
            last = q;
        }
        assert!(last < 1e-8);
        assert!(outage_probability(0.0, 1e6, 1.0).is_err());
        assert!(outage_probability(1.0, 0.0, 1.0).is_err());
        assert!(outage_probability(1.0, 1.0, -1.0).is_err());
    }

    #[test]
    fn ergodic_examples() {
        let c1 = ergodic_capacity_bps(1.0, 1.0).unwrap();
        assert!((c1 - 0.8603).abs() < 1e-4);
        let c10 = ergodic_capacity_bps(10.0, 1.0).unwrap();
        // e^0.1 E1(0.1) / ln 2
        assert!((c10 - 2.906_514_8).abs() < 1e-6, "{c10}");
        let small = ergodic_capacity_bps(1.0, 1e-6).unwrap();
        assert!((small / c1 - 1e-6).abs() < 1e-15);
        assert!(ergodic_capacity_bps(0.0, 1.0).is_err());
        assert!(ergodic_capacity_quadrature_bps(0.0, 1.0).is_err());
    }

    #[test]
    fn exponential_integral_table() {
        for (x, e1) in [
            (1e-3, 6.331_539_364_136_149),
            (0.1, 1.822_923_958_419_390_6),
            (1.0, 0.219_383_934_395_520_5),
            (2.0, 0.048_900_510_708_061_125),
            (10.0, 4.156_968_929_685_325e-6),
        ] {
            let got = scaled_exp_integral(x) * (-x).exp();
            assert!((got / e1 - 1.0).abs() < 1e-13, "{x}: {got}");
        }
        // e^x E1(x) ~ 1/x - 1/x^2 + 2/x^3 for large x
        let x = 1e6;
        assert!(
            (scaled_exp_integral(x) - (1.0 / x - 1.0 / (x * x) + 2.0 / (x * x * x))).abs() < 1e-22
        );
    }

    #[test]
    fn closed_form_matches_quadrature() {
        for s in [1e-4, 0.01, 0.1, 0.5, 1.0, 3.0, 10.0, 100.0, 1e4] {
            let a = ergodic_capacity_bps(s, 1.0).unwrap();
            let q = ergodic_capacity_quadrature_bps(s, 1.0).unwrap();
            assert!((a / q - 1.0).abs() < 1e-8, "{s}: {a} vs {q}");
        }
    }

    #[test]
    fn ergodic_monte_carlo_cross_check() {
        let mut rng = SimRng::seeded(77);
        let n = 1_000_000;
        let sum: f64 = (0..n)
            .map(|_| shannon_rate_bps(1.0, draw_instantaneous_snr(10.0, &mut rng)))
            .sum();
        let mc = sum / n as f64;
        let q = ergodic_capacity_bps(10.0, 1.0).unwrap();
        assert!((mc / q - 1.0).abs() < 0.005);
    }

    #[test]
    fn exponential_draws() {
        let mut rng = SimRng::seeded(4);
        let n = 1_000_000;
        let mut sum = 0.0;
        let mut tail = 0usize;
        for _ in 0..n {
            let g = draw_instantaneous_snr(1.0, &mut rng);
            sum += g;
            if g > 1.0 {
                tail += 1;
            }
        }
        let mean = sum / n as f64;
        assert!((mean - 1.0).abs() < 3.0 / (n as f64).sqrt());
        let p = (-1f64).exp();
        let sigma = (p * (1.0 - p) / n as f64).sqrt();
        assert!((tail as f64 / n as f64 - p).abs() < 3.0 * sigma);
        assert!(draw_instantaneous_snr(1e-300, &mut rng) < 1e-290);
    }

    #[test]
    fn capacity_stats_consistent() {
        let b = budget(600.0, 2e6);
        let s = capacity_stats(&b, 0.7e6).unwrap();
        assert!((0.0..=1.0).contains(&s.outage_probability));
        assert!(s.ergodic_capacity_bps > 0.0);
        assert_eq!(s.mean_snr_linear, mean_snr_linear(&b).unwrap());
    }
}
