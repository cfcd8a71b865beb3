//! Oracles shared by the integration tests.
#![allow(dead_code)]

use icnr_core::geometry::EcefPoint;
use icnr_core::navigation::Anchor;
use icnr_core::rng::{unit_f64, SimRng};

pub const RE: f64 = 6371.0;

/// Asymptotic one-sample KS statistic against the uniform law on [lo, hi].
pub fn ks_uniform(mut xs: Vec<f64>, lo: f64, hi: f64) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len() as f64;
    xs.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = (x - lo) / (hi - lo);
            (f - i as f64 / n).abs().max(((i + 1) as f64 / n - f).abs())
        })
        .fold(0.0, f64::max)
}

// alpha = 0.01
pub const KS_CRIT: f64 = 1.628;

/// `(H^T W H)^-1` by Gauss-Jordan elimination with partial pivoting.
pub fn brute_force_covariance(user: &EcefPoint, anchors: &[Anchor]) -> [[f64; 4]; 4] {
    let mut a = [[0.0; 8]; 4];
    for an in anchors {
        let d = [
            an.position.x - user.x,
            an.position.y - user.y,
            an.position.z - user.z,
        ];
        let r = (d[0] * d[0] + d[1] * d[1] + d[2] * d[2]).sqrt();
        let h = [-d[0] / r, -d[1] / r, -d[2] / r, 1.0];
        let w = 1.0 / (an.ranging_sigma_m * an.ranging_sigma_m);
        for i in 0..4 {
            for j in 0..4 {
                a[i][j] += w * h[i] * h[j];
            }
        }
    }
    for (i, row) in a.iter_mut().enumerate() {
        row[4 + i] = 1.0;
    }
    for col in 0..4 {
        let pivot = (col..4)
            .max_by(|&x, &y| a[x][col].abs().total_cmp(&a[y][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let p = a[col][col];
        for v in a[col].iter_mut() {
            *v /= p;
        }
        for r in 0..4 {
            if r != col {
                let f = a[r][col];
                let src = a[col];
                for (v, s) in a[r].iter_mut().zip(src) {
                    *v -= f * s;
                }
            }
        }
    }
    let mut inv = [[0.0; 4]; 4];
    for i in 0..4 {
        inv[i].copy_from_slice(&a[i][4..]);
    }
    inv
}

pub fn random_anchor(rng: &mut SimRng) -> Anchor {
    // above the user's horizon, at LEO or MEO radius
    let theta = 1.2 * unit_f64(rng);
    let phi = std::f64::consts::TAU * unit_f64(rng);
    let radius = if unit_f64(rng) < 0.5 {
        RE + 500.0
    } else {
        RE + 20_180.0
    };
    Anchor {
        position: EcefPoint::from_spherical(radius, theta, phi),
        ranging_sigma_m: 0.01 + unit_f64(rng),
    }
}

pub fn frobenius_rel(a: &[[f64; 4]; 4], b: &nalgebra::Matrix4<f64>) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            num += (a[i][j] - b[(i, j)]).powi(2);
            den += a[i][j].powi(2);
        }
    }
    (num / den).sqrt()
}

/// Mean and standard error of `xs`.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean) * (x - mean)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}
