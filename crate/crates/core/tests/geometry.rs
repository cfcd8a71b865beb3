use icnr_core::geometry::{
    cap_half_angle, coverage_central_angle_deg, sample_cap_users, sample_uniform_sphere,
    visible_among, visible_fraction, visible_satellites, EarthModel, EcefPoint, Shell,
};
use icnr_core::rng::SimRng;

mod common;
use common::{ks_uniform, KS_CRIT, RE};

const LEO: f64 = RE + 500.0;

#[test]
fn sphere_sampling_is_uniform() {
    let n = 10_000;
    let shell = sample_uniform_sphere(n, LEO, &mut SimRng::seeded(2024)).unwrap();
    assert!(shell
        .points
        .iter()
        .all(|p| (p.norm() / LEO - 1.0).abs() < 1e-12));
    let z: Vec<f64> = shell.points.iter().map(|p| p.z / LEO).collect();
    let phi: Vec<f64> = shell.points.iter().map(|p| p.y.atan2(p.x)).collect();
    let bound = KS_CRIT / (n as f64).sqrt();
    assert!(ks_uniform(z, -1.0, 1.0) < bound);
    assert!(ks_uniform(phi, -std::f64::consts::PI, std::f64::consts::PI) < bound);
}

#[test]
fn cap_users_fill_the_cap_uniformly() {
    let earth = EarthModel::default();
    let area = 7.36e5;
    let half = cap_half_angle(area, &earth).unwrap();
    let n = 10_000;
    let users = sample_cap_users(n, area, &earth, &mut SimRng::seeded(5)).unwrap();
    let pole = earth.north_pole();
    assert!(users.iter().all(|u| u.central_angle(&pole) <= half + 1e-12));
    assert!(users.iter().all(|u| (u.norm() / RE - 1.0).abs() < 1e-12));

    // equal-area caps: z is uniform on [cos(half), 1]
    let z: Vec<f64> = users.iter().map(|u| u.z / RE).collect();
    assert!(ks_uniform(z, half.cos(), 1.0) < KS_CRIT / (n as f64).sqrt());

    let inner = cap_half_angle(area / 2.0, &earth).unwrap();
    let frac = users
        .iter()
        .filter(|u| u.central_angle(&pole) <= inner)
        .count() as f64
        / n as f64;
    assert!((frac - 0.5).abs() < 2.576 * (0.25 / n as f64).sqrt());
}

#[test]
fn quarter_sphere_cap_holds_a_quarter_of_shell_points() {
    let earth = EarthModel::default();
    let hemisphere = 2.0 * std::f64::consts::PI * RE * RE;
    let half = cap_half_angle(hemisphere / 2.0, &earth).unwrap();
    assert!((half - std::f64::consts::FRAC_PI_3).abs() < 1e-12);
    let n = 10_000;
    let shell = sample_uniform_sphere(n, LEO, &mut SimRng::seeded(77)).unwrap();
    let inside = shell
        .indices_within(&EcefPoint::new(0.0, 0.0, LEO), half)
        .len() as f64
        / n as f64;
    assert!((inside - 0.25).abs() < 2.576 * (0.25 * 0.75 / n as f64).sqrt());
}

fn mean_visible(count: usize, mask: f64, draws: usize, seed: u64) -> f64 {
    let user = EcefPoint::new(0.0, 0.0, RE);
    let mut rng = SimRng::seeded(seed);
    let total: usize = (0..draws)
        .map(|_| {
            let shell = sample_uniform_sphere(count, LEO, &mut rng).unwrap();
            visible_satellites(&user, &shell, mask).len()
        })
        .sum();
    total as f64 / draws as f64
}

#[test]
fn visible_count_matches_cap_fraction() {
    for (count, mask) in [(250, 20.0), (250, 10.0), (1000, 30.0)] {
        let p = visible_fraction(mask, RE, LEO);
        let draws = 4000;
        let expected = count as f64 * p;
        let sd = (count as f64 * p * (1.0 - p) / draws as f64).sqrt();
        let got = mean_visible(count, mask, draws, count as u64 + mask as u64);
        assert!(
            (got - expected).abs() < 2.576 * sd,
            "{count} @ {mask}: {got} vs {expected}"
        );
    }
}

#[test]
fn coverage_angle_limits() {
    // zero mask: horizon at acos(Re / r)
    let lam = coverage_central_angle_deg(0.0, RE, LEO);
    assert!((lam - (RE / LEO).acos().to_degrees()).abs() < 1e-12);
    // zenith-only mask
    assert!(coverage_central_angle_deg(90.0, RE, LEO).abs() < 1e-12);
    assert!(coverage_central_angle_deg(20.0, RE, LEO) < coverage_central_angle_deg(10.0, RE, LEO));
}

fn rotate(p: &EcefPoint, axis: [f64; 3], angle: f64) -> EcefPoint {
    // Rodrigues
    let n = (axis[0] * axis[0] + axis[1] * axis[1] + axis[2] * axis[2]).sqrt();
    let k = EcefPoint::new(axis[0] / n, axis[1] / n, axis[2] / n);
    let (s, c) = angle.sin_cos();
    let kxp = EcefPoint::new(
        k.y * p.z - k.z * p.y,
        k.z * p.x - k.x * p.z,
        k.x * p.y - k.y * p.x,
    );
    let kdp = k.dot(p);
    EcefPoint::new(
        p.x * c + kxp.x * s + k.x * kdp * (1.0 - c),
        p.y * c + kxp.y * s + k.y * kdp * (1.0 - c),
        p.z * c + kxp.z * s + k.z * kdp * (1.0 - c),
    )
}

#[test]
fn visibility_is_rotation_invariant() {
    let shell = sample_uniform_sphere(2000, LEO, &mut SimRng::seeded(9)).unwrap();
    let earth = EarthModel::default();
    let users = sample_cap_users(20, 7.36e5, &earth, &mut SimRng::seeded(10)).unwrap();
    let axis = [0.3, -0.5, 0.8];
    let angle = 1.234;
    let rotated = Shell {
        radius_km: shell.radius_km,
        points: shell
            .points
            .iter()
            .map(|p| rotate(p, axis, angle))
            .collect(),
    };
    for u in &users {
        let a = visible_satellites(u, &shell, 20.0);
        let b = visible_satellites(&rotate(u, axis, angle), &rotated, 20.0);
        assert_eq!(a.len(), b.len());
        for (x, y) in a.iter().zip(&b) {
            assert!((x.slant_range_km - y.slant_range_km).abs() < 1e-8);
            assert!((x.elevation_deg - y.elevation_deg).abs() < 1e-8);
        }
    }
}

#[test]
fn raising_the_mask_only_removes_satellites() {
    let shell = sample_uniform_sphere(5000, LEO, &mut SimRng::seeded(31)).unwrap();
    let user = EcefPoint::new(0.0, 0.0, RE);
    let mut prev: Option<Vec<usize>> = None;
    for mask in [0.0, 5.0, 10.0, 20.0, 40.0, 60.0] {
        let mut idx: Vec<usize> = visible_satellites(&user, &shell, mask)
            .iter()
            .map(|v| v.index)
            .collect();
        idx.sort_unstable();
        if let Some(p) = &prev {
            assert!(idx.iter().all(|i| p.binary_search(i).is_ok()));
        }
        prev = Some(idx);
    }
}

#[test]
fn pruned_scan_matches_full_scan() {
    let earth = EarthModel::default();
    let area = 7.36e5;
    let shell = sample_uniform_sphere(5000, LEO, &mut SimRng::seeded(41)).unwrap();
    let users = sample_cap_users(200, area, &earth, &mut SimRng::seeded(42)).unwrap();
    let reach = cap_half_angle(area, &earth).unwrap()
        + coverage_central_angle_deg(20.0, RE, LEO).to_radians()
        + 1e-6;
    let candidates = shell.indices_within(&earth.north_pole(), reach);
    assert!(candidates.len() < shell.count() / 10);
    for u in &users {
        assert_eq!(
            visible_satellites(u, &shell, 20.0),
            visible_among(u, &shell, candidates.iter().copied(), 20.0)
        );
    }
}
