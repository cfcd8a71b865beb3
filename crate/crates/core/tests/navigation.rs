//! Weighted least-squares covariance against an independent dense solve.

mod common;

use common::{brute_force_covariance, frobenius_rel, random_anchor, RE};
use icnr_core::geometry::EcefPoint;
use icnr_core::navigation::{solution_error, Anchor};
use icnr_core::rng::{unit_f64, SimRng};
use icnr_core::Error;

#[test]
fn covariance_matches_dense_solve_and_shrinks_with_anchors() {
    let user = EcefPoint::new(0.0, 0.0, RE);
    let mut rng = SimRng::seeded(2718);
    let mut checked = 0;
    while checked < 200 {
        let n = 4 + (unit_f64(&mut rng) * 9.0) as usize;
        let anchors: Vec<Anchor> = (0..n).map(|_| random_anchor(&mut rng)).collect();
        let fix = match solution_error(&user, &anchors) {
            Ok(f) => f,
            Err(Error::SingularGeometry { .. }) => continue,
            Err(e) => panic!("{e}"),
        };
        let oracle = brute_force_covariance(&user, &anchors);
        assert!(frobenius_rel(&oracle, &fix.covariance) < 1e-9);

        let mut more = anchors.clone();
        more.push(random_anchor(&mut rng));
        let bigger = solution_error(&user, &more).unwrap();
        assert!(bigger.positioning_error_m <= fix.positioning_error_m * (1.0 + 1e-12));
        assert!(bigger.timing_error_s <= fix.timing_error_s * (1.0 + 1e-12));
        checked += 1;
    }
}

#[test]
fn equal_sigma_scales_out() {
    let user = EcefPoint::new(0.0, 0.0, RE);
    let mut rng = SimRng::seeded(3);
    let base: Vec<Anchor> = (0..8)
        .map(|_| Anchor {
            ranging_sigma_m: 1.0,
            ..random_anchor(&mut rng)
        })
        .collect();
    let gdop = solution_error(&user, &base)
        .unwrap()
        .covariance
        .trace()
        .sqrt();
    for sigma in [0.01, 0.3, 7.0] {
        let scaled: Vec<Anchor> = base
            .iter()
            .map(|a| Anchor {
                ranging_sigma_m: sigma,
                ..*a
            })
            .collect();
        let c = solution_error(&user, &scaled).unwrap().covariance;
        assert!((c.trace().sqrt() / sigma / gdop - 1.0).abs() < 1e-10);
    }
}

#[test]
fn too_few_anchors() {
    let user = EcefPoint::new(0.0, 0.0, RE);
    let mut rng = SimRng::seeded(4);
    let three: Vec<Anchor> = (0..3).map(|_| random_anchor(&mut rng)).collect();
    assert!(matches!(
        solution_error(&user, &three),
        Err(Error::InsufficientAnchors { found: 3 })
    ));
}
