use hslab_core::mappings::Thresholds;
use hslab_core::sharp_constants::s_np;
use hslab_core::variational::{
    mc_quotient_two_point, mc_quotient_weighted, smoke_test_inequality, two_point_trial, McQuotientSpec,
    McRegion, SmokeInequality, TestFunction,
};
use hslab_core::Error;

#[test]
fn two_point_quotient_at_critical_exponent() {
    let spec = McQuotientSpec::new(3, 1_000_000, 42, McRegion::FullSpace).unwrap();
    let est = mc_quotient_two_point(6.0, &spec).unwrap();
    let target = s_np(3, 6.0).unwrap();
    assert!((est.estimate - target).abs() <= 4.0 * est.std_error, "{est:?} vs {target}");
    assert!((est.estimate / target - 1.0).abs() < 0.01);
}

#[test]
fn quotient_is_invariant_under_scaling() {
    let spec = McQuotientSpec::new(3, 100_000, 9, McRegion::FullSpace).unwrap();
    let base = two_point_trial(3, 4.0);
    let plain = mc_quotient_weighted(4.0, &spec, &base).unwrap();
    for lambda in [0.01, 7.5] {
        let scaled = mc_quotient_weighted(4.0, &spec, |x: &[f64], g: &mut [f64]| {
            let v = base(x, g);
            g.iter_mut().for_each(|d| *d *= lambda);
            lambda * v
        })
        .unwrap();
        assert!((scaled.estimate - plain.estimate).abs() <= 1e-9 * plain.estimate);
        assert!((scaled.estimate - plain.estimate).abs() <= 3.0 * plain.std_error);
    }
}

#[test]
fn same_seed_same_estimate() {
    let spec = McQuotientSpec::new(3, 70_000, 5, McRegion::FullSpace).unwrap();
    let a = mc_quotient_two_point(4.0, &spec).unwrap();
    let b = mc_quotient_two_point(4.0, &spec).unwrap();
    assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
    assert_eq!(a.std_error.to_bits(), b.std_error.to_bits());
}

#[test]
fn too_few_samples_are_rejected() {
    assert!(matches!(McQuotientSpec::new(3, 100, 1, McRegion::FullSpace), Err(Error::Domain(_))));
}

#[test]
fn half_space_bump_satisfies_the_inequality() {
    let bump = TestFunction::ProductBump { center: vec![0.0, 0.0, 1.0], half_width: vec![0.5, 0.5, 0.5] };
    let spec = McQuotientSpec::new(3, 100_000, 42, McRegion::HalfSpace).unwrap();
    let reports =
        smoke_test_inequality(SmokeInequality::HalfSpaceHyperbolic, &[bump, TestFunction::Zero], 4.0, &spec).unwrap();
    assert!(reports[0].passed && reports[0].margin > 3.0 * reports[0].std_error);
    assert!(!reports[0].heuristic);
    assert_eq!(reports[1].margin, 0.0);
    assert!(reports[1].passed);
}

#[test]
fn exterior_ball_bump_satisfies_the_inequality() {
    let r = Thresholds::new(3, 0.0, 0.5).unwrap().r_geometry;
    let bump = TestFunction::ProductBump { center: vec![0.0, 0.0, 1.0 + r / 2.0], half_width: vec![r / 6.0; 3] };
    let spec = McQuotientSpec::new(3, 100_000, 42, McRegion::ExteriorBallCap { radius: r }).unwrap();
    let reports = smoke_test_inequality(SmokeInequality::ExteriorBall { gamma: 0.0 }, &[bump], 4.0, &spec).unwrap();
    assert!(reports[0].passed && reports[0].heuristic);
}

#[test]
fn support_outside_the_region_is_rejected() {
    let bump = TestFunction::ProductBump { center: vec![0.0, 0.0, 0.2], half_width: vec![0.5, 0.5, 0.5] };
    let spec = McQuotientSpec::new(3, 10_000, 1, McRegion::HalfSpace).unwrap();
    assert!(smoke_test_inequality(SmokeInequality::HalfSpaceHyperbolic, &[bump], 4.0, &spec).is_err());
}
