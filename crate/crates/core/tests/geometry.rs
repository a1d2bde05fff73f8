use num_complex::Complex64 as C;
use proptest::prelude::*;

use instanton_core::calabi::{AnsatzChart, ChartPoint};
use instanton_core::hk::{
    decay_report, modulus_from_parameters, normalize, rotate, rotation_consistency, rotation_parameters,
    triple_residual, DecayFit, FlatModel, RaySpec, TripleField, ROTATION_TOLERANCE,
};
use instanton_core::semiflat::{calibrate_kappa, ModelPoint, SemiFlatParams};
use instanton_core::torus::make_curve;
use instanton_core::Error;

fn chart_sample(chart: &AnsatzChart) -> Vec<ChartPoint> {
    let tau = chart.curve().tau();
    (0..24)
        .map(|k| {
            let s = (k as f64 * 0.618_034).fract();
            let t = (k as f64 * 0.414_214).fract();
            ChartPoint::at_depth(chart, C::new(s, 0.0) + tau * t, 0.5 + 1.7 * k as f64, 0.9 * k as f64)
        })
        .collect()
}

#[test]
fn calabi_triple_constant_is_one_for_every_modulus() {
    for (tau, b) in [(C::new(0.0, 1.0), 1), (C::new(-0.4, 0.9), 5), (C::new(0.5, 3.0), 9)] {
        let chart = AnsatzChart::standard(make_curve(tau, b).unwrap());
        let res = triple_residual(&chart, &chart_sample(&chart)).unwrap();
        assert!((res.mean - 1.0).abs() < 1e-12 && res.max_deviation < 1e-12, "{tau} {b}: {res:?}");
    }
}

#[test]
fn rotation_requires_normalized_input() {
    let sf = SemiFlatParams::calibrated(2, 0.3, 1.5).unwrap();
    let pts: Vec<ModelPoint> =
        (1..=12).map(|k| ModelPoint::new(C::from_polar(0.03 * k as f64, 0.5 * k as f64), C::new(0.2, 0.01)).unwrap()).collect();
    assert!(matches!(rotate(sf, &pts, ROTATION_TOLERANCE), Err(Error::NotNormalized { .. })));
    let n = normalize(sf, &pts).unwrap();
    let r = rotate(n, &pts, ROTATION_TOLERANCE).unwrap();
    let res = triple_residual(&r, &pts).unwrap();
    assert!((res.mean - 1.0).abs() < 1e-10);

    let bad = AnsatzChart::new(make_curve(C::new(0.0, 1.0), 1).unwrap(), 2.0 / 3.0).unwrap();
    let pts = chart_sample(&bad);
    assert!(matches!(rotate(bad, &pts, ROTATION_TOLERANCE), Err(Error::NotATriple { .. })));
}

#[test]
fn kappa_does_not_depend_on_radius_or_b0() {
    let reference = C::new(0.0, -1.0 / std::f64::consts::TAU);
    for (b, b0) in [(1, 0.0), (4, -0.7), (9, 1.3)] {
        let p = SemiFlatParams::new(b, b0, 0.8).unwrap();
        for r in [0.05, 0.2, 0.7] {
            assert!((calibrate_kappa(&p, r).unwrap() - reference).norm() < 1e-12);
        }
    }
}

#[test]
fn flat_model_has_no_decay_to_fit() {
    let rep = decay_report(&FlatModel, &RaySpec { depth_min: 1.0, depth_max: 100.0, ..RaySpec::default() }).unwrap();
    assert!(matches!(rep.curvature, DecayFit::NoDecay { .. }));
    assert!(rep.curvature.slope().is_none());
}

#[test]
fn decay_needs_a_decade() {
    let chart = AnsatzChart::standard(make_curve(C::new(0.0, 1.0), 1).unwrap());
    let narrow = RaySpec { depth_min: 60.0, depth_max: 80.0, ..RaySpec::default() };
    assert!(matches!(decay_report(&chart, &narrow), Err(Error::InsufficientCoverage(_))));
    let few = RaySpec { samples: 5, ..RaySpec::default() };
    assert!(decay_report(&chart, &few).is_err());
}

#[test]
fn fiber_period_scales_with_alpha_eps() {
    for (tau, b) in [(C::new(0.2, 0.8), 3), (C::new(-1.0, 1.5), 6)] {
        let rc = rotation_consistency(tau, b, 0.01, 32).unwrap();
        assert!(rc.relative_error < 1e-10, "{rc:?}");
        assert!(rc.kahler_period.abs() < 1e-10);
    }
}

#[test]
fn descriptors_name_the_model() {
    let chart = AnsatzChart::standard(make_curve(C::new(0.0, 1.0), 2).unwrap());
    assert!(chart.descriptor().contains("b = 2"));
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn parameter_map_round_trips(re in -2.0f64..2.0, im in 0.2f64..5.0, b in 1i64..=9) {
        let tau = C::new(re, im);
        let p = rotation_parameters(tau, b).unwrap();
        let back = modulus_from_parameters(p.b0, p.eps, b).unwrap();
        prop_assert!((back - tau).norm() <= 1e-12 * tau.norm());
        prop_assert!(p.eps > 0.0 && p.alpha > 0.0);
    }

    #[test]
    fn semiflat_ratio_is_constant(b in 1i64..=9, b0 in -2.0f64..2.0, eps in 0.1f64..4.0) {
        let sf = SemiFlatParams::calibrated(b, b0, eps).unwrap();
        let pts: Vec<ModelPoint> = (1..=10)
            .map(|k| ModelPoint::new(C::from_polar(0.04 * k as f64, 0.6 * k as f64), C::new(0.1 * k as f64, 0.02)).unwrap())
            .collect();
        let res = triple_residual(&sf, &pts).unwrap();
        prop_assert!(res.max_deviation < 1e-10);
        prop_assert!((res.mean - 2.0).abs() < 1e-10);
    }
}
