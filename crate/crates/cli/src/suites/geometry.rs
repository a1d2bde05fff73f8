//! Suites over the analytic models: Calabi end, semi-flat model, rotation,
//! special Lagrangian tori and monodromy.

use std::f64::consts::TAU;

use num_complex::Complex64 as C;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use instanton_core::calabi::{AnsatzChart, ChartPoint};
use instanton_core::forms::MetricChart;
use instanton_core::hk::{
    algebraic_defects, decay_report, fd_agreement, kahler_curvature, modulus_from_parameters, normalize, rotate,
    rotation_consistency, rotation_parameters, triple_residual, RaySpec, TripleField, ROTATION_TOLERANCE,
};
use instanton_core::semiflat::{
    fiber_flatness, fibration_criterion, monodromy, period_with_grid, tune_b0, CycleSpec, FormSelector, ModelPoint,
    SemiFlatParams,
};
use instanton_core::slag::{
    build_slag, h2_generators, intersection_number, lagrangian_residual, periods, phase_profile, torus_grid,
};
use instanton_core::torus::{make_curve, TorusLine};
use instanton_core::Result;

use crate::config::RunConfig;
use crate::report::{Criterion, SuiteRecord, Table};

fn at_most(tolerance: f64) -> Criterion {
    Criterion::AtMost { tolerance }
}

fn equals(expected: f64) -> Criterion {
    Criterion::Equals { expected }
}

fn log_uniform(rng: &mut impl Rng, range: [f64; 2]) -> f64 {
    let (lo, hi) = (range[0].ln(), range[1].ln());
    (lo + (hi - lo) * rng.random::<f64>()).exp()
}

fn tau_of(cfg: &RunConfig) -> C {
    C::new(cfg.tau[0], cfg.tau[1])
}

pub fn calabi_points(chart: &AnsatzChart, n: usize, depth: [f64; 2], rng: &mut impl Rng) -> Vec<ChartPoint> {
    let tau = chart.curve().tau();
    (0..n)
        .map(|_| {
            let z = C::new(rng.random::<f64>(), 0.0) + tau * rng.random::<f64>();
            let t = log_uniform(rng, depth);
            ChartPoint::at_depth(chart, z, t, TAU * rng.random::<f64>())
        })
        .collect()
}

pub fn semiflat_points(params: &SemiFlatParams, n: usize, radius: [f64; 2], rng: &mut impl Rng) -> Result<Vec<ModelPoint>> {
    (0..n)
        .map(|_| {
            let u = C::from_polar(log_uniform(rng, radius), TAU * rng.random::<f64>());
            let v = C::new(rng.random::<f64>(), 0.0) + params.lattice_generator(u) * rng.random::<f64>();
            ModelPoint::new(u, v)
        })
        .collect()
}

/// Finite-difference step for the Calabi chart at `x`: `base`, shrunk where
/// a step of that size could leave the domain `t > 0`.
pub fn calabi_fd_step(chart: &AnsatzChart, x: &[f64; 4], base: f64) -> f64 {
    let t = chart.log_norm_generic(&x.map(|r| C::new(r, 0.0))).re;
    let reach = 1.0 + 2.0 * chart.curve().lambda() * x[1].abs();
    base * t.min(1.0) / reach
}

/// Largest Ricci norm, closedness defect and jet/finite-difference
/// disagreement over `points`.
fn curvature_maxima<M: MetricChart>(m: &M, points: &[M::Point], step: impl Fn(&[f64; 4]) -> f64) -> Result<[f64; 3]> {
    let mut worst = [0.0f64; 3];
    for p in points {
        let x = m.coordinates(p);
        let c = kahler_curvature(m, &x)?;
        let fd = fd_agreement(m, &x, step(&x))?;
        worst[0] = worst[0].max(c.ricci_norm);
        worst[1] = worst[1].max(c.closedness);
        worst[2] = worst[2].max(fd);
    }
    Ok(worst)
}

pub fn calabi(cfg: &RunConfig, rec: &mut SuiteRecord) -> Result<()> {
    let c = &cfg.calabi;
    let chart = AnsatzChart::new(make_curve(tau_of(cfg), cfg.b)?, cfg.exponent)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.suite_seed("calabi"));
    let points = calabi_points(&chart, c.samples, c.depth, &mut rng);

    let res = triple_residual(&chart, &points)?;
    rec.check("triple_ratio_relative_deviation", res.max_deviation, at_most(c.triple_tolerance));
    let (oo, wo) = algebraic_defects(&chart, &points)?;
    rec.check("omega_wedge_Omega", wo, at_most(c.triple_tolerance));
    rec.check("Omega_wedge_Omega", oo, at_most(c.triple_tolerance));
    rec.record("triple_ratio", res);
    rec.record("descriptor", chart.descriptor());

    let k = c.curvature_points.min(points.len());
    let [ricci, closed, fd] = curvature_maxima(&chart, &points[..k], |x| calabi_fd_step(&chart, x, c.fd_step))?;
    rec.check("ricci_norm_max", ricci, at_most(c.ricci_tolerance));
    rec.check("kahler_closedness_max", closed, at_most(c.ricci_tolerance));
    rec.check("curvature_fd_agreement", fd, at_most(c.fd_tolerance));

    let d = &cfg.decay;
    let ray = RaySpec {
        base: C::new(d.base[0], d.base[1]),
        phase: d.phase,
        depth_min: d.depth_min,
        depth_max: d.depth_max,
        samples: d.samples,
    };
    let report = decay_report(&chart, &ray)?;
    let r_min = report.samples.iter().map(|s| s.r).fold(f64::INFINITY, f64::min);
    let r_max = report.samples.iter().map(|s| s.r).fold(0.0, f64::max);
    rec.check("decay_r_decades", (r_max / r_min).log10(), Criterion::AtLeast { threshold: d.min_decades });
    let slope = |f: &instanton_core::hk::DecayFit| f.slope().unwrap_or(f64::NAN);
    let within = |r: [f64; 2]| Criterion::Within { low: r[0], high: r[1] };
    rec.check("curvature_decay_slope", slope(&report.curvature), within(d.curvature_slope));
    rec.check("circle_length_slope", slope(&report.circle), within(d.circle_slope));
    let mut table = Table::new(&["r", "|Rm|", "circle_length"]);
    for s in &report.samples {
        table.push(vec![json!(s.r), json!(s.rm_norm), json!(s.circle_length)]);
    }
    rec.tables.insert("decay".into(), table);
    rec.record("curvature_fit", &report.curvature);
    rec.record("circle_fit", &report.circle);
    Ok(())
}

pub fn semiflat(cfg: &RunConfig, rec: &mut SuiteRecord) -> Result<()> {
    let s = &cfg.semiflat;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.suite_seed("semiflat"));
    let mut table = Table::new(&["family", "b0", "radius", "fiber_area", "omega_C_re", "omega_C_im", "fiber_flatness"]);
    let mut constants = serde_json::Map::new();
    let mut worst = [0.0f64; 9];
    for (family, b0) in [("standard", 0.0), ("non_standard", s.b0)] {
        let params = SemiFlatParams::calibrated(cfg.b, b0, s.eps)?;
        let points = semiflat_points(&params, s.samples, s.radius, &mut rng)?;
        let res = triple_residual(&params, &points)?;
        worst[0] = worst[0].max(res.max_deviation);
        constants.insert(family.into(), serde_json::to_value(res).unwrap_or(Value::Null));

        let k = s.curvature_points.min(points.len());
        let [ricci, closed, fd] = curvature_maxima(&params, &points[..k], |x| s.fd_relative_step * x[0].hypot(x[1]))?;
        worst[1] = worst[1].max(ricci);
        worst[2] = worst[2].max(closed);
        worst[3] = worst[3].max(fd);

        let mut first: Option<C> = None;
        for &r in &s.period_radii {
            let area = period_with_grid(&params, FormSelector::Kahler, &CycleSpec::fiber(r), s.period_grid)?;
            let re = period_with_grid(&params, FormSelector::HolomorphicRe, &CycleSpec::bad(r), s.period_grid)?;
            let im = period_with_grid(&params, FormSelector::HolomorphicIm, &CycleSpec::bad(r), s.period_grid)?;
            let flat = fiber_flatness(&params, C::new(r, 0.0), s.period_grid)?;
            let omega_c = C::new(re, im);
            worst[4] = worst[4].max((area - s.eps).abs() / s.eps);
            worst[5] = worst[5].max(flat);
            worst[6] = worst[6].max((omega_c - 1.0).norm());
            if let Some(f) = first {
                worst[7] = worst[7].max((omega_c - f).norm());
            }
            first.get_or_insert(omega_c);
            table.push(vec![json!(family), json!(b0), json!(r), json!(area), json!(re), json!(im), json!(flat)]);
        }
        if let Some(kappa) = params.kappa() {
            rec.record(&format!("kappa_{family}"), [kappa.re, kappa.im]);
            worst[8] = worst[8].max((kappa - C::new(0.0, -1.0 / TAU)).norm());
        }
    }
    rec.check("triple_ratio_relative_deviation", worst[0], at_most(s.triple_tolerance));
    rec.check("ricci_norm_max", worst[1], at_most(s.ricci_tolerance));
    rec.check("kahler_closedness_max", worst[2], at_most(s.ricci_tolerance));
    rec.check("curvature_fd_agreement", worst[3], at_most(s.fd_tolerance));
    rec.check("fiber_area_relative_error", worst[4], at_most(s.area_tolerance));
    rec.check("fiber_flatness", worst[5], at_most(s.flatness_tolerance));
    rec.check("omega_C_minus_one", worst[6], at_most(s.calibration_tolerance));
    rec.check("omega_C_radius_dependence", worst[7], at_most(s.calibration_tolerance));
    rec.check("kappa_minus_reference", worst[8], at_most(s.calibration_tolerance));
    rec.record("triple_constants", Value::Object(constants));
    rec.tables.insert("periods".into(), table);
    Ok(())
}

fn rotation_sample(chart: &AnsatzChart) -> Vec<ChartPoint> {
    let mut rng = ChaCha8Rng::seed_from_u64(0x5eed);
    calabi_points(chart, 32, [0.5, 20.0], &mut rng)
}

/// `max |rotate(rotate(T)) - T|` over the sample, relative to the forms' size.
fn double_rotation_defect(chart: &AnsatzChart, points: &[ChartPoint]) -> Result<f64> {
    let once = rotate(chart.clone(), points, ROTATION_TOLERANCE)?;
    let twice = rotate(once, points, ROTATION_TOLERANCE)?;
    let mut worst: f64 = 0.0;
    for p in points {
        let (w, o) = (chart.kahler_form(p)?, chart.holomorphic_form(p)?);
        let (w2, o2) = (twice.kahler_form(p)?, twice.holomorphic_form(p)?);
        let scale = w.max_abs().max(o.max_abs());
        worst = worst.max((w2 - w).max_abs() / scale).max((o2 - o).max_abs() / scale);
    }
    Ok(worst)
}

pub fn rotation(cfg: &RunConfig, rec: &mut SuiteRecord) -> Result<()> {
    let r = &cfg.rotation;
    let mut table = Table::new(&[
        "tau_re",
        "tau_im",
        "b",
        "b0",
        "eps",
        "alpha",
        "fiber_period",
        "alpha_eps",
        "relative_error",
        "calabi_constant",
        "semiflat_constant",
    ]);
    let mut worst = [0.0f64; 4];
    let mut agree = Vec::new();
    for case in &r.cases {
        let tau = C::new(case.tau[0], case.tau[1]);
        let p = rotation_parameters(tau, case.b)?;
        let back = modulus_from_parameters(p.b0, p.eps, case.b)?;
        worst[0] = worst[0].max((back - tau).norm() / tau.norm());
        let again = rotation_parameters(back, case.b)?;
        worst[0] = worst[0].max(((again.b0 - p.b0).abs()).max((again.eps - p.eps).abs() / p.eps));

        let rc = rotation_consistency(tau, case.b, r.level, r.nodes)?;
        worst[1] = worst[1].max(rc.relative_error);
        worst[2] = worst[2].max(rc.kahler_period.abs() / rc.expected_fiber_period);
        let chart = AnsatzChart::standard(make_curve(tau, case.b)?);
        worst[3] = worst[3].max(double_rotation_defect(&chart, &rotation_sample(&chart))?);
        agree.push(json!({
            "tau": case.tau,
            "b": case.b,
            "rotated_calabi_constant": rc.rotated_calabi_constant,
            "semiflat_constant": rc.semiflat_constant,
            "constants_agree": rc.constants_agree,
        }));
        table.push(vec![
            json!(case.tau[0]),
            json!(case.tau[1]),
            json!(case.b),
            json!(p.b0),
            json!(p.eps),
            json!(p.alpha),
            json!(rc.rotated_fiber_period),
            json!(rc.expected_fiber_period),
            json!(rc.relative_error),
            json!(rc.calabi_constant),
            json!(rc.semiflat_constant),
        ]);
    }
    rec.check("parameter_round_trip", worst[0], at_most(r.round_trip_tolerance));
    rec.check("fiber_period_relative_error", worst[1], at_most(r.period_tolerance));
    rec.check("torus_kahler_period", worst[2], at_most(r.period_tolerance));
    rec.check("double_rotation_defect", worst[3], at_most(r.involution_tolerance));

    // rotation must refuse a pair whose constant is not 1 and accept it
    // once normalized
    let sf = SemiFlatParams::calibrated(cfg.b, cfg.semiflat.b0, cfg.semiflat.eps)?;
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.suite_seed("rotation"));
    let pts = semiflat_points(&sf, 32, cfg.semiflat.radius, &mut rng)?;
    let refused = rotate(sf, &pts, ROTATION_TOLERANCE).is_err();
    let accepted = rotate(normalize(sf, &pts)?, &pts, ROTATION_TOLERANCE).is_ok();
    rec.check("unnormalized_rotation_refused", f64::from(u8::from(refused)), equals(1.0));
    rec.check("normalized_rotation_accepted", f64::from(u8::from(accepted)), equals(1.0));
    rec.record("triple_constants", agree);
    rec.tables.insert("parameters".into(), table);
    Ok(())
}

pub fn slag(cfg: &RunConfig, rec: &mut SuiteRecord) -> Result<()> {
    let l = &cfg.slag;
    // the tori are calibrated by the hyperKähler structure, so they use the
    // standard exponent whatever the Calabi suite is probing
    let chart = AnsatzChart::standard(make_curve(tau_of(cfg), cfg.b)?);
    let grid = torus_grid(l.grid)?;
    let offset = C::new(l.offset[0], l.offset[1]);
    let mut table = Table::new(&["p", "q", "level", "lagrangian_residual", "phase_deviation", "mean_phase", "calibration_defect"]);
    let (mut lag_max, mut phase_max) = (0.0f64, 0.0f64);
    for &[p, q] in &l.classes {
        let line = TorusLine::new(p, q, offset)?;
        for &level in &l.levels {
            let torus = build_slag(&chart, &line, level)?;
            let lag = lagrangian_residual(&torus, &chart, &grid)?;
            let prof = phase_profile(&torus, &chart, &grid)?;
            lag_max = lag_max.max(lag);
            phase_max = phase_max.max(prof.max_deviation);
            table.push(vec![
                json!(p),
                json!(q),
                json!(level),
                json!(lag),
                json!(prof.max_deviation),
                json!(prof.mean_phase),
                json!(prof.calibration_defect),
            ]);
        }
    }
    rec.check("lagrangian_residual_max", lag_max, at_most(l.tolerance));
    rec.check("phase_deviation_max", phase_max, at_most(l.tolerance));
    rec.tables.insert("tori".into(), table);

    let [p, q] = l.classes[0];
    let control = build_slag(&chart, &TorusLine::new(p, q, offset)?, l.levels[0])?.tilted(l.control_tilt)?;
    let threshold = Criterion::AtLeast { threshold: l.control_threshold };
    rec.check("control_lagrangian_residual", lagrangian_residual(&control, &chart, &grid)?, threshold);
    rec.check("control_phase_gradient", phase_profile(&control, &chart, &grid)?.max_gradient, threshold);

    let (g1, g2) = h2_generators(&chart, l.levels[0])?;
    let mut ptable = Table::new(&["p", "q", "kahler", "holomorphic_re", "holomorphic_im"]);
    let mut classes = Vec::new();
    for g in [&g1, &g2] {
        let per = periods(g, &grid)?;
        classes.push(per.class);
        ptable.push(vec![json!(per.class.0), json!(per.class.1), json!(per.kahler), json!(per.holomorphic.re), json!(per.holomorphic.im)]);
    }
    rec.check("generator_intersection", intersection_number(classes[0], classes[1]) as f64, equals(1.0));
    rec.tables.insert("periods".into(), ptable);

    let params = SemiFlatParams::calibrated(cfg.b, 0.0, cfg.semiflat.eps)?;
    let tuned = tune_b0(&params, l.tuned_m, l.criterion_radius)?;
    let mut ftable = Table::new(&["b0", "m", "period_total", "fibred"]);
    let mut fibre_class_fibred = 0u32;
    for b0 in [0.0, cfg.semiflat.b0, tuned] {
        for m in -2..=2 {
            let v = fibration_criterion(&params.with_b0(b0), m, l.criterion_radius, l.criterion_tolerance)?;
            if m == 0 && v.fibred {
                fibre_class_fibred += 1;
            }
            ftable.push(vec![json!(b0), json!(m), json!(v.period_total), json!(v.fibred)]);
        }
    }
    let tuned_verdict = fibration_criterion(&params.with_b0(tuned), l.tuned_m, l.criterion_radius, l.criterion_tolerance)?;
    rec.check("fibre_class_fibred_count", f64::from(fibre_class_fibred), equals(0.0));
    rec.check("tuned_class_fibred", f64::from(u8::from(tuned_verdict.fibred)), equals(1.0));
    rec.record("tuned_b0", tuned);
    rec.record("tuned_verdict", tuned_verdict);
    rec.tables.insert("fibration".into(), ftable);
    Ok(())
}

pub fn monodromy_suite(cfg: &RunConfig, rec: &mut SuiteRecord) -> Result<()> {
    let mut table = Table::new(&["b", "m11", "m12", "m21", "m22"]);
    let mut mismatches = 0u32;
    for &b in &cfg.monodromy.degrees {
        let m = monodromy(b)?;
        if m != [[1, b], [0, 1]] {
            mismatches += 1;
        }
        table.push(vec![json!(b), json!(m[0][0]), json!(m[0][1]), json!(m[1][0]), json!(m[1][1])]);
    }
    let accepted = cfg.monodromy.rejected.iter().filter(|&&b| monodromy(b).is_ok()).count();
    rec.check("unipotent_mismatches", f64::from(mismatches), equals(0.0));
    rec.check("out_of_range_degrees_accepted", accepted as f64, equals(0.0));
    rec.tables.insert("matrices".into(), table);
    Ok(())
}
