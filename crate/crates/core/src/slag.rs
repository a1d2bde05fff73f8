//! Ansatz special Lagrangian tori `{|xi|^2_h = level}` over straight lines of
//! the base curve, and their stationarity diagnostics.
//!
//! A torus over the line `offset + s (p + q tau)` is parameterised by
//! `(s, phi) in [0, 1) x [0, 2 pi)` with `arg w = phi`. All tangents are
//! written in the logarithmic chart `(z, log w)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calabi::{self, AnsatzChart, ChartPoint};
use crate::error::{Error, Result};
use crate::forms::{Hermitian2, Tangent};
use crate::hk::TripleField;
use crate::numerics::{try_quadrature_periodic_2d, Grid1D, Grid2D};
use crate::torus::TorusLine;

type C = Complex64;

pub const DEFAULT_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormChoice {
    Kahler,
    Holomorphic,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzSLag {
    chart: AnsatzChart,
    line: TorusLine,
    level: f64,
    tilt: f64,
}

/// A point of the torus with its two coordinate tangents.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SurfacePoint {
    pub point: ChartPoint,
    pub d_s: Tangent,
    pub d_phi: Tangent,
}

pub fn build_slag(chart: &AnsatzChart, line: &TorusLine, level: f64) -> Result<AnsatzSLag> {
    if !(level > 0.0 && level < 1.0) {
        return Err(Error::InvalidLevel(level));
    }
    Ok(AnsatzSLag { chart: *chart, line: *line, level, tilt: 0.0 })
}

/// The `(s, phi)` grid used for torus integrals.
pub fn torus_grid(nodes: usize) -> Result<Grid2D> {
    Ok(Grid2D::new(Grid1D::periodic(0.0, 1.0, nodes)?, Grid1D::periodic(0.0, TAU, nodes)?))
}

impl AnsatzSLag {
    pub fn chart(&self) -> &AnsatzChart {
        &self.chart
    }

    pub fn line(&self) -> &TorusLine {
        &self.line
    }

    pub fn level(&self) -> f64 {
        self.level
    }

    pub fn tilt(&self) -> f64 {
        self.tilt
    }

    /// A deformed torus that is neither Lagrangian nor of constant phase:
    /// the level oscillates along the line by the relative amount `delta`
    /// and the base point moves off the line by `delta sin(phi)`.
    pub fn tilted(&self, delta: f64) -> Result<Self> {
        if !(delta.abs() < 1.0) || self.level * (1.0 + delta.abs()) >= 1.0 {
            return Err(Error::InvalidLevel(self.level * (1.0 + delta.abs())));
        }
        Ok(Self { tilt: delta, ..*self })
    }

    /// Base point of the torus over the line parameter `s` and fibre angle.
    pub fn projection(&self, s: f64, phi: f64) -> C {
        let v = self.line.direction(self.chart.curve());
        self.line.point(self.chart.curve(), s) + self.normal(v) * (self.tilt * phi.sin())
    }

    fn normal(&self, v: C) -> C {
        C::i() * v / v.norm()
    }

    pub fn surface_point(&self, s: f64, phi: f64) -> SurfacePoint {
        let lambda = self.chart.curve().lambda();
        let v = self.line.direction(self.chart.curve());
        let n = self.normal(v);
        let d = self.tilt;
        let z = self.projection(s, phi);
        let level = self.level * (1.0 + d * (TAU * s).sin());
        let d_level = self.level * d * TAU * (TAU * s).cos();
        // Re log w = (lambda (Im z)^2 + log level) / 2
        let re = 0.5 * (lambda * z.im * z.im + level.ln());
        let point = ChartPoint::from_log(z, C::new(re, phi));
        let dz_s = v;
        let dz_phi = n * (d * phi.cos());
        let dre_s = lambda * z.im * dz_s.im + 0.5 * d_level / level;
        let dre_phi = lambda * z.im * dz_phi.im;
        SurfacePoint { point, d_s: [dz_s, C::new(dre_s, 0.0)], d_phi: [dz_phi, C::new(dre_phi, 1.0)] }
    }

    fn grid_points(&self, grid: &Grid2D) -> Vec<(f64, f64)> {
        grid.x.points().flat_map(|s| grid.y.points().map(move |phi| (s, phi))).collect()
    }

    fn induced(&self, sp: &SurfacePoint) -> Result<[[f64; 2]; 2]> {
        let g: Hermitian2 = calabi::log_chart_tensors(&self.chart, &sp.point)?.g;
        let a = g.riemannian(&sp.d_s, &sp.d_s);
        let b = g.riemannian(&sp.d_s, &sp.d_phi);
        let c = g.riemannian(&sp.d_phi, &sp.d_phi);
        Ok([[a, b], [b, c]])
    }
}

fn area(m: &[[f64; 2]; 2]) -> Result<f64> {
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    if !(det > 0.0) {
        return Err(Error::DegenerateParameterization);
    }
    Ok(det.sqrt())
}

/// `sup |omega(d_s, d_phi)| / area` over the grid. Areas use the metric of
/// the ansatz, shared by every triple obtained from it by rotation.
pub fn lagrangian_residual<F>(slag: &AnsatzSLag, field: &F, grid: &Grid2D) -> Result<f64>
where
    F: TripleField<Point = ChartPoint>,
{
    let vals = slag
        .grid_points(grid)
        .par_iter()
        .map(|&(s, phi)| {
            let sp = slag.surface_point(s, phi);
            let w = field.kahler_form(&sp.point)?.eval(&sp.d_s, &sp.d_phi).re;
            Ok(w.abs() / area(&slag.induced(&sp)?)?)
        })
        .collect::<Result<Vec<f64>>>()?;
    Ok(vals.into_iter().fold(0.0, f64::max))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhaseProfile {
    pub nodes_s: usize,
    pub nodes_phi: usize,
    /// `theta` at grid point `(i, j)` stored at `i * nodes_phi + j`.
    pub phases: Vec<f64>,
    pub mean_phase: f64,
    pub max_deviation: f64,
    /// `max |grad theta|` in the induced metric: the mean curvature size.
    pub max_gradient: f64,
    /// `max | |Omega(d_s, d_phi)| - area | / area`.
    pub calibration_defect: f64,
    pub lagrangian_residual: f64,
}

fn wrap_pi(x: f64) -> f64 {
    let y = (x + PI).rem_euclid(TAU) - PI;
    if y < -PI {
        y + TAU
    } else {
        y
    }
}

/// Phase `theta` with `Omega|_L = e^{i theta} vol`, sampled on the grid.
pub fn phase_profile<F>(slag: &AnsatzSLag, field: &F, grid: &Grid2D) -> Result<PhaseProfile>
where
    F: TripleField<Point = ChartPoint>,
{
    let pts = slag.grid_points(grid);
    struct Sample {
        theta: f64,
        metric: [[f64; 2]; 2],
        calib: f64,
        lag: f64,
    }
    let samples = pts
        .par_iter()
        .map(|&(s, phi)| {
            let sp = slag.surface_point(s, phi);
            let o = field.holomorphic_form(&sp.point)?.eval(&sp.d_s, &sp.d_phi);
            if !(o.norm() > 1e-300) {
                return Err(Error::DegeneratePhase);
            }
            let metric = slag.induced(&sp)?;
            let a = area(&metric)?;
            let w = field.kahler_form(&sp.point)?.eval(&sp.d_s, &sp.d_phi).re;
            Ok(Sample { theta: o.arg().rem_euclid(TAU), metric, calib: (o.norm() - a).abs() / a, lag: w.abs() / a })
        })
        .collect::<Result<Vec<Sample>>>()?;

    let (ns, np) = (grid.x.nodes(), grid.y.nodes());
    let sum: C = samples.iter().map(|s| C::from_polar(1.0, s.theta)).sum();
    let mean_phase = sum.arg().rem_euclid(TAU);
    let max_deviation = samples.iter().map(|s| wrap_pi(s.theta - mean_phase).abs()).fold(0.0, f64::max);
    let (hs, hp) = (grid.x.spacing(), grid.y.spacing());
    let at = |i: usize, j: usize| &samples[(i % ns) * np + (j % np)];
    let mut max_gradient: f64 = 0.0;
    for i in 0..ns {
        for j in 0..np {
            let ds = wrap_pi(at(i + 1, j).theta - at(i + ns - 1, j).theta) / (2.0 * hs);
            let dp = wrap_pi(at(i, j + 1).theta - at(i, j + np - 1).theta) / (2.0 * hp);
            let m = at(i, j).metric;
            let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
            let g2 = (m[1][1] * ds * ds - 2.0 * m[0][1] * ds * dp + m[0][0] * dp * dp) / det;
            max_gradient = max_gradient.max(g2.max(0.0).sqrt());
        }
    }
    Ok(PhaseProfile {
        nodes_s: ns,
        nodes_phi: np,
        mean_phase: if mean_phase >= TAU { 0.0 } else { mean_phase },
        max_deviation,
        max_gradient,
        calibration_defect: samples.iter().map(|s| s.calib).fold(0.0, f64::max),
        lagrangian_residual: samples.iter().map(|s| s.lag).fold(0.0, f64::max),
        phases: samples.iter().map(|s| s.theta).collect(),
    })
}

/// `int_L alpha` for `alpha` the Kähler or holomorphic form of `field`.
pub fn integrate_form<F>(slag: &AnsatzSLag, field: &F, which: FormChoice, grid: &Grid2D) -> Result<C>
where
    F: TripleField<Point = ChartPoint>,
{
    try_quadrature_periodic_2d(
        |s, phi| {
            let sp = slag.surface_point(s, phi);
            let form = match which {
                FormChoice::Kahler => field.kahler_form(&sp.point)?,
                FormChoice::Holomorphic => field.holomorphic_form(&sp.point)?,
            };
            Ok(form.eval(&sp.d_s, &sp.d_phi))
        },
        grid,
    )
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SlagPeriods {
    pub class: (i64, i64),
    pub kahler: f64,
    pub holomorphic: C,
}

pub fn periods(slag: &AnsatzSLag, grid: &Grid2D) -> Result<SlagPeriods> {
    Ok(SlagPeriods {
        class: slag.line.class(),
        kahler: integrate_form(slag, &slag.chart, FormChoice::Kahler, grid)?.re,
        holomorphic: integrate_form(slag, &slag.chart, FormChoice::Holomorphic, grid)?,
    })
}

/// Tori over the lines of class `(1, 0)` and `(0, 1)`; their classes
/// generate the second homology of the end.
pub fn h2_generators(chart: &AnsatzChart, level: f64) -> Result<(AnsatzSLag, AnsatzSLag)> {
    let origin = C::new(0.0, 0.0);
    Ok((
        build_slag(chart, &TorusLine::new(1, 0, origin)?, level)?,
        build_slag(chart, &TorusLine::new(0, 1, origin)?, level)?,
    ))
}

/// Intersection number of two torus classes `(p, q)`, `(p', q')` inside
/// the end: the algebraic intersection `p q' - q p'` of the base lines.
pub fn intersection_number(a: (i64, i64), b: (i64, i64)) -> i64 {
    a.0 * b.1 - a.1 * b.0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::torus::{line_phase, make_curve};

    fn chart() -> AnsatzChart {
        AnsatzChart::standard(make_curve(C::new(0.0, 1.0), 1).unwrap())
    }

    #[test]
    fn build_examples() {
        let ch = chart();
        let line = TorusLine::new(1, 0, C::new(0.0, 0.0)).unwrap();
        let l = build_slag(&ch, &line, 0.04).unwrap();
        for k in 0..8 {
            let sp = l.surface_point(k as f64 / 8.0, 0.3 * k as f64);
            assert!((sp.point.w().norm() - 0.2).abs() < 1e-14);
            assert!((calabi::norm_function(&ch, &sp.point) - 0.04).abs() < 1e-15);
            assert!((sp.point.z - line.point(ch.curve(), k as f64 / 8.0)).norm() < 1e-15);
        }
        assert_eq!(build_slag(&ch, &line, 1.5), Err(Error::InvalidLevel(1.5)));
    }

    #[test]
    fn ansatz_tori_are_special_lagrangian() {
        let ch = AnsatzChart::standard(make_curve(C::new(0.4, 1.3), 2).unwrap());
        let grid = torus_grid(16).unwrap();
        for (p, q) in [(1, 0), (0, 1), (1, 1), (2, -1)] {
            let line = TorusLine::new(p, q, C::new(0.1, 0.05)).unwrap();
            for level in [0.04, 0.01, 0.0025] {
                let l = build_slag(&ch, &line, level).unwrap();
                assert!(lagrangian_residual(&l, &ch, &grid).unwrap() < 1e-10);
                let prof = phase_profile(&l, &ch, &grid).unwrap();
                assert!(prof.max_deviation < 1e-10 && prof.max_gradient < 1e-8);
                assert!(prof.calibration_defect < 1e-10);
                let expect = line_phase(ch.curve(), &line);
                assert!(wrap_pi(prof.mean_phase - expect).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn negative_control() {
        let ch = chart();
        let grid = torus_grid(32).unwrap();
        let line = TorusLine::new(1, 0, C::new(0.0, 0.0)).unwrap();
        let l = build_slag(&ch, &line, 0.04).unwrap().tilted(0.2).unwrap();
        assert!(lagrangian_residual(&l, &ch, &grid).unwrap() > 1e-3);
        assert!(phase_profile(&l, &ch, &grid).unwrap().max_gradient > 1e-3);
    }

    #[test]
    fn shift_invariance() {
        let ch = chart();
        let grid = torus_grid(16).unwrap();
        let a = build_slag(&ch, &TorusLine::new(1, 1, C::new(0.0, 0.0)).unwrap(), 0.01).unwrap();
        let b = build_slag(&ch, &TorusLine::new(1, 1, C::new(0.3, 0.3)).unwrap(), 0.01).unwrap();
        let ra = lagrangian_residual(&a, &ch, &grid).unwrap();
        let rb = lagrangian_residual(&b, &ch, &grid).unwrap();
        assert!((ra - rb).abs() < 1e-14);
    }

    #[test]
    fn generator_periods() {
        let ch = chart();
        let grid = torus_grid(32).unwrap();
        let (l1, l2) = h2_generators(&ch, 0.04).unwrap();
        let p1 = periods(&l1, &grid).unwrap();
        let p2 = periods(&l2, &grid).unwrap();
        assert_eq!((p1.class, p2.class), ((1, 0), (0, 1)));
        assert!(p1.kahler.abs() < 1e-10 && p2.kahler.abs() < 1e-10);
        let expect = TAU * ch.f_modulus();
        assert!((p1.holomorphic - expect).norm() < 1e-10);
        assert!((p2.holomorphic - C::new(0.0, expect)).norm() < 1e-10);
        // R-linear independence
        let det = p1.holomorphic.re * p2.holomorphic.im - p1.holomorphic.im * p2.holomorphic.re;
        assert!(det.abs() > 1.0);
        assert_eq!(intersection_number(p1.class, p2.class), 1);
        // level independence
        let (m1, _) = h2_generators(&ch, 0.0025).unwrap();
        assert!((periods(&m1, &grid).unwrap().holomorphic - p1.holomorphic).norm() < 1e-8);
    }
}
