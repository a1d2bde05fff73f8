//! Calabi ansatz on the complement of the zero section of a degree-`b` line
//! bundle `L -> D`.
//!
//! With `t = -log |xi|^2_h`, the Kähler form is `i ddbar (2/3) t^p` and the
//! holomorphic form is `(f / w) dz ^ dw` for constant `f`. Evaluation happens
//! in the logarithmic fibre chart `(z, zeta = log w)`, where
//! `t = -2 Re zeta + lambda (Im z)^2` and `Omega = f dz ^ dzeta`; this keeps
//! points deep in the end (`t` in the thousands) representable.

use std::cell::RefCell;
use std::f64::consts::TAU;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{Hermitian2, MetricChart, TensorsAtPoint};
use crate::numerics::{quadrature_periodic, GaussLegendre, Grid1D, Jet, Scalar};
use crate::torus::EllipticCurveData;

type C = Complex64;

/// Exponent of the Kähler potential that makes the triple hyperKähler.
pub const DEFAULT_EXPONENT: f64 = 1.5;

/// Level `|xi|^2_h` from which radial distance is measured.
pub const BASE_LEVEL: f64 = 0.5;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AnsatzChart {
    curve: EllipticCurveData,
    exponent: f64,
    f: C,
}

/// `|f|` such that the residue of `Omega` along the zero section has area
/// `2 pi b`: `|f|^2 = 2 pi b / Im tau`.
///
/// The residue is taken as the linking-circle integral, `oint Omega =
/// 2 pi i f dz`, so `Res / (2 pi i) = f dz` and `(i/2) int |f|^2 dz ^ dzbar =
/// |f|^2 Im tau`. This is the normalisation that makes `2 omega^2 = Omega ^
/// conj(Omega)` hold with constant exactly 1.
pub fn residue_normalization(curve: &EllipticCurveData) -> f64 {
    (TAU * f64::from(curve.b()) / curve.tau().im).sqrt()
}

impl AnsatzChart {
    pub fn new(curve: EllipticCurveData, exponent: f64) -> Result<Self> {
        if !(exponent > 0.0) || !exponent.is_finite() {
            return Err(Error::InvalidArgument(format!("potential exponent {exponent} must be positive")));
        }
        // Phase -pi/2 makes Omega(d_s, d_phi) = |f| (p + q tau) on the ansatz
        // tori, so their phases agree with the base line phases.
        let f = C::new(0.0, -residue_normalization(&curve));
        Ok(Self { curve, exponent, f })
    }

    pub fn standard(curve: EllipticCurveData) -> Self {
        Self::new(curve, DEFAULT_EXPONENT).expect("default exponent is valid")
    }

    pub fn curve(&self) -> &EllipticCurveData {
        &self.curve
    }

    pub fn exponent(&self) -> f64 {
        self.exponent
    }

    pub fn f(&self) -> C {
        self.f
    }

    pub fn f_modulus(&self) -> f64 {
        self.f.norm()
    }

    /// `t = -log |xi|^2_h` in logarithmic chart coordinates.
    pub fn log_norm_generic<S: Scalar>(&self, x: &[S; 4]) -> S {
        let y = x[1].clone();
        S::real(-2.0) * x[2].clone() + S::real(self.curve.lambda()) * y.clone() * y
    }

    /// Kähler potential `(2/3) t^p`.
    pub fn potential<S: Scalar>(&self, x: &[S; 4]) -> S {
        self.log_norm_generic(x).powf(self.exponent).scale(C::new(2.0 / 3.0, 0.0))
    }

    fn check_domain(&self, t: f64) -> Result<()> {
        if t > 0.0 && t.is_finite() {
            Ok(())
        } else {
            Err(Error::PotentialDomain((-t).exp()))
        }
    }
}

impl MetricChart for AnsatzChart {
    type Point = ChartPoint;

    fn coordinates(&self, p: &ChartPoint) -> [f64; 4] {
        p.log_coordinates()
    }

    fn metric<S: Scalar>(&self, x: &[S; 4]) -> Result<[[S; 2]; 2]> {
        let t = self.log_norm_generic(x);
        self.check_domain(t.value().re)?;
        let p = self.exponent;
        let lambda = self.curve.lambda();
        let d1 = t.powf(p - 1.0).scale(C::new(2.0 * p / 3.0, 0.0));
        let d2 = t.powf(p - 2.0).scale(C::new(2.0 * p * (p - 1.0) / 3.0, 0.0));
        // t_z = -i lambda y, t_zeta = -1
        let tz = x[1].scale(C::new(0.0, -lambda));
        let g_zz = d1.scale(C::new(lambda / 2.0, 0.0)) + d2.clone() * tz.clone() * tz.conj();
        let g_zq = -(d2.clone() * tz.clone());
        let g_qz = -(d2.clone() * tz.conj());
        Ok([[g_zz, g_zq], [g_qz, d2]])
    }

    fn holomorphic_coefficient(&self, _x: &[f64; 4]) -> Result<C> {
        Ok(self.f)
    }
}

/// Point of the total space away from the zero section, stored as
/// `(z, log w)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ChartPoint {
    pub z: C,
    pub log_w: C,
}

impl ChartPoint {
    pub fn from_w(z: C, w: C) -> Result<Self> {
        if w.norm() == 0.0 || !w.is_finite() {
            return Err(Error::ZeroSection);
        }
        Ok(Self { z, log_w: w.ln() })
    }

    pub fn from_log(z: C, log_w: C) -> Self {
        Self { z, log_w }
    }

    /// The point over `z` with `|xi|^2_h = level` and `arg w = phase`,
    /// given `t = -log level`.
    pub fn at_depth(chart: &AnsatzChart, z: C, t: f64, phase: f64) -> Self {
        let re = 0.5 * (chart.curve.lambda() * z.im * z.im - t);
        Self { z, log_w: C::new(re, phase) }
    }

    pub fn w(&self) -> C {
        self.log_w.exp()
    }

    pub fn log_coordinates(&self) -> [f64; 4] {
        [self.z.re, self.z.im, self.log_w.re, self.log_w.im]
    }
}

/// `t = -log |xi|^2_h`.
pub fn log_norm(chart: &AnsatzChart, p: &ChartPoint) -> f64 {
    chart.log_norm_generic(&p.log_coordinates().map(|r| C::new(r, 0.0))).re
}

/// `|xi|^2_h = |w|^2 exp(-2 pi b (Im z)^2 / Im tau)`.
pub fn norm_function(chart: &AnsatzChart, p: &ChartPoint) -> f64 {
    (-log_norm(chart, p)).exp()
}

/// Largest deviation of `i ddbar(-log N)` from `omega_D` pulled back, in
/// components of the logarithmic chart, computed from exact jets.
pub fn curvature_defect(chart: &AnsatzChart, p: &ChartPoint) -> f64 {
    let t = chart.log_norm_generic(&Jet::coordinates(p.log_coordinates()));
    let target = [[chart.curve.lambda() / 2.0, 0.0], [0.0, 0.0]];
    let mut worst: f64 = 0.0;
    for k in 0..2 {
        for l in 0..2 {
            worst = worst.max((t.d_mixed(k, l) - target[k][l]).norm());
        }
    }
    worst
}

/// Metric and forms in the logarithmic chart `(z, log w)`.
pub fn log_chart_tensors(chart: &AnsatzChart, p: &ChartPoint) -> Result<TensorsAtPoint> {
    chart.tensors_at(&p.log_coordinates())
}

/// Metric and forms in the holomorphic chart `(z, w)`.
pub fn calabi_tensors(chart: &AnsatzChart, p: &ChartPoint) -> Result<TensorsAtPoint> {
    let w = p.w();
    if w.norm() == 0.0 {
        return Err(Error::InvalidArgument(
            "fibre coordinate underflows; evaluate in the logarithmic chart".into(),
        ));
    }
    let log = log_chart_tensors(chart, p)?;
    let g = log.g.0;
    // dzeta = dw / w
    let h = Hermitian2([[g[0][0], g[0][1] / w.conj()], [g[1][0] / w, g[1][1] / w.norm_sqr()]]);
    Ok(TensorsAtPoint::new(h, chart.f / w))
}

fn zeta_zeta(chart: &AnsatzChart, z: C, t: f64, phase: f64) -> Result<f64> {
    let x = ChartPoint::at_depth(chart, z, t, phase).log_coordinates().map(|r| C::new(r, 0.0));
    let g = chart.metric(&x)?;
    let v = g[1][1].re;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::SingularMetric)
    }
}

/// Arclength along `rho -> (z, rho w / |w|)` from the level `BASE_LEVEL`
/// to the point.
pub fn radial_distance(chart: &AnsatzChart, p: &ChartPoint) -> Result<f64> {
    let t = log_norm(chart, p);
    let t0 = -BASE_LEVEL.ln();
    if t < t0 * (1.0 - 1e-14) {
        return Err(Error::OutsideEndRegion { norm: (-t).exp(), base: BASE_LEVEL });
    }
    if t <= t0 {
        return Ok(0.0);
    }
    // |d/d Re zeta|^2 = 2 g_{zeta zetabar} and d Re zeta = -dt / 2.
    let panels = ((t / t0).log2().ceil() as usize).max(2) * 2;
    let breaks: Vec<f64> = (0..=panels).map(|k| t0 * (t / t0).powf(k as f64 / panels as f64)).collect();
    let gl = GaussLegendre::new(16);
    let failure = RefCell::new(None);
    let r = gl.integrate_panels(
        |s| match zeta_zeta(chart, p.z, s, p.log_w.im) {
            Ok(g) => 0.5 * (2.0 * g).sqrt(),
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        },
        &breaks,
    );
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(r),
    }
}

/// Length of the circle `{z fixed, |w| fixed}` through the point.
pub fn circle_length(chart: &AnsatzChart, p: &ChartPoint) -> Result<f64> {
    let t = log_norm(chart, p);
    let grid = Grid1D::periodic(0.0, TAU, 64)?;
    let failure = RefCell::new(None);
    let len = quadrature_periodic(
        |phase| match zeta_zeta(chart, p.z, t, phase) {
            Ok(g) => (2.0 * g).sqrt(),
            Err(e) => {
                *failure.borrow_mut() = Some(e);
                0.0
            }
        },
        &grid,
    )?;
    match failure.into_inner() {
        Some(e) => Err(e),
        None => Ok(len),
    }
}

/// Closed-form radial distance for the default exponent:
/// `(2/3) (t^{3/4} - t0^{3/4})`.
pub fn radial_distance_closed_form(t: f64) -> f64 {
    let t0 = -BASE_LEVEL.ln();
    (2.0 / 3.0) * (t.powf(0.75) - t0.powf(0.75))
}
