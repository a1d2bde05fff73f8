//! HyperKähler triples `(omega, Omega)`: the identity `2 omega^2 = Omega ^
//! conj(Omega)`, the rotation `(omega, Omega) -> (Re Omega, omega - i Im Omega)`,
//! curvature and decay diagnostics, and the parameter correspondence between
//! the Calabi end and the semi-flat model.

pub mod curvature;
pub mod decay;

use std::f64::consts::PI;
use std::fmt;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calabi::{self, AnsatzChart, ChartPoint};
use crate::error::{Error, Result};
use crate::forms::{self, Hermitian2, MetricChart, TwoForm};
use crate::numerics::{central_diff, Grid2D, Scalar};
use crate::semiflat::{ModelPoint, SemiFlatParams};
use crate::slag::{self, FormChoice};
use crate::torus::{make_curve, TorusLine};

pub use curvature::{fd_agreement, fd_riemann_tensor, kahler_curvature, riemann_tensor, ricci_from_volume, Curvature, RiemannTensor};
pub use decay::{decay_report, exponential_decay_fit, DecayFit, DecayReport, DecaySample, RadialEnd, RaySpec};

type C = Complex64;

/// A pair of pointwise-evaluable forms on a four-real-dimensional chart.
pub trait TripleField: Sync {
    type Point: Clone + Send + Sync + fmt::Debug;

    fn descriptor(&self) -> String;

    fn point_at(&self, x: &[f64; 4]) -> Self::Point;

    fn coordinates_of(&self, p: &Self::Point) -> [f64; 4];

    /// Real 2-form `omega` (imaginary parts zero).
    fn kahler_form(&self, p: &Self::Point) -> Result<TwoForm>;

    fn holomorphic_form(&self, p: &Self::Point) -> Result<TwoForm>;

    /// `2 omega^2 / (Omega ^ conj(Omega))`.
    fn triple_ratio(&self, p: &Self::Point) -> Result<f64> {
        forms::triple_ratio(&self.kahler_form(p)?, &self.holomorphic_form(p)?)
    }
}

impl TripleField for AnsatzChart {
    type Point = ChartPoint;

    fn descriptor(&self) -> String {
        format!(
            "calabi ansatz, log-fibre chart (z, log w); tau = {}, b = {}, p = {}",
            self.curve().tau(),
            self.curve().b(),
            self.exponent()
        )
    }

    fn point_at(&self, x: &[f64; 4]) -> ChartPoint {
        ChartPoint::from_log(C::new(x[0], x[1]), C::new(x[2], x[3]))
    }

    fn coordinates_of(&self, p: &ChartPoint) -> [f64; 4] {
        p.log_coordinates()
    }

    fn kahler_form(&self, p: &ChartPoint) -> Result<TwoForm> {
        Ok(calabi::log_chart_tensors(self, p)?.omega)
    }

    fn holomorphic_form(&self, p: &ChartPoint) -> Result<TwoForm> {
        Ok(calabi::log_chart_tensors(self, p)?.holomorphic_form())
    }
}

impl TripleField for SemiFlatParams {
    type Point = ModelPoint;

    fn descriptor(&self) -> String {
        format!("semi-flat model, chart (u, v); b = {}, b0 = {}, eps = {}", self.b(), self.b0(), self.eps())
    }

    fn point_at(&self, x: &[f64; 4]) -> ModelPoint {
        ModelPoint { u: C::new(x[0], x[1]), v: C::new(x[2], x[3]) }
    }

    fn coordinates_of(&self, p: &ModelPoint) -> [f64; 4] {
        self.coordinates(p)
    }

    fn kahler_form(&self, p: &ModelPoint) -> Result<TwoForm> {
        Ok(crate::semiflat::semiflat_tensors(self, p)?.omega)
    }

    fn holomorphic_form(&self, p: &ModelPoint) -> Result<TwoForm> {
        Ok(crate::semiflat::semiflat_tensors(self, p)?.holomorphic_form())
    }
}

/// Flat `C^2` with potential `|z|^2 + |w|^2` and `Omega = 2 dz ^ dw`.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
pub struct FlatModel;

impl MetricChart for FlatModel {
    type Point = [f64; 4];

    fn coordinates(&self, p: &[f64; 4]) -> [f64; 4] {
        *p
    }

    fn metric<S: Scalar>(&self, _x: &[S; 4]) -> Result<[[S; 2]; 2]> {
        Ok([[S::real(1.0), S::real(0.0)], [S::real(0.0), S::real(1.0)]])
    }

    fn holomorphic_coefficient(&self, _x: &[f64; 4]) -> Result<C> {
        Ok(C::new(2.0, 0.0))
    }
}

impl TripleField for FlatModel {
    type Point = [f64; 4];

    fn descriptor(&self) -> String {
        "flat C^2".into()
    }

    fn point_at(&self, x: &[f64; 4]) -> [f64; 4] {
        *x
    }

    fn coordinates_of(&self, p: &[f64; 4]) -> [f64; 4] {
        *p
    }

    fn kahler_form(&self, p: &[f64; 4]) -> Result<TwoForm> {
        Ok(self.tensors_at(p)?.omega)
    }

    fn holomorphic_form(&self, p: &[f64; 4]) -> Result<TwoForm> {
        Ok(self.tensors_at(p)?.holomorphic_form())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TripleResidual {
    pub mean: f64,
    pub max_deviation: f64,
    pub min: f64,
    pub max: f64,
    pub samples: usize,
}

/// Ratio `2 omega^2 / (Omega ^ conj Omega)` over a sample, with its mean and
/// largest relative deviation from the mean.
pub fn triple_residual<T: TripleField>(field: &T, points: &[T::Point]) -> Result<TripleResidual> {
    if points.len() < 2 {
        return Err(Error::TooFewSamples(points.len()));
    }
    let ratios = points.par_iter().map(|p| field.triple_ratio(p)).collect::<Result<Vec<f64>>>()?;
    let mean = ratios.iter().sum::<f64>() / ratios.len() as f64;
    let max_deviation = ratios.iter().map(|r| (r - mean).abs()).fold(0.0, f64::max) / mean.abs();
    Ok(TripleResidual {
        mean,
        max_deviation,
        min: ratios.iter().copied().fold(f64::INFINITY, f64::min),
        max: ratios.iter().copied().fold(f64::NEG_INFINITY, f64::max),
        samples: ratios.len(),
    })
}

/// `(max |d omega|, max |d Omega|)` at a point, by central differences of
/// the form components.
pub fn closedness_residual<T: TripleField>(field: &T, p: &T::Point, step: f64) -> Result<(f64, f64)> {
    let x = field.coordinates_of(p);
    let d = |which: FormChoice| -> Result<f64> {
        let eval = |y: &[f64]| -> Result<TwoForm> {
            let q = field.point_at(&[y[0], y[1], y[2], y[3]]);
            match which {
                FormChoice::Kahler => field.kahler_form(&q),
                FormChoice::Holomorphic => field.holomorphic_form(&q),
            }
        };
        let grads = (0..4).map(|a| central_diff(eval, &x, a, step)).collect::<Result<Vec<TwoForm>>>()?;
        // (d alpha)_{pqr} = d_p alpha_qr - d_q alpha_pr + d_r alpha_pq
        let comp = |a: usize, p: usize, q: usize| -> C {
            let idx = match (p, q) {
                (0, 1) => 0,
                (0, 2) => 1,
                (0, 3) => 2,
                (1, 2) => 3,
                (1, 3) => 4,
                _ => 5,
            };
            grads[a].0[idx]
        };
        let mut worst: f64 = 0.0;
        for (p, q, r) in [(0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3)] {
            let v = comp(p, q, r) - comp(q, p, r) + comp(r, p, q);
            worst = worst.max(v.norm());
        }
        Ok(worst)
    };
    Ok((d(FormChoice::Kahler)?, d(FormChoice::Holomorphic)?))
}

/// The same triple with `Omega` multiplied by a constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Scaled<T> {
    pub inner: T,
    pub factor: C,
}

impl<T: TripleField> TripleField for Scaled<T> {
    type Point = T::Point;

    fn descriptor(&self) -> String {
        format!("{} with Omega scaled by {}", self.inner.descriptor(), self.factor)
    }

    fn point_at(&self, x: &[f64; 4]) -> T::Point {
        self.inner.point_at(x)
    }

    fn coordinates_of(&self, p: &T::Point) -> [f64; 4] {
        self.inner.coordinates_of(p)
    }

    fn kahler_form(&self, p: &T::Point) -> Result<TwoForm> {
        self.inner.kahler_form(p)
    }

    fn holomorphic_form(&self, p: &T::Point) -> Result<TwoForm> {
        Ok(self.inner.holomorphic_form(p)?.scale(self.factor))
    }
}

/// Rescales `Omega` by a positive constant so that the triple constant
/// measured on `points` becomes 1.
pub fn normalize<T: TripleField>(field: T, points: &[T::Point]) -> Result<Scaled<T>> {
    let res = triple_residual(&field, points)?;
    if !(res.mean > 0.0) {
        return Err(Error::NotNormalized { ratio: res.mean });
    }
    Ok(Scaled { inner: field, factor: C::new(res.mean.sqrt(), 0.0) })
}

/// Rotated triple `(Re Omega, omega - i Im Omega)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Rotated<T> {
    pub inner: T,
}

impl<T: TripleField> TripleField for Rotated<T> {
    type Point = T::Point;

    fn descriptor(&self) -> String {
        format!("rotation of [{}]", self.inner.descriptor())
    }

    fn point_at(&self, x: &[f64; 4]) -> T::Point {
        self.inner.point_at(x)
    }

    fn coordinates_of(&self, p: &T::Point) -> [f64; 4] {
        self.inner.coordinates_of(p)
    }

    fn kahler_form(&self, p: &T::Point) -> Result<TwoForm> {
        Ok(self.inner.holomorphic_form(p)?.re())
    }

    fn holomorphic_form(&self, p: &T::Point) -> Result<TwoForm> {
        let omega = self.inner.kahler_form(p)?;
        let im = self.inner.holomorphic_form(p)?.im();
        Ok(omega - im.scale(C::i()))
    }
}

/// Default tolerance on the triple residual accepted by [`rotate`].
pub const ROTATION_TOLERANCE: f64 = 1e-6;

/// Applies the hyperKähler rotation after checking on `points` that the
/// input is a triple with constant 1. For any other constant `c` the rotated
/// pair has constant `2 / (c + 1)` and `Omega ^ Omega != 0`, so such input is
/// refused; see [`normalize`].
pub fn rotate<T: TripleField>(field: T, points: &[T::Point], tolerance: f64) -> Result<Rotated<T>> {
    let res = triple_residual(&field, points)?;
    if !(res.max_deviation <= tolerance) {
        return Err(Error::NotATriple { deviation: res.max_deviation, tolerance });
    }
    if !((res.mean - 1.0).abs() <= tolerance) {
        return Err(Error::NotNormalized { ratio: res.mean });
    }
    Ok(Rotated { inner: field })
}

/// `max |Omega ^ Omega|` and `max |omega ^ Omega|` relative to `omega ^ omega`.
pub fn algebraic_defects<T: TripleField>(field: &T, points: &[T::Point]) -> Result<(f64, f64)> {
    let vals = points
        .par_iter()
        .map(|p| {
            let w = field.kahler_form(p)?;
            let o = field.holomorphic_form(p)?;
            let scale = w.wedge(&w).norm();
            Ok((o.wedge(&o).norm() / scale, w.wedge(&o).norm() / scale))
        })
        .collect::<Result<Vec<(f64, f64)>>>()?;
    Ok(vals.iter().fold((0.0, 0.0), |acc, v| (acc.0.max(v.0), acc.1.max(v.1))))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RotationParams {
    pub b0: f64,
    pub eps: f64,
    pub alpha: f64,
}

/// Semi-flat parameters matching the rotated Calabi end over `C / (Z + Z tau)`.
pub fn rotation_parameters(tau: C, b: i64) -> Result<RotationParams> {
    let curve = make_curve(tau, b)?;
    let b = f64::from(curve.b());
    Ok(RotationParams {
        b0: -0.5 * tau.re * b,
        eps: 2.0 * 2f64.sqrt() * PI / tau.im,
        alpha: (b * PI * tau.im).sqrt(),
    })
}

/// Inverse of [`rotation_parameters`] on `(b0, eps)`.
pub fn modulus_from_parameters(b0: f64, eps: f64, b: i64) -> Result<C> {
    let b = f64::from(crate::torus::validate_degree(b)?);
    if !(eps > 0.0) {
        return Err(Error::InvalidArgument(format!("eps = {eps} must be positive")));
    }
    Ok(C::new(-2.0 * b0 / b, 2.0 * 2f64.sqrt() * PI / eps))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RotationConsistency {
    pub params: RotationParams,
    pub level: f64,
    /// Phase of `Omega` on the fibre-class torus before adjustment.
    pub torus_phase: f64,
    /// `int_L Re(e^{-i theta} Omega)` over the fibre-class ansatz torus.
    pub rotated_fiber_period: f64,
    /// `alpha * eps`.
    pub expected_fiber_period: f64,
    pub relative_error: f64,
    /// `int_L omega` over the same torus.
    pub kahler_period: f64,
    pub calabi_constant: f64,
    pub rotated_calabi_constant: f64,
    /// Triple constant of the semi-flat model with the matching parameters;
    /// unchanged by the common scaling with `alpha`.
    pub semiflat_constant: f64,
    pub constants_agree: bool,
}

/// Quantities that must agree on both sides of the correspondence between
/// the rotated Calabi end and the semi-flat model, independent of the
/// identifying coordinates.
pub fn rotation_consistency(tau: C, b: i64, level: f64, nodes: usize) -> Result<RotationConsistency> {
    let params = rotation_parameters(tau, b)?;
    let curve = make_curve(tau, b)?;
    let chart = AnsatzChart::standard(curve);
    let line = TorusLine::new(1, 0, C::new(0.0, 0.0))?;
    let torus = slag::build_slag(&chart, &line, level)?;
    let grid = Grid2D::new(
        crate::numerics::Grid1D::periodic(0.0, 1.0, nodes)?,
        crate::numerics::Grid1D::periodic(0.0, std::f64::consts::TAU, nodes)?,
    );
    let profile = slag::phase_profile(&torus, &chart, &grid)?;
    let theta = profile.mean_phase;

    let sample = consistency_sample(&chart);
    let calabi_res = triple_residual(&chart, &sample)?;
    let adjusted = Scaled { inner: chart, factor: C::from_polar(1.0, -theta) };
    let rotated = rotate(adjusted, &sample, ROTATION_TOLERANCE)?;
    let rotated_res = triple_residual(&rotated, &sample)?;

    let fiber = slag::integrate_form(&torus, &rotated, FormChoice::Kahler, &grid)?.re;
    let kahler = slag::integrate_form(&torus, &chart, FormChoice::Kahler, &grid)?.re;
    let expected = params.alpha * params.eps;

    let sf = SemiFlatParams::calibrated(b, params.b0, params.eps)?;
    let sf_points: Vec<ModelPoint> = (1..=8)
        .map(|k| ModelPoint { u: C::from_polar(0.05 * k as f64, 0.7 * k as f64), v: C::new(0.1 * k as f64, 0.05) })
        .collect();
    let sf_res = triple_residual(&sf, &sf_points)?;

    Ok(RotationConsistency {
        params,
        level,
        torus_phase: theta,
        rotated_fiber_period: fiber,
        expected_fiber_period: expected,
        relative_error: (fiber - expected).abs() / expected,
        kahler_period: kahler,
        calabi_constant: calabi_res.mean,
        rotated_calabi_constant: rotated_res.mean,
        semiflat_constant: sf_res.mean,
        constants_agree: (rotated_res.mean - sf_res.mean).abs() < 1e-8 * sf_res.mean.abs(),
    })
}

fn consistency_sample(chart: &AnsatzChart) -> Vec<ChartPoint> {
    let tau = chart.curve().tau();
    (0..16)
        .map(|k| {
            let s = (k as f64 * 0.618_033_988_75).fract();
            let t = (k as f64 * 0.414_213_562_37).fract();
            ChartPoint::at_depth(chart, C::new(s, 0.0) + tau * t, 1.0 + k as f64, 0.37 * k as f64)
        })
        .collect()
}

/// `g` of a point-dependent Hermitian matrix field, exposed for oracles.
pub fn metric_at<M: MetricChart>(m: &M, x: &[f64; 4]) -> Result<Hermitian2> {
    Ok(Hermitian2(m.metric(&x.map(|r| C::new(r, 0.0)))?))
}
