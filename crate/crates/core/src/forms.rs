//! Pointwise tensors on a complex surface chart with coordinates
//! `(z1, z2)`, real coordinates `(x1, y1, x2, y2)`.

use std::ops::{Add, Mul, Sub};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::Scalar;

type C = Complex64;

/// Tangent vector given by its holomorphic components `(dz1(X), dz2(X))`.
pub type Tangent = [C; 2];

pub fn real_components(x: &Tangent) -> [f64; 4] {
    [x[0].re, x[0].im, x[1].re, x[1].im]
}

/// Hermitian matrix `g_{i jbar}` of a (1,1)-form `omega = i g_{i jbar} dz^i ^ dzbar^j`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Hermitian2(pub [[C; 2]; 2]);

impl Hermitian2 {
    pub fn identity() -> Self {
        let one = C::new(1.0, 0.0);
        let zero = C::new(0.0, 0.0);
        Self([[one, zero], [zero, one]])
    }

    pub fn det(&self) -> C {
        let g = &self.0;
        g[0][0] * g[1][1] - g[0][1] * g[1][0]
    }

    pub fn inverse(&self) -> Result<Self> {
        let d = self.det();
        if d.norm() == 0.0 || !d.is_finite() {
            return Err(Error::SingularMetric);
        }
        let g = &self.0;
        Ok(Self([[g[1][1] / d, -g[0][1] / d], [-g[1][0] / d, g[0][0] / d]]))
    }

    /// Sesquilinear form `h(X, Y) = g_{i jbar} X^i conj(Y^j)`.
    pub fn hermitian_form(&self, x: &Tangent, y: &Tangent) -> C {
        let g = &self.0;
        (0..2).flat_map(|i| (0..2).map(move |j| (i, j))).map(|(i, j)| g[i][j] * x[i] * y[j].conj()).sum()
    }

    /// Riemannian metric `2 Re h(X, Y)` associated with `omega = i g dz ^ dzbar`.
    pub fn riemannian(&self, x: &Tangent, y: &Tangent) -> f64 {
        2.0 * self.hermitian_form(x, y).re
    }

    /// `omega(X, Y) = -2 Im h(X, Y)`.
    pub fn kahler_pairing(&self, x: &Tangent, y: &Tangent) -> f64 {
        -2.0 * self.hermitian_form(x, y).im
    }

    pub fn is_positive_definite(&self) -> bool {
        let g = &self.0;
        g[0][0].re > 0.0 && self.det().re > 0.0
    }

    /// Largest deviation from being Hermitian.
    pub fn hermiticity_defect(&self) -> f64 {
        let g = &self.0;
        (g[0][0].im.abs()).max(g[1][1].im.abs()).max((g[0][1] - g[1][0].conj()).norm())
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }

    /// Columns of `P` with `P^T g conj(P) = 1`, i.e. a unitary frame.
    pub fn unitary_frame(&self) -> Result<[[C; 2]; 2]> {
        let g = &self.0;
        let a = g[0][0].re;
        if !(a > 0.0) {
            return Err(Error::SingularMetric);
        }
        // g = L L^*, L lower triangular
        let l00 = a.sqrt();
        let l10 = g[1][0] / l00;
        let rest = g[1][1].re - l10.norm_sqr();
        if !(rest > 0.0) {
            return Err(Error::SingularMetric);
        }
        let l11 = rest.sqrt();
        // P = (L^T)^{-1}; L^T = [[l00, l10], [0, l11]]
        let zero = C::new(0.0, 0.0);
        Ok([[C::new(1.0 / l00, 0.0), -l10 / (l00 * l11)], [zero, C::new(1.0 / l11, 0.0)]])
    }
}

impl Add for Hermitian2 {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        let mut out = self;
        for i in 0..2 {
            for j in 0..2 {
                out.0[i][j] += rhs.0[i][j];
            }
        }
        out
    }
}

impl Sub for Hermitian2 {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        self + rhs * -1.0
    }
}

impl Mul<f64> for Hermitian2 {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        let mut out = self;
        out.0.iter_mut().flatten().for_each(|c| *c *= k);
        out
    }
}

/// Complex-valued 2-form in the real coframe, components ordered
/// `01, 02, 03, 12, 13, 23` for `dx1, dy1, dx2, dy2`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct TwoForm(pub [C; 6]);

const PAIRS: [(usize, usize); 6] = [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)];

fn dz(k: usize) -> [C; 4] {
    let mut a = [C::new(0.0, 0.0); 4];
    a[2 * k] = C::new(1.0, 0.0);
    a[2 * k + 1] = C::i();
    a
}

fn dzbar(k: usize) -> [C; 4] {
    dz(k).map(|c| c.conj())
}

fn wedge1(a: &[C; 4], b: &[C; 4]) -> TwoForm {
    TwoForm(PAIRS.map(|(p, q)| a[p] * b[q] - a[q] * b[p]))
}

impl TwoForm {
    /// `i g_{i jbar} dz^i ^ dzbar^j`.
    pub fn kahler(g: &Hermitian2) -> Self {
        let mut out = TwoForm::default();
        for i in 0..2 {
            for j in 0..2 {
                out = out + wedge1(&dz(i), &dzbar(j)).scale(C::i() * g.0[i][j]);
            }
        }
        out
    }

    /// `coeff dz1 ^ dz2`.
    pub fn holomorphic(coeff: C) -> Self {
        wedge1(&dz(0), &dz(1)).scale(coeff)
    }

    pub fn scale(&self, k: C) -> Self {
        Self(self.0.map(|c| c * k))
    }

    pub fn re(&self) -> Self {
        Self(self.0.map(|c| C::new(c.re, 0.0)))
    }

    pub fn im(&self) -> Self {
        Self(self.0.map(|c| C::new(c.im, 0.0)))
    }

    pub fn conj(&self) -> Self {
        Self(self.0.map(|c| c.conj()))
    }

    /// Coefficient of `alpha ^ beta` against `dx1 ^ dy1 ^ dx2 ^ dy2`.
    pub fn wedge(&self, other: &Self) -> C {
        let a = &self.0;
        let b = &other.0;
        a[0] * b[5] + a[5] * b[0] - a[1] * b[4] - a[4] * b[1] + a[2] * b[3] + a[3] * b[2]
    }

    pub fn eval_real(&self, x: &[f64; 4], y: &[f64; 4]) -> C {
        PAIRS.iter().zip(&self.0).map(|(&(p, q), c)| c * (x[p] * y[q] - x[q] * y[p])).sum()
    }

    pub fn eval(&self, x: &Tangent, y: &Tangent) -> C {
        self.eval_real(&real_components(x), &real_components(y))
    }

    pub fn max_abs(&self) -> f64 {
        self.0.iter().map(|c| c.norm()).fold(0.0, f64::max)
    }

    pub fn max_imag(&self) -> f64 {
        self.0.iter().map(|c| c.im.abs()).fold(0.0, f64::max)
    }
}

impl Add for TwoForm {
    type Output = Self;
    fn add(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] + rhs.0[k]))
    }
}

impl Mul<f64> for TwoForm {
    type Output = Self;
    fn mul(self, k: f64) -> Self {
        Self(self.0.map(|c| c * k))
    }
}

impl Sub for TwoForm {
    type Output = Self;
    fn sub(self, rhs: Self) -> Self {
        Self(std::array::from_fn(|k| self.0[k] - rhs.0[k]))
    }
}

/// `2 (omega ^ omega) / (Omega ^ conj Omega)`; equal to one for a normalised
/// hyperKähler triple.
pub fn triple_ratio(omega: &TwoForm, big_omega: &TwoForm) -> Result<f64> {
    let top = big_omega.wedge(&big_omega.conj());
    if top.norm() == 0.0 || !top.is_finite() {
        return Err(Error::DegenerateTopForm);
    }
    Ok((2.0 * omega.wedge(omega) / top).re)
}

/// Metric, Kähler form and holomorphic coefficient at one chart point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TensorsAtPoint {
    pub g: Hermitian2,
    pub omega: TwoForm,
    /// Coefficient of `dz1 ^ dz2` in the holomorphic 2-form.
    pub omega_coeff: C,
}

impl TensorsAtPoint {
    pub fn new(g: Hermitian2, omega_coeff: C) -> Self {
        Self { g, omega: TwoForm::kahler(&g), omega_coeff }
    }

    pub fn holomorphic_form(&self) -> TwoForm {
        TwoForm::holomorphic(self.omega_coeff)
    }

    pub fn triple_ratio(&self) -> Result<f64> {
        triple_ratio(&self.omega, &self.holomorphic_form())
    }
}

/// Kähler metric on a chart, with components written once over [`Scalar`]
/// so that the same formula gives values and exact derivatives.
pub trait MetricChart: Sync {
    type Point: Clone + Send + Sync + std::fmt::Debug;

    /// Real chart coordinates `(x1, y1, x2, y2)` of a point.
    fn coordinates(&self, p: &Self::Point) -> [f64; 4];

    /// `g_{i jbar}` at real coordinates `x`.
    fn metric<S: Scalar>(&self, x: &[S; 4]) -> Result<[[S; 2]; 2]>;

    /// Coefficient of `dz1 ^ dz2` in the holomorphic 2-form.
    fn holomorphic_coefficient(&self, x: &[f64; 4]) -> Result<C>;

    fn tensors_at(&self, x: &[f64; 4]) -> Result<TensorsAtPoint> {
        let xs = x.map(|r| C::new(r, 0.0));
        let g = self.metric(&xs)?;
        Ok(TensorsAtPoint::new(Hermitian2(g), self.holomorphic_coefficient(x)?))
    }
}
