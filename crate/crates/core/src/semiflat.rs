//! Semi-flat hyperKähler structures on `Delta* x C / Lambda(u)`, with
//! `Lambda(u) = Z + Z (b / 2 pi i) log u`.
//!
//! The Kähler form is
//! `(i/2) W eps (dv + G du) ^ conj(dv + G du) + (|kappa|^2 / (eps W |u|^2)) (i/2) du ^ dubar`
//! with `W = 2 pi / (b |log|u||)`, `G = B + b0 |log|u|| / (2 pi^2 u)` and
//! `B = i Im(v) / (u |log|u||)`. The holomorphic form is `(kappa / u) dv ^ du`.
//! Chart coordinates are `(Re u, Im u, Re v, Im v)`.

use std::f64::consts::{PI, TAU};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::forms::{MetricChart, Tangent, TwoForm};
use crate::numerics::{try_quadrature_periodic_2d, Grid1D, Grid2D, Scalar};
use crate::torus::validate_degree;

type C = Complex64;

pub const PERIOD_GRID: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SemiFlatParams {
    b: u32,
    b0: f64,
    eps: f64,
    kappa: Option<C>,
}

impl SemiFlatParams {
    pub fn new(b: i64, b0: f64, eps: f64) -> Result<Self> {
        let b = validate_degree(b)?;
        if !(eps > 0.0) || !eps.is_finite() {
            return Err(Error::InvalidArgument(format!("fibre size eps = {eps} must be positive")));
        }
        if !b0.is_finite() {
            return Err(Error::InvalidArgument("b0 must be finite".into()));
        }
        Ok(Self { b, b0, eps, kappa: None })
    }

    /// Parameters calibrated so that `int_C Omega = 1`.
    pub fn calibrated(b: i64, b0: f64, eps: f64) -> Result<Self> {
        let p = Self::new(b, b0, eps)?;
        let kappa = calibrate_kappa(&p, 0.1)?;
        Ok(p.with_kappa(kappa))
    }

    pub fn with_kappa(mut self, kappa: C) -> Self {
        self.kappa = Some(kappa);
        self
    }

    pub fn with_b0(mut self, b0: f64) -> Self {
        self.b0 = b0;
        self
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    pub fn b0(&self) -> f64 {
        self.b0
    }

    pub fn eps(&self) -> f64 {
        self.eps
    }

    pub fn kappa(&self) -> Option<C> {
        self.kappa
    }

    fn kappa_or_err(&self) -> Result<C> {
        self.kappa.ok_or(Error::Uncalibrated)
    }

    /// Second lattice generator `(b / 2 pi i) log u` (principal branch).
    pub fn lattice_generator(&self, u: C) -> C {
        f64::from(self.b) * u.ln() / C::new(0.0, TAU)
    }
}

fn check_disc(r: f64) -> Result<()> {
    if r > 0.0 && r < 1.0 {
        Ok(())
    } else {
        Err(Error::OutsideDisc(r))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ModelPoint {
    pub u: C,
    pub v: C,
}

impl ModelPoint {
    pub fn new(u: C, v: C) -> Result<Self> {
        check_disc(u.norm())?;
        Ok(Self { u, v })
    }

    /// Representative of `v` in the parallelogram spanned by `1` and the
    /// second lattice generator.
    pub fn reduced(&self, params: &SemiFlatParams) -> Self {
        let w2 = params.lattice_generator(self.u);
        let t = (self.v.im / w2.im).floor();
        let v = self.v - w2 * t;
        Self { u: self.u, v: C::new(v.re - v.re.floor(), v.im) }
    }
}

impl MetricChart for SemiFlatParams {
    type Point = ModelPoint;

    fn coordinates(&self, p: &ModelPoint) -> [f64; 4] {
        [p.u.re, p.u.im, p.v.re, p.v.im]
    }

    fn metric<S: Scalar>(&self, x: &[S; 4]) -> Result<[[S; 2]; 2]> {
        let kappa = self.kappa_or_err()?;
        let uu = x[0].clone() * x[0].clone() + x[1].clone() * x[1].clone();
        check_disc(uu.value().re.sqrt())?;
        let u = x[0].clone() + x[1].scale(C::i());
        let b = f64::from(self.b);
        // L = |log|u|| = -log|u|
        let l = uu.ln().scale(C::new(-0.5, 0.0));
        // W eps / 2
        let g_fib = l.powf(-1.0).scale(C::new(PI * self.eps / b, 0.0));
        let big_b = x[3].scale(C::i()) / (u.clone() * l.clone());
        let gamma = big_b + l.clone().scale(C::new(self.b0 / (2.0 * PI * PI), 0.0)) / u;
        // |kappa|^2 / (eps W |u|^2) = |kappa|^2 b L / (2 pi eps |u|^2)
        let base = l / uu;
        let g_uu = base.scale(C::new(kappa.norm_sqr() * b / (TAU * self.eps), 0.0))
            + g_fib.clone() * gamma.clone() * gamma.conj();
        let g_uv = g_fib.clone() * gamma.clone();
        let g_vu = g_fib.clone() * gamma.conj();
        Ok([[g_uu, g_uv], [g_vu, g_fib]])
    }

    fn holomorphic_coefficient(&self, x: &[f64; 4]) -> Result<C> {
        let kappa = self.kappa_or_err()?;
        let u = C::new(x[0], x[1]);
        check_disc(u.norm())?;
        // (kappa / u) dv ^ du = -(kappa / u) du ^ dv
        Ok(-kappa / u)
    }
}

pub fn semiflat_tensors(params: &SemiFlatParams, p: &ModelPoint) -> Result<crate::forms::TensorsAtPoint> {
    params.tensors_at(&params.coordinates(p))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FormSelector {
    Kahler,
    HolomorphicRe,
    HolomorphicIm,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum CycleKind {
    Fiber,
    BadCycle,
    QuasiBad,
}

/// A 2-cycle. `radius` is `|u|` of the base point (fibre) or circle (bad
/// cycle); `m` is the multiple of the bad cycle in `m [C] + [F]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CycleSpec {
    pub kind: CycleKind,
    pub m: i64,
    pub radius: f64,
}

impl CycleSpec {
    pub fn fiber(radius: f64) -> Self {
        Self { kind: CycleKind::Fiber, m: 0, radius }
    }

    pub fn bad(radius: f64) -> Self {
        Self { kind: CycleKind::BadCycle, m: 1, radius }
    }

    pub fn quasi_bad(m: i64, radius: f64) -> Self {
        Self { kind: CycleKind::QuasiBad, m, radius }
    }
}

fn select(form: FormSelector, omega: &TwoForm, hol: &TwoForm, x: &Tangent, y: &Tangent) -> f64 {
    match form {
        FormSelector::Kahler => omega.eval(x, y).re,
        FormSelector::HolomorphicRe => hol.eval(x, y).re,
        FormSelector::HolomorphicIm => hol.eval(x, y).im,
    }
}

/// Integral of a form over a parameterised surface `(s, t) -> point` with
/// tangents, on a periodic grid.
fn surface_integral<F>(params: &SemiFlatParams, grid: &Grid2D, param: F, form: FormSelector) -> Result<f64>
where
    F: Fn(f64, f64) -> (ModelPoint, Tangent, Tangent),
{
    try_quadrature_periodic_2d(
        |s, t| {
            let (p, x, y) = param(s, t);
            let tensors = semiflat_tensors(params, &p)?;
            Ok(select(form, &tensors.omega, &tensors.holomorphic_form(), &x, &y))
        },
        grid,
    )
}

fn bad_cycle_grid(nodes: usize) -> Result<Grid2D> {
    Ok(Grid2D::new(Grid1D::periodic(0.0, 1.0, nodes)?, Grid1D::periodic(0.0, TAU, nodes)?))
}

fn bad_cycle_param(radius: f64) -> impl Fn(f64, f64) -> (ModelPoint, Tangent, Tangent) {
    move |x, theta| {
        let u = C::from_polar(radius, theta);
        let p = ModelPoint { u, v: C::new(x, 0.0) };
        (p, [C::new(0.0, 0.0), C::new(1.0, 0.0)], [C::i() * u, C::new(0.0, 0.0)])
    }
}

/// `kappa` with `int_C (kappa / u) dv ^ du = 1`, the bad cycle `C` being
/// `{|u| = radius, Im v = 0}` oriented by `(Re v, arg u)`.
pub fn calibrate_kappa(params: &SemiFlatParams, radius: f64) -> Result<C> {
    check_disc(radius)?;
    let unit = params.with_kappa(C::new(1.0, 0.0));
    let grid = bad_cycle_grid(PERIOD_GRID)?;
    let re = surface_integral(&unit, &grid, bad_cycle_param(radius), FormSelector::HolomorphicRe)?;
    let im = surface_integral(&unit, &grid, bad_cycle_param(radius), FormSelector::HolomorphicIm)?;
    let total = C::new(re, im);
    if total.norm() < 1e-300 || !total.is_finite() {
        return Err(Error::DegenerateQuadrature("Omega integrates to zero over C".into()));
    }
    Ok(C::new(1.0, 0.0) / total)
}

pub fn period(params: &SemiFlatParams, form: FormSelector, cycle: &CycleSpec) -> Result<f64> {
    period_with_grid(params, form, cycle, PERIOD_GRID)
}

pub fn period_with_grid(params: &SemiFlatParams, form: FormSelector, cycle: &CycleSpec, nodes: usize) -> Result<f64> {
    params.kappa_or_err()?;
    check_disc(cycle.radius)?;
    match cycle.kind {
        CycleKind::Fiber => {
            let u = C::new(cycle.radius, 0.0);
            let w2 = params.lattice_generator(u);
            let grid = Grid2D::unit_torus(nodes)?;
            let param = move |s: f64, t: f64| {
                let p = ModelPoint { u, v: w2 * t + s };
                (p, [C::new(0.0, 0.0), C::new(1.0, 0.0)], [C::new(0.0, 0.0), w2])
            };
            surface_integral(params, &grid, param, form)
        }
        CycleKind::BadCycle => surface_integral(params, &bad_cycle_grid(nodes)?, bad_cycle_param(cycle.radius), form),
        CycleKind::QuasiBad => {
            let c = period_with_grid(params, form, &CycleSpec::bad(cycle.radius), nodes)?;
            let f = period_with_grid(params, form, &CycleSpec::fiber(cycle.radius), nodes)?;
            Ok(cycle.m as f64 * c + f)
        }
    }
}

/// Largest variation of the fibre metric `g_{v vbar}` over a grid of the
/// fibre above `u`.
pub fn fiber_flatness(params: &SemiFlatParams, u: C, nodes: usize) -> Result<f64> {
    let w2 = params.lattice_generator(u);
    let grid = Grid2D::unit_torus(nodes)?;
    let reference = semiflat_tensors(params, &ModelPoint::new(u, C::new(0.0, 0.0))?)?.g.0[1][1];
    let mut worst: f64 = 0.0;
    for s in grid.x.points() {
        for t in grid.y.points() {
            let g = semiflat_tensors(params, &ModelPoint::new(u, w2 * t + s)?)?.g.0[1][1];
            worst = worst.max((g - reference).norm());
        }
    }
    Ok(worst)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FibrationVerdict {
    pub m: i64,
    /// `m [C] + [F]` is always primitive; recorded for completeness.
    pub primitive: bool,
    pub period_bad_cycle: f64,
    pub period_fiber: f64,
    pub period_total: f64,
    pub tolerance: f64,
    pub fibred: bool,
}

/// Whether `m [C] + [F]` carries a special Lagrangian fibration, i.e.
/// whether `omega` integrates to zero over it.
pub fn fibration_criterion(params: &SemiFlatParams, m: i64, radius: f64, tolerance: f64) -> Result<FibrationVerdict> {
    let pc = period(params, FormSelector::Kahler, &CycleSpec::bad(radius))?;
    let pf = period(params, FormSelector::Kahler, &CycleSpec::fiber(radius))?;
    let total = m as f64 * pc + pf;
    Ok(FibrationVerdict {
        m,
        primitive: true,
        period_bad_cycle: pc,
        period_fiber: pf,
        period_total: total,
        tolerance,
        fibred: total.abs() < tolerance,
    })
}

/// Finds `b0` with `int_{m C + F} omega = 0` by secant iteration on the
/// measured period.
pub fn tune_b0(params: &SemiFlatParams, m: i64, radius: f64) -> Result<f64> {
    if m == 0 {
        return Err(Error::InvalidArgument("m = 0: the fibre class always has positive area".into()));
    }
    let g = |b0: f64| period(&params.with_b0(b0), FormSelector::Kahler, &CycleSpec::quasi_bad(m, radius));
    let (mut x0, mut x1) = (0.0, -1.0);
    let (mut f0, mut f1) = (g(x0)?, g(x1)?);
    for _ in 0..50 {
        if f1.abs() < 1e-14 * params.eps.max(1.0) || f1 == f0 {
            break;
        }
        let x2 = x1 - f1 * (x1 - x0) / (f1 - f0);
        (x0, f0) = (x1, f1);
        x1 = x2;
        f1 = g(x1)?;
    }
    Ok(x1)
}

/// Monodromy of `Lambda(u)` around `u = 0`, in the ordered basis
/// `(1, (b / 2 pi i) log u)`, obtained by continuing `log u` along the circle.
pub fn monodromy(b: i64) -> Result<[[i64; 2]; 2]> {
    let b = f64::from(validate_degree(b)?);
    let radius: f64 = 0.5;
    let steps = 256;
    let mut log_u = C::new(radius.ln(), 0.0);
    let mut prev = C::new(radius, 0.0);
    for k in 1..=steps {
        let u = C::from_polar(radius, TAU * k as f64 / steps as f64);
        // continue the logarithm: increment by the principal log of the ratio
        log_u += (u / prev).ln();
        prev = u;
    }
    let e1 = C::new(1.0, 0.0);
    let e2 = b * C::new(radius.ln(), 0.0) / C::new(0.0, TAU);
    let e2_final = b * log_u / C::new(0.0, TAU);
    // solve x e1 + y e2 = target over the reals
    let coords = |target: C| -> Result<[i64; 2]> {
        let det = e1.re * e2.im - e1.im * e2.re;
        let x = (target.re * e2.im - target.im * e2.re) / det;
        let y = (e1.re * target.im - e1.im * target.re) / det;
        let (xr, yr) = (x.round(), y.round());
        if (x - xr).abs() > 1e-9 || (y - yr).abs() > 1e-9 {
            return Err(Error::DegenerateQuadrature(format!("non-integral monodromy coordinates ({x}, {y})")));
        }
        Ok([xr as i64, yr as i64])
    };
    let c1 = coords(e1)?;
    let c2 = coords(e2_final)?;
    Ok([[c1[0], c2[0]], [c1[1], c2[1]]])
}
