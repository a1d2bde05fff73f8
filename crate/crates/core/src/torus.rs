//! The base elliptic curve `D = C / (Z + Z tau)` with its flat Kähler form
//! `omega_D = lambda (i/2) dz ^ dzbar` and holomorphic form `Omega_D = c dz`.

use std::f64::consts::TAU;

use num_complex::Complex64;
use num_integer::Integer;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{quadrature_periodic_2d, Grid2D};

pub const MAX_DEGREE: i64 = 9;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EllipticCurveData {
    tau: Complex64,
    b: u32,
    lambda: f64,
}

impl EllipticCurveData {
    pub fn tau(&self) -> Complex64 {
        self.tau
    }

    pub fn b(&self) -> u32 {
        self.b
    }

    /// Metric density, `2 pi b / Im tau`.
    pub fn lambda(&self) -> f64 {
        self.lambda
    }

    /// Point `s + t tau` of the fundamental parallelogram.
    pub fn point(&self, s: f64, t: f64) -> Complex64 {
        s + self.tau * t
    }

    /// Area of the fundamental parallelogram in the coordinate `dx dy`.
    pub fn coordinate_area(&self) -> f64 {
        self.tau.im
    }
}

pub fn validate_degree(b: i64) -> Result<u32> {
    if (1..=MAX_DEGREE).contains(&b) {
        Ok(b as u32)
    } else {
        Err(Error::UnsupportedDegree(b))
    }
}

pub fn make_curve(tau: Complex64, b: i64) -> Result<EllipticCurveData> {
    if !(tau.im > 0.0) || !tau.re.is_finite() || !tau.im.is_finite() {
        return Err(Error::InvalidModulus(tau.im));
    }
    let b = validate_degree(b)?;
    Ok(EllipticCurveData { tau, b, lambda: TAU * f64::from(b) / tau.im })
}

/// Coefficient `c` of `Omega_D = c dz`, real and positive with `|c|^2 = lambda`.
pub fn holomorphic_volume(curve: &EllipticCurveData) -> Complex64 {
    Complex64::new(curve.lambda.sqrt(), 0.0)
}

/// `int_D omega_D` by the trapezoid rule in the chart `z = s + t tau`.
pub fn kahler_area(curve: &EllipticCurveData, grid: &Grid2D) -> Result<f64> {
    // dx ^ dy = Im(tau) ds ^ dt; (i/2) dz ^ dzbar = dx ^ dy.
    let jac = curve.tau.im;
    quadrature_periodic_2d(|_, _| curve.lambda * jac, grid)
}

/// Straight closed geodesic in the class `p [1] + q [tau]` through `offset`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TorusLine {
    p: i64,
    q: i64,
    offset: Complex64,
}

impl TorusLine {
    pub fn new(p: i64, q: i64, offset: Complex64) -> Result<Self> {
        if p.gcd(&q) != 1 {
            return Err(Error::NotPrimitive(p, q));
        }
        Ok(Self { p, q, offset })
    }

    pub fn class(&self) -> (i64, i64) {
        (self.p, self.q)
    }

    pub fn offset(&self) -> Complex64 {
        self.offset
    }

    /// Period vector `p + q tau`; the line is `offset + s (p + q tau)`, `s in [0, 1)`.
    pub fn direction(&self, curve: &EllipticCurveData) -> Complex64 {
        Complex64::new(self.p as f64, 0.0) + curve.tau * self.q as f64
    }

    pub fn point(&self, curve: &EllipticCurveData, s: f64) -> Complex64 {
        self.offset + self.direction(curve) * s
    }
}

fn wrap_angle(theta: f64) -> f64 {
    let t = theta.rem_euclid(TAU);
    if t >= TAU {
        0.0
    } else {
        t
    }
}

/// Phase `theta in [0, 2 pi)` with `Omega_D |_line = e^{i theta} vol`.
pub fn line_phase(curve: &EllipticCurveData, line: &TorusLine) -> f64 {
    wrap_angle((holomorphic_volume(curve) * line.direction(curve)).arg())
}

/// Calibration defect of a line: `(|Im(e^{-i theta} Omega_D(v))|, |Re(e^{-i theta} Omega_D(v)) - |v|_g|)`
/// for the unit-parameter tangent `v`. The structure is translation
/// invariant, so one evaluation covers every point of the line.
pub fn line_calibration_defect(curve: &EllipticCurveData, line: &TorusLine) -> (f64, f64) {
    let theta = line_phase(curve, line);
    let v = line.direction(curve);
    let val = Complex64::from_polar(1.0, -theta) * holomorphic_volume(curve) * v;
    let length = (curve.lambda * v.norm_sqr()).sqrt();
    (val.im.abs(), (val.re - length).abs())
}

/// `max |(i/2) Omega_D ^ conj(Omega_D) - omega_D|` as coefficients of `dx ^ dy`.
pub fn volume_identity_defect(curve: &EllipticCurveData) -> f64 {
    let c = holomorphic_volume(curve);
    // (i/2) |c|^2 dz ^ dzbar = |c|^2 dx ^ dy
    (c.norm_sqr() - curve.lambda).abs()
}

pub fn default_area_grid() -> Grid2D {
    Grid2D::unit_torus(32).expect("static grid")
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    fn c(re: f64, im: f64) -> Complex64 {
        Complex64::new(re, im)
    }

    #[test]
    fn lambda_for_square_torus() {
        let d = make_curve(c(0.0, 1.0), 1).unwrap();
        assert!((d.lambda() - TAU).abs() < 1e-15);
        let area = kahler_area(&d, &default_area_grid()).unwrap();
        assert!((area - TAU).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(make_curve(c(0.0, -1.0), 1), Err(Error::InvalidModulus(-1.0)));
        assert_eq!(make_curve(c(0.0, 1.0), 10), Err(Error::UnsupportedDegree(10)));
        assert_eq!(make_curve(c(0.0, 1.0), 0), Err(Error::UnsupportedDegree(0)));
        assert!(TorusLine::new(2, 4, c(0.0, 0.0)).is_err());
    }

    #[test]
    fn holomorphic_volume_examples() {
        let a = holomorphic_volume(&make_curve(c(0.0, 1.0), 1).unwrap());
        let b = holomorphic_volume(&make_curve(c(0.0, 2.0), 2).unwrap());
        assert!((a - c(TAU.sqrt(), 0.0)).norm() < 1e-15);
        assert!((b - c(TAU.sqrt(), 0.0)).norm() < 1e-15);
        for tau in [c(0.0, 1.0), c(1.0, 1.0), c(0.5, 2.0)] {
            for b in 1..=9 {
                let d = make_curve(tau, b).unwrap();
                assert!(volume_identity_defect(&d) < 1e-12 * d.lambda());
                assert_eq!(holomorphic_volume(&d).arg(), 0.0);
            }
        }
    }

    #[test]
    fn line_phases() {
        let d = make_curve(c(0.0, 1.0), 1).unwrap();
        let phase = |p, q| line_phase(&d, &TorusLine::new(p, q, c(0.0, 0.0)).unwrap());
        assert_eq!(phase(1, 0), 0.0);
        assert!((phase(0, 1) - PI / 2.0).abs() < 1e-15);
        assert!((phase(1, 1) - PI / 4.0).abs() < 1e-15);
        assert!((phase(-1, 0) - PI).abs() < 1e-15);
        assert!((phase(0, -1) - 1.5 * PI).abs() < 1e-15);
    }

    #[test]
    fn lines_are_calibrated() {
        for tau in [c(0.0, 1.0), c(0.0, 2.0), c(1.0, 1.0), c(0.5, 2.0)] {
            let d = make_curve(tau, 3).unwrap();
            for (p, q) in [(1, 0), (0, 1), (1, 1), (2, -3), (-5, 7)] {
                let line = TorusLine::new(p, q, c(0.1, 0.2)).unwrap();
                let (im, re) = line_calibration_defect(&d, &line);
                assert!(im < 1e-12 && re < 1e-12, "{p},{q}: {im} {re}");
            }
        }
    }
}
