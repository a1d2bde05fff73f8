//! Finite differences. These are oracles for the jet-based derivatives, never
//! the primary path.

use std::ops::{Add, Mul, Sub};

use crate::error::Error;

/// Values that can be combined linearly by a difference stencil.
pub trait Linear: Clone + Add<Output = Self> + Sub<Output = Self> + Mul<f64, Output = Self> {}

impl<T> Linear for T where T: Clone + Add<Output = T> + Sub<Output = T> + Mul<f64, Output = T> {}

fn five_point<V, E, F>(f: &F, point: &[f64], axis: usize, h: f64) -> Result<V, E>
where
    V: Linear,
    F: Fn(&[f64]) -> Result<V, E>,
{
    let mut x = point.to_vec();
    let mut at = |offset: f64| {
        x[axis] = point[axis] + offset;
        f(&x)
    };
    let p2 = at(2.0 * h)?;
    let p1 = at(h)?;
    let m1 = at(-h)?;
    let m2 = at(-2.0 * h)?;
    Ok(((p1 - m1) * 8.0 - (p2 - m2)) * (1.0 / (12.0 * h)))
}

/// Partial derivative of `f` along `axis` at `point`.
///
/// Five-point central stencil (fourth order) evaluated at `step` and
/// `step / 2`, combined by one Richardson step, so polynomials up to degree
/// six are differentiated exactly up to rounding.
pub fn central_diff<V, E, F>(f: F, point: &[f64], axis: usize, step: f64) -> Result<V, E>
where
    V: Linear,
    E: From<Error>,
    F: Fn(&[f64]) -> Result<V, E>,
{
    if !(step > 0.0) || !step.is_finite() {
        return Err(Error::InvalidArgument(format!("step must be positive, got {step}")).into());
    }
    if axis >= point.len() {
        return Err(Error::Dimension { expected: point.len(), got: axis }.into());
    }
    let coarse = five_point(&f, point, axis, step)?;
    let fine = five_point(&f, point, axis, 0.5 * step)?;
    Ok((fine * 16.0 - coarse) * (1.0 / 15.0))
}

/// Second partial derivative `d^2 f / dx_i dx_j` by nesting [`central_diff`].
pub fn central_diff2<V, E, F>(f: F, point: &[f64], i: usize, j: usize, step: f64) -> Result<V, E>
where
    V: Linear,
    E: From<Error>,
    F: Fn(&[f64]) -> Result<V, E>,
{
    central_diff(|x: &[f64]| central_diff(&f, x, j, step), point, i, step)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    type R<T> = Result<T, Error>;

    #[test]
    fn square_is_exact() {
        let d = central_diff(|x: &[f64]| R::Ok(x[0] * x[0]), &[3.0], 0, 1e-3).unwrap();
        assert!((d - 6.0).abs() < 1e-9);
    }

    #[test]
    fn constant_is_zero() {
        let d = central_diff(|_: &[f64]| R::Ok(4.25), &[1.0, -2.0], 1, 0.1).unwrap();
        assert_eq!(d, 0.0);
    }

    #[test]
    fn exponential_at_origin() {
        let d = central_diff(|x: &[f64]| R::Ok(x[0].exp()), &[0.0], 0, 1e-2).unwrap();
        assert!((d - 1.0).abs() < 1e-10, "{d}");
    }

    #[test]
    fn quartic_polynomials_are_exact() {
        let f = |x: &[f64]| R::Ok(3.0 * x[0].powi(4) - x[0].powi(3) + 2.0 * x[0] - 7.0);
        let d = central_diff(f, &[1.3], 0, 0.05).unwrap();
        let exact = 12.0 * 1.3f64.powi(3) - 3.0 * 1.3f64.powi(2) + 2.0;
        assert!((d - exact).abs() < 1e-11 * exact.abs());
    }

    #[test]
    fn mixed_second_derivative() {
        let f = |x: &[f64]| R::Ok((x[0] * x[1]).sin());
        let (a, b) = (0.4, 0.9);
        let d = central_diff2(f, &[a, b], 0, 1, 1e-2).unwrap();
        let exact = (a * b).cos() - a * b * (a * b).sin();
        assert!((d - exact).abs() < 1e-9);
    }

    #[test]
    fn complex_values() {
        let f = |x: &[f64]| R::Ok(Complex64::new(0.0, x[0]).exp());
        let d: Complex64 = central_diff(f, &[0.7], 0, 1e-2).unwrap();
        let exact = Complex64::i() * Complex64::new(0.0, 0.7).exp();
        assert!((d - exact).norm() < 1e-10);
    }

    #[test]
    fn rejects_bad_step() {
        assert!(central_diff(|x: &[f64]| R::Ok(x[0]), &[0.0], 0, 0.0).is_err());
    }

    #[test]
    fn propagates_evaluation_failure() {
        let r: R<f64> = central_diff(
            |x: &[f64]| if x[0] > 0.0 { Err(Error::ZeroSection) } else { Ok(x[0]) },
            &[0.0],
            0,
            0.1,
        );
        assert_eq!(r, Err(Error::ZeroSection));
    }
}
