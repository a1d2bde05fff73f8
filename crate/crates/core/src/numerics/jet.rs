//! Second-order forward-mode jets in the four real coordinates of a complex
//! surface chart, `(x1, y1, x2, y2)` with `z1 = x1 + i y1`, `z2 = x2 + i y2`.
//!
//! Chart formulas are written once, generically over [`Scalar`], and
//! evaluated either on plain `Complex64` (values, finite-difference oracles)
//! or on [`Jet`] (values plus exact first and second derivatives).

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

pub const NVARS: usize = 4;

type C = Complex64;

pub trait Scalar:
    Clone + Add<Output = Self> + Sub<Output = Self> + Mul<Output = Self> + Div<Output = Self> + Neg<Output = Self>
{
    fn constant(c: C) -> Self;

    fn value(&self) -> C;

    fn exp(&self) -> Self;

    /// Principal branch.
    fn ln(&self) -> Self;

    fn powf(&self, p: f64) -> Self;

    fn conj(&self) -> Self;

    fn real(r: f64) -> Self {
        Self::constant(C::new(r, 0.0))
    }

    fn scale(&self, c: C) -> Self {
        self.clone() * Self::constant(c)
    }

    fn re(&self) -> Self {
        (self.clone() + self.conj()).scale(C::new(0.5, 0.0))
    }

    fn im(&self) -> Self {
        (self.clone() - self.conj()).scale(C::new(0.0, -0.5))
    }

    fn norm_sqr(&self) -> Self {
        self.clone() * self.conj()
    }
}

impl Scalar for C {
    fn constant(c: C) -> Self {
        c
    }
    fn value(&self) -> C {
        *self
    }
    fn exp(&self) -> Self {
        C::exp(*self)
    }
    fn ln(&self) -> Self {
        C::ln(*self)
    }
    fn powf(&self, p: f64) -> Self {
        if self.im == 0.0 && self.re > 0.0 {
            C::new(self.re.powf(p), 0.0)
        } else {
            C::powf(*self, p)
        }
    }
    fn conj(&self) -> Self {
        C::conj(self)
    }
}

/// Value, gradient and Hessian with respect to the real chart coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Jet {
    pub value: C,
    pub grad: [C; NVARS],
    pub hess: [[C; NVARS]; NVARS],
}

impl Jet {
    const ZERO_GRAD: [C; NVARS] = [C::new(0.0, 0.0); NVARS];
    const ZERO_HESS: [[C; NVARS]; NVARS] = [[C::new(0.0, 0.0); NVARS]; NVARS];

    /// The coordinate function `x_k` evaluated at `at`.
    pub fn variable(k: usize, at: f64) -> Self {
        let mut grad = Self::ZERO_GRAD;
        grad[k] = C::new(1.0, 0.0);
        Self { value: C::new(at, 0.0), grad, hess: Self::ZERO_HESS }
    }

    /// All four coordinate jets at a point.
    pub fn coordinates(at: [f64; NVARS]) -> [Self; NVARS] {
        std::array::from_fn(|k| Self::variable(k, at[k]))
    }

    /// `f(self)` given `f`, `f'`, `f''` at the current value.
    fn chain(&self, f0: C, f1: C, f2: C) -> Self {
        let mut out = Self { value: f0, grad: Self::ZERO_GRAD, hess: Self::ZERO_HESS };
        for i in 0..NVARS {
            out.grad[i] = f1 * self.grad[i];
            for j in 0..NVARS {
                out.hess[i][j] = f1 * self.hess[i][j] + f2 * self.grad[i] * self.grad[j];
            }
        }
        out
    }

    fn recip(&self) -> Self {
        let r = C::new(1.0, 0.0) / self.value;
        self.chain(r, -r * r, 2.0 * r * r * r)
    }

    /// Wirtinger derivative `d/dz_k` (k = 0, 1).
    pub fn d_holo(&self, k: usize) -> C {
        0.5 * (self.grad[2 * k] - C::i() * self.grad[2 * k + 1])
    }

    /// Wirtinger derivative `d/dzbar_k`.
    pub fn d_anti(&self, k: usize) -> C {
        0.5 * (self.grad[2 * k] + C::i() * self.grad[2 * k + 1])
    }

    /// Mixed derivative `d^2 / dz_k dzbar_l`.
    pub fn d_mixed(&self, k: usize, l: usize) -> C {
        let h = &self.hess;
        let (xk, yk, xl, yl) = (2 * k, 2 * k + 1, 2 * l, 2 * l + 1);
        0.25 * (h[xk][xl] + C::i() * h[xk][yl] - C::i() * h[yk][xl] + h[yk][yl])
    }

    /// Holomorphic second derivative `d^2 / dz_k dz_l`.
    pub fn d_holo2(&self, k: usize, l: usize) -> C {
        let h = &self.hess;
        let (xk, yk, xl, yl) = (2 * k, 2 * k + 1, 2 * l, 2 * l + 1);
        0.25 * (h[xk][xl] - C::i() * h[xk][yl] - C::i() * h[yk][xl] - h[yk][yl])
    }
}

impl Add for Jet {
    type Output = Jet;
    fn add(mut self, rhs: Jet) -> Jet {
        self.value += rhs.value;
        for i in 0..NVARS {
            self.grad[i] += rhs.grad[i];
            for j in 0..NVARS {
                self.hess[i][j] += rhs.hess[i][j];
            }
        }
        self
    }
}

impl Neg for Jet {
    type Output = Jet;
    fn neg(mut self) -> Jet {
        self.value = -self.value;
        for i in 0..NVARS {
            self.grad[i] = -self.grad[i];
            for j in 0..NVARS {
                self.hess[i][j] = -self.hess[i][j];
            }
        }
        self
    }
}

impl Sub for Jet {
    type Output = Jet;
    fn sub(self, rhs: Jet) -> Jet {
        self + (-rhs)
    }
}

impl Mul for Jet {
    type Output = Jet;
    fn mul(self, rhs: Jet) -> Jet {
        let mut out = Jet { value: self.value * rhs.value, grad: Jet::ZERO_GRAD, hess: Jet::ZERO_HESS };
        for i in 0..NVARS {
            out.grad[i] = self.value * rhs.grad[i] + self.grad[i] * rhs.value;
            for j in 0..NVARS {
                out.hess[i][j] = self.value * rhs.hess[i][j]
                    + self.grad[i] * rhs.grad[j]
                    + self.grad[j] * rhs.grad[i]
                    + self.hess[i][j] * rhs.value;
            }
        }
        out
    }
}

impl Div for Jet {
    type Output = Jet;
    #[allow(clippy::suspicious_arithmetic_impl)]
    fn div(self, rhs: Jet) -> Jet {
        self * rhs.recip()
    }
}

impl Scalar for Jet {
    fn constant(c: C) -> Self {
        Self { value: c, grad: Self::ZERO_GRAD, hess: Self::ZERO_HESS }
    }

    fn value(&self) -> C {
        self.value
    }

    fn exp(&self) -> Self {
        let e = self.value.exp();
        self.chain(e, e, e)
    }

    fn ln(&self) -> Self {
        let r = C::new(1.0, 0.0) / self.value;
        self.chain(self.value.ln(), r, -r * r)
    }

    fn powf(&self, p: f64) -> Self {
        let v = self.value;
        let f0 = Scalar::powf(&v, p);
        let f1 = p * Scalar::powf(&v, p - 1.0);
        let f2 = p * (p - 1.0) * Scalar::powf(&v, p - 2.0);
        self.chain(f0, f1, f2)
    }

    fn conj(&self) -> Self {
        let mut out = *self;
        out.value = out.value.conj();
        for i in 0..NVARS {
            out.grad[i] = out.grad[i].conj();
            for j in 0..NVARS {
                out.hess[i][j] = out.hess[i][j].conj();
            }
        }
        out
    }

    fn scale(&self, c: C) -> Self {
        let mut out = *self;
        out.value *= c;
        for i in 0..NVARS {
            out.grad[i] *= c;
            for j in 0..NVARS {
                out.hess[i][j] *= c;
            }
        }
        out
    }
}
