//! Quadrature: trapezoid sums on periodic grids, Gauss–Legendre elsewhere.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::diff::Linear;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid1D {
    lower: f64,
    upper: f64,
    nodes: usize,
    periodic: bool,
}

impl Grid1D {
    pub fn new(lower: f64, upper: f64, nodes: usize, periodic: bool) -> Result<Self> {
        if nodes < 2 {
            return Err(Error::InvalidArgument(format!("grid needs at least 2 nodes, got {nodes}")));
        }
        if !(lower < upper) || !lower.is_finite() || !upper.is_finite() {
            return Err(Error::InvalidArgument(format!("grid bounds [{lower}, {upper}] are not ordered")));
        }
        Ok(Self { lower, upper, nodes, periodic })
    }

    pub fn periodic(lower: f64, upper: f64, nodes: usize) -> Result<Self> {
        Self::new(lower, upper, nodes, true)
    }

    pub fn lower(&self) -> f64 {
        self.lower
    }

    pub fn upper(&self) -> f64 {
        self.upper
    }

    pub fn nodes(&self) -> usize {
        self.nodes
    }

    pub fn is_periodic(&self) -> bool {
        self.periodic
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    /// Node spacing. Periodic grids omit the duplicated right endpoint.
    pub fn spacing(&self) -> f64 {
        if self.periodic {
            self.length() / self.nodes as f64
        } else {
            self.length() / (self.nodes - 1) as f64
        }
    }

    pub fn points(&self) -> impl Iterator<Item = f64> + '_ {
        let h = self.spacing();
        (0..self.nodes).map(move |k| self.lower + k as f64 * h)
    }

    pub fn refined(&self) -> Self {
        Self { nodes: 2 * self.nodes, ..*self }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid2D {
    pub x: Grid1D,
    pub y: Grid1D,
}

impl Grid2D {
    pub fn new(x: Grid1D, y: Grid1D) -> Self {
        Self { x, y }
    }

    /// `[0,1) x [0,1)` with `n x n` nodes, the chart used for tori.
    pub fn unit_torus(n: usize) -> Result<Self> {
        Ok(Self::new(Grid1D::periodic(0.0, 1.0, n)?, Grid1D::periodic(0.0, 1.0, n)?))
    }

    pub fn is_periodic(&self) -> bool {
        self.x.periodic && self.y.periodic
    }

    pub fn refined(&self) -> Self {
        Self::new(self.x.refined(), self.y.refined())
    }
}

/// Trapezoid rule on a periodic 1-D grid.
pub fn quadrature_periodic<V, F>(f: F, grid: &Grid1D) -> Result<V>
where
    V: Linear + Default,
    F: Fn(f64) -> V,
{
    if !grid.periodic {
        return Err(Error::NonPeriodicGrid);
    }
    let sum = grid.points().fold(V::default(), |acc, x| acc + f(x));
    Ok(sum * grid.spacing())
}

/// Trapezoid rule on a periodic 2-D grid.
pub fn quadrature_periodic_2d<V, F>(f: F, grid: &Grid2D) -> Result<V>
where
    V: Linear + Default,
    F: Fn(f64, f64) -> V,
{
    if !grid.is_periodic() {
        return Err(Error::NonPeriodicGrid);
    }
    let mut sum = V::default();
    for x in grid.x.points() {
        for y in grid.y.points() {
            sum = sum + f(x, y);
        }
    }
    Ok(sum * (grid.x.spacing() * grid.y.spacing()))
}

/// Fallible variant of [`quadrature_periodic_2d`].
pub fn try_quadrature_periodic_2d<V, F>(f: F, grid: &Grid2D) -> Result<V>
where
    V: Linear + Default,
    F: Fn(f64, f64) -> Result<V>,
{
    if !grid.is_periodic() {
        return Err(Error::NonPeriodicGrid);
    }
    let mut sum = V::default();
    for x in grid.x.points() {
        for y in grid.y.points() {
            sum = sum + f(x, y)?;
        }
    }
    Ok(sum * (grid.x.spacing() * grid.y.spacing()))
}

/// Gauss–Legendre rule on `[-1, 1]`.
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl Default for GaussLegendre {
    fn default() -> Self {
        Self::new(64)
    }
}

impl GaussLegendre {
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = (n + 1) / 2;
        for i in 0..m {
            // Tricomi initial guess, then Newton on P_n.
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            if d != 0.0 {
                dp = d;
            }
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn integrate<V, F>(&self, f: F, a: f64, b: f64) -> V
    where
        V: Linear + Default,
        F: Fn(f64) -> V,
    {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let sum = self
            .nodes
            .iter()
            .zip(&self.weights)
            .fold(V::default(), |acc, (&x, &w)| acc + f(mid + half * x) * w);
        sum * half
    }

    /// Composite rule over consecutive panels `[b_k, b_{k+1}]`.
    pub fn integrate_panels<V, F>(&self, f: F, breakpoints: &[f64]) -> V
    where
        V: Linear + Default,
        F: Fn(f64) -> V,
    {
        breakpoints
            .windows(2)
            .fold(V::default(), |acc, w| acc + self.integrate(&f, w[0], w[1]))
    }
}

fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    #[test]
    fn constant_on_unit_square() {
        let g = Grid2D::unit_torus(8).unwrap();
        let v: f64 = quadrature_periodic_2d(|_, _| 1.0, &g).unwrap();
        assert_eq!(v, 1.0);
    }

    #[test]
    fn sine_integrates_to_zero() {
        let g = Grid1D::periodic(0.0, 1.0, 32).unwrap();
        let v: f64 = quadrature_periodic(|x| (2.0 * PI * x).sin(), &g).unwrap();
        assert!(v.abs() < 1e-14);
    }

    #[test]
    fn exp_sin_matches_refinement() {
        let f = |x: f64| (2.0 * PI * x).sin().exp();
        let g = Grid1D::periodic(0.0, 1.0, 64).unwrap();
        let coarse: f64 = quadrature_periodic(f, &g).unwrap();
        let fine: f64 = quadrature_periodic(f, &Grid1D::periodic(0.0, 1.0, 256).unwrap()).unwrap();
        assert!((coarse - fine).abs() < 1e-12);
        // modified Bessel I0(1)
        assert!((fine - 1.266_065_877_752_008_4).abs() < 1e-14);
    }

    #[test]
    fn refinement_changes_smooth_integrands_little() {
        let integrands: [fn(f64, f64) -> f64; 3] = [
            |x, y| (2.0 * PI * x).cos().exp() * (1.0 + (2.0 * PI * y).sin().powi(2)),
            |x, y| 1.0 / (2.0 + (2.0 * PI * (x + y)).cos()),
            |x, _| (2.0 * PI * x).sin().powi(4),
        ];
        let g = Grid2D::unit_torus(32).unwrap();
        for f in integrands {
            let a: f64 = quadrature_periodic_2d(f, &g).unwrap();
            let b: f64 = quadrature_periodic_2d(f, &g.refined()).unwrap();
            assert!((a - b).abs() < 1e-10);
        }
    }

    #[test]
    fn complex_integrand() {
        let g = Grid1D::periodic(0.0, 2.0 * PI, 16).unwrap();
        let v: Complex64 = quadrature_periodic(|t| Complex64::new(0.0, t).exp(), &g).unwrap();
        assert!(v.norm() < 1e-14);
    }

    #[test]
    fn non_periodic_rejected() {
        let g = Grid1D::new(0.0, 1.0, 8, false).unwrap();
        assert_eq!(quadrature_periodic(|x: f64| x, &g), Err(Error::NonPeriodicGrid));
    }

    #[test]
    fn grid_validation() {
        assert!(Grid1D::new(0.0, 1.0, 1, true).is_err());
        assert!(Grid1D::new(1.0, 1.0, 4, false).is_err());
    }

    #[test]
    fn gauss_legendre_polynomials() {
        let gl = GaussLegendre::new(8);
        // exact for degree <= 15
        let v: f64 = gl.integrate(|x| x.powi(14) - 3.0 * x.powi(7) + 1.0, -1.0, 2.0);
        let exact = (2f64.powi(15) + 1.0) / 15.0 - 3.0 * (2f64.powi(8) - 1.0) / 8.0 + 3.0;
        assert!((v - exact).abs() < 1e-10 * exact.abs());
        let w: f64 = GaussLegendre::default().weights.iter().sum();
        assert!((w - 2.0).abs() < 1e-13);
    }

    #[test]
    fn gauss_legendre_panels() {
        let gl = GaussLegendre::new(32);
        let v: f64 = gl.integrate_panels(|t| t.powf(-0.25), &[1.0, 10.0, 100.0, 1000.0]);
        let exact = (1000f64.powf(0.75) - 1.0) / 0.75;
        assert!((v - exact).abs() < 1e-11 * exact);
    }
}
