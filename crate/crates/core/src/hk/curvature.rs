//! Curvature of a Kähler metric from its components:
//! `R_{i jbar k lbar} = -d_k d_lbar g_{i jbar} + g^{p qbar} (d_k g_{i qbar}) (d_lbar g_{p jbar})`.
//!
//! The primary path differentiates the metric with exact jets; the
//! finite-difference path exists as an independent oracle.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::forms::{Hermitian2, MetricChart};
use crate::numerics::{central_diff, central_diff2, Jet, Scalar};

type C = Complex64;
type M2 = [[C; 2]; 2];

const Z: C = C::new(0.0, 0.0);

/// `r[i][j][k][l] = R_{i jbar k lbar}` together with the metric.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RiemannTensor {
    pub g: Hermitian2,
    pub r: [[[[C; 2]; 2]; 2]; 2],
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Curvature {
    /// Norm of the curvature tensor in a unitary frame.
    pub rm_norm: f64,
    /// Norm of the Ricci form in a unitary frame.
    pub ricci_norm: f64,
    /// `max |d_k g_{i jbar} - d_i g_{k jbar}|`, zero for a Kähler metric.
    pub closedness: f64,
}

fn mat_mul(a: &M2, b: &M2) -> M2 {
    std::array::from_fn(|i| std::array::from_fn(|j| a[i][0] * b[0][j] + a[i][1] * b[1][j]))
}

fn assemble(g: M2, d_holo: [M2; 2], d_anti: [M2; 2], d_mixed: [[M2; 2]; 2]) -> Result<RiemannTensor> {
    let g = Hermitian2(g);
    let inv = g.inverse()?.0;
    let mut r = [[[[Z; 2]; 2]; 2]; 2];
    for k in 0..2 {
        for l in 0..2 {
            let quad = mat_mul(&mat_mul(&d_holo[k], &inv), &d_anti[l]);
            for i in 0..2 {
                for j in 0..2 {
                    r[i][j][k][l] = -d_mixed[k][l][i][j] + quad[i][j];
                }
            }
        }
    }
    Ok(RiemannTensor { g, r })
}

impl RiemannTensor {
    /// `R_{k lbar} = g^{i jbar} R_{i jbar k lbar}`.
    pub fn ricci(&self) -> Result<M2> {
        let inv = self.g.inverse()?.0;
        Ok(std::array::from_fn(|k| {
            std::array::from_fn(|l| {
                let mut s = Z;
                for i in 0..2 {
                    for j in 0..2 {
                        s += inv[j][i] * self.r[i][j][k][l];
                    }
                }
                s
            })
        }))
    }

    pub fn norm(&self) -> Result<f64> {
        let p = self.g.unitary_frame()?;
        let mut sum = 0.0;
        for a in 0..2 {
            for b in 0..2 {
                for c in 0..2 {
                    for d in 0..2 {
                        let mut s = Z;
                        for i in 0..2 {
                            for j in 0..2 {
                                for k in 0..2 {
                                    for l in 0..2 {
                                        s += self.r[i][j][k][l]
                                            * p[i][a]
                                            * p[j][b].conj()
                                            * p[k][c]
                                            * p[l][d].conj();
                                    }
                                }
                            }
                        }
                        sum += s.norm_sqr();
                    }
                }
            }
        }
        Ok(sum.sqrt())
    }

    pub fn ricci_norm(&self) -> Result<f64> {
        Ok(frame_norm2(&self.g, &self.ricci()?)?)
    }

    pub fn max_abs_diff(&self, other: &Self) -> f64 {
        let mut worst: f64 = 0.0;
        for (a, b) in self.r.iter().flatten().flatten().flatten().zip(other.r.iter().flatten().flatten().flatten()) {
            worst = worst.max((a - b).norm());
        }
        worst
    }

    pub fn max_abs(&self) -> f64 {
        self.r.iter().flatten().flatten().flatten().map(|c| c.norm()).fold(0.0, f64::max)
    }
}

fn frame_norm2(g: &Hermitian2, t: &M2) -> Result<f64> {
    let p = g.unitary_frame()?;
    let mut sum = 0.0;
    for a in 0..2 {
        for b in 0..2 {
            let mut s = Z;
            for k in 0..2 {
                for l in 0..2 {
                    s += t[k][l] * p[k][a] * p[l][b].conj();
                }
            }
            sum += s.norm_sqr();
        }
    }
    Ok(sum.sqrt())
}

fn metric_jets<M: MetricChart>(m: &M, x: &[f64; 4]) -> Result<[[Jet; 2]; 2]> {
    m.metric(&Jet::coordinates(*x))
}

/// Curvature tensor from exact derivatives of the metric components.
pub fn riemann_tensor<M: MetricChart>(m: &M, x: &[f64; 4]) -> Result<RiemannTensor> {
    let g = metric_jets(m, x)?;
    let pick = |f: &dyn Fn(&Jet) -> C| -> M2 { std::array::from_fn(|i| std::array::from_fn(|j| f(&g[i][j]))) };
    let d_holo = [pick(&|j| j.d_holo(0)), pick(&|j| j.d_holo(1))];
    let d_anti = [pick(&|j| j.d_anti(0)), pick(&|j| j.d_anti(1))];
    let d_mixed = [
        [pick(&|j| j.d_mixed(0, 0)), pick(&|j| j.d_mixed(0, 1))],
        [pick(&|j| j.d_mixed(1, 0)), pick(&|j| j.d_mixed(1, 1))],
    ];
    assemble(pick(&|j| j.value), d_holo, d_anti, d_mixed)
}

fn to_m2(h: Hermitian2) -> M2 {
    h.0
}

/// Curvature tensor with every derivative of the metric taken by central
/// differences of step `step`.
pub fn fd_riemann_tensor<M: MetricChart>(m: &M, x: &[f64; 4], step: f64) -> Result<RiemannTensor> {
    let f = |y: &[f64]| -> Result<Hermitian2> { Ok(Hermitian2(m.metric(&[y[0], y[1], y[2], y[3]].map(|r| C::new(r, 0.0)))?)) };
    let g = to_m2(f(x)?);
    let grad = (0..4).map(|a| central_diff(f, x, a, step).map(to_m2)).collect::<Result<Vec<M2>>>()?;
    let mut hess = vec![[[Z; 2]; 2]; 16];
    for a in 0..4 {
        for b in a..4 {
            let h = to_m2(central_diff2(f, x, a, b, step)?);
            hess[4 * a + b] = h;
            hess[4 * b + a] = h;
        }
    }
    let i = C::i();
    let comb = |terms: &[(C, &M2)]| -> M2 {
        std::array::from_fn(|p| std::array::from_fn(|q| terms.iter().map(|(c, m)| c * m[p][q]).sum()))
    };
    let half = C::new(0.5, 0.0);
    let quarter = C::new(0.25, 0.0);
    let d_holo = [0, 1].map(|k| comb(&[(half, &grad[2 * k]), (-half * i, &grad[2 * k + 1])]));
    let d_anti = [0, 1].map(|k| comb(&[(half, &grad[2 * k]), (half * i, &grad[2 * k + 1])]));
    let d_mixed = [0, 1].map(|k| {
        [0, 1].map(|l| {
            let (xk, yk, xl, yl) = (2 * k, 2 * k + 1, 2 * l, 2 * l + 1);
            comb(&[
                (quarter, &hess[4 * xk + xl]),
                (quarter * i, &hess[4 * xk + yl]),
                (-quarter * i, &hess[4 * yk + xl]),
                (quarter, &hess[4 * yk + yl]),
            ])
        })
    });
    assemble(g, d_holo, d_anti, d_mixed)
}

/// `-d_k d_lbar log det g`, which equals the Ricci form.
pub fn ricci_from_volume<M: MetricChart>(m: &M, x: &[f64; 4]) -> Result<M2> {
    let g = metric_jets(m, x)?;
    let det = g[0][0] * g[1][1] - g[0][1] * g[1][0];
    let log = Scalar::ln(&det);
    Ok(std::array::from_fn(|k| std::array::from_fn(|l| -log.d_mixed(k, l))))
}

/// Closedness residual `max |d_k g_{i jbar} - d_i g_{k jbar}|` from jets.
pub fn closedness<M: MetricChart>(m: &M, x: &[f64; 4]) -> Result<f64> {
    let g = metric_jets(m, x)?;
    let mut worst: f64 = 0.0;
    for j in 0..2 {
        worst = worst.max((g[1][j].d_holo(0) - g[0][j].d_holo(1)).norm());
        worst = worst.max((g[j][1].d_anti(0) - g[j][0].d_anti(1)).norm());
    }
    Ok(worst)
}

/// Largest difference between the jet and finite-difference curvature
/// tensors, relative to `max(1, max |R|)`.
pub fn fd_agreement<M: MetricChart>(m: &M, x: &[f64; 4], step: f64) -> Result<f64> {
    let jet = riemann_tensor(m, x)?;
    let fd = fd_riemann_tensor(m, x, step)?;
    Ok(jet.max_abs_diff(&fd) / jet.max_abs().max(1.0))
}

pub fn kahler_curvature<M: MetricChart>(m: &M, x: &[f64; 4]) -> Result<Curvature> {
    let r = riemann_tensor(m, x)?;
    Ok(Curvature { rm_norm: r.norm()?, ricci_norm: r.ricci_norm()?, closedness: closedness(m, x)? })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::calabi::{AnsatzChart, ChartPoint};
    use crate::hk::FlatModel;
    use crate::semiflat::SemiFlatParams;
    use crate::torus::make_curve;

    /// Fubini–Study-like metric `i ddbar log(1 + |z|^2 + |w|^2)`, which is
    /// not Ricci-flat; used to check that the curvature code detects it.
    struct FubiniStudy;

    impl MetricChart for FubiniStudy {
        type Point = [f64; 4];
        fn coordinates(&self, p: &[f64; 4]) -> [f64; 4] {
            *p
        }
        fn metric<S: Scalar>(&self, x: &[S; 4]) -> Result<[[S; 2]; 2]> {
            let z = [x[0].clone() + x[1].scale(C::i()), x[2].clone() + x[3].scale(C::i())];
            let q = S::real(1.0) + z[0].norm_sqr() + z[1].norm_sqr();
            let inv = S::real(1.0) / q.clone();
            let inv2 = inv.clone() * inv.clone();
            Ok(std::array::from_fn(|i| {
                std::array::from_fn(|j| {
                    let delta = if i == j { inv.clone() } else { S::real(0.0) };
                    delta - inv2.clone() * z[i].conj() * z[j].clone()
                })
            }))
        }
        fn holomorphic_coefficient(&self, _x: &[f64; 4]) -> Result<C> {
            Ok(C::new(1.0, 0.0))
        }
    }

    #[test]
    fn flat_model_is_flat() {
        let c = kahler_curvature(&FlatModel, &[0.1, 0.2, 0.3, 0.4]).unwrap();
        assert!(c.rm_norm < 1e-12 && c.ricci_norm < 1e-12 && c.closedness < 1e-12);
    }

    #[test]
    fn fubini_study_is_einstein() {
        // Ric = 3 g for this normalisation
        let x = [0.3, -0.2, 0.5, 0.1];
        let r = riemann_tensor(&FubiniStudy, &x).unwrap();
        let ric = r.ricci().unwrap();
        let vol = ricci_from_volume(&FubiniStudy, &x).unwrap();
        for k in 0..2 {
            for l in 0..2 {
                assert!((ric[k][l] - 3.0 * r.g.0[k][l]).norm() < 1e-12);
                assert!((ric[k][l] - vol[k][l]).norm() < 1e-12);
            }
        }
        let fd = fd_riemann_tensor(&FubiniStudy, &x, 1e-2).unwrap();
        assert!(r.max_abs_diff(&fd) < 1e-8);
    }

    #[test]
    fn calabi_is_ricci_flat() {
        let chart = AnsatzChart::standard(make_curve(C::new(0.1, 1.3), 2).unwrap());
        for (z, t) in [(C::new(0.2, 0.4), 1.0), (C::new(0.7, 1.1), 5.0), (C::new(0.0, 0.0), 40.0)] {
            let p = ChartPoint::at_depth(&chart, z, t, 0.3);
            let x = p.log_coordinates();
            let c = kahler_curvature(&chart, &x).unwrap();
            assert!(c.ricci_norm < 1e-8, "{c:?}");
            assert!(c.closedness < 1e-12);
            assert!(c.rm_norm > 0.0);
            let fd = fd_riemann_tensor(&chart, &x, 1e-2).unwrap();
            let jet = riemann_tensor(&chart, &x).unwrap();
            assert!(jet.max_abs_diff(&fd) < 1e-6 * jet.max_abs().max(1.0));
        }
    }

    #[test]
    fn semiflat_is_ricci_flat() {
        let sf = SemiFlatParams::calibrated(3, -0.4, 2.0).unwrap();
        let x = [0.2, -0.1, 0.3, 0.25];
        let c = kahler_curvature(&sf, &x).unwrap();
        assert!(c.ricci_norm < 1e-8 && c.closedness < 1e-12, "{c:?}");
        let fd = fd_riemann_tensor(&sf, &x, 2e-3).unwrap();
        let jet = riemann_tensor(&sf, &x).unwrap();
        assert!(jet.max_abs_diff(&fd) < 1e-6 * jet.max_abs().max(1.0));
    }
}
