//! Decay rates along radial rays of an end.

use std::f64::consts::TAU;

use num_complex::Complex64;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::calabi::{self, AnsatzChart, ChartPoint};
use crate::error::{Error, Result};
use crate::forms::MetricChart;
use crate::hk::curvature::kahler_curvature;
use crate::hk::FlatModel;
use crate::numerics::{linear_fit, loglog_fit, FitResult};

type C = Complex64;

/// Log-spaced depths along a ray. For the Calabi end the depth is
/// `-log |xi|^2_h`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RaySpec {
    pub base: C,
    pub phase: f64,
    pub depth_min: f64,
    pub depth_max: f64,
    pub samples: usize,
}

impl Default for RaySpec {
    fn default() -> Self {
        Self { base: C::new(0.3, 0.2), phase: 0.0, depth_min: 60.0, depth_max: 2000.0, samples: 12 }
    }
}

impl RaySpec {
    pub fn depths(&self) -> Result<Vec<f64>> {
        if !(self.depth_min > 0.0) || !(self.depth_max > self.depth_min) || !self.depth_max.is_finite() {
            return Err(Error::InvalidArgument(format!(
                "ray depths must satisfy 0 < min < max, got [{}, {}]",
                self.depth_min, self.depth_max
            )));
        }
        if self.samples < 2 {
            return Err(Error::TooFewSamples(self.samples));
        }
        let ratio = self.depth_max / self.depth_min;
        let n = self.samples - 1;
        Ok((0..=n).map(|k| self.depth_min * ratio.powf(k as f64 / n as f64)).collect())
    }
}

/// An end with a distinguished radial direction and a collapsing circle.
pub trait RadialEnd: MetricChart {
    fn ray_point(&self, ray: &RaySpec, depth: f64) -> Self::Point;

    fn radial_distance(&self, p: &Self::Point) -> Result<f64>;

    fn circle_length(&self, p: &Self::Point) -> Result<f64>;
}

impl RadialEnd for AnsatzChart {
    fn ray_point(&self, ray: &RaySpec, depth: f64) -> ChartPoint {
        ChartPoint::at_depth(self, ray.base, depth, ray.phase)
    }

    fn radial_distance(&self, p: &ChartPoint) -> Result<f64> {
        calabi::radial_distance(self, p)
    }

    fn circle_length(&self, p: &ChartPoint) -> Result<f64> {
        calabi::circle_length(self, p)
    }
}

impl RadialEnd for FlatModel {
    fn ray_point(&self, ray: &RaySpec, depth: f64) -> [f64; 4] {
        [ray.base.re, ray.base.im, depth, ray.phase]
    }

    fn radial_distance(&self, p: &[f64; 4]) -> Result<f64> {
        Ok(p[2].hypot(p[3]))
    }

    fn circle_length(&self, p: &[f64; 4]) -> Result<f64> {
        Ok(TAU * 2f64.sqrt() * p[2].hypot(p[3]))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DecaySample {
    pub depth: f64,
    pub r: f64,
    pub rm_norm: f64,
    pub circle_length: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "outcome", rename_all = "snake_case")]
pub enum DecayFit {
    Fitted(FitResult),
    /// The quantity vanishes identically on the ray.
    NoDecay { reason: String },
}

impl DecayFit {
    pub fn slope(&self) -> Option<f64> {
        match self {
            DecayFit::Fitted(f) => Some(f.slope),
            DecayFit::NoDecay { .. } => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayReport {
    pub samples: Vec<DecaySample>,
    pub curvature: DecayFit,
    pub circle: DecayFit,
}

/// Below this the curvature is treated as identically zero.
const FLAT_THRESHOLD: f64 = 1e-12;

pub const MIN_DECAY_SAMPLES: usize = 10;

/// Log-log fits of `|Rm|` and circle length against radial distance.
pub fn decay_report<E: RadialEnd>(end: &E, ray: &RaySpec) -> Result<DecayReport> {
    let depths = ray.depths()?;
    if depths.len() < MIN_DECAY_SAMPLES {
        return Err(Error::InsufficientCoverage(format!(
            "{} samples, need at least {MIN_DECAY_SAMPLES}",
            depths.len()
        )));
    }
    let samples = depths
        .par_iter()
        .map(|&depth| {
            let p = end.ray_point(ray, depth);
            let curvature = kahler_curvature(end, &end.coordinates(&p))?;
            Ok(DecaySample {
                depth,
                r: end.radial_distance(&p)?,
                rm_norm: curvature.rm_norm,
                circle_length: end.circle_length(&p)?,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let r_min = samples.iter().map(|s| s.r).fold(f64::INFINITY, f64::min);
    let r_max = samples.iter().map(|s| s.r).fold(0.0, f64::max);
    if !(r_min > 0.0) || r_max / r_min < 10.0 {
        return Err(Error::InsufficientCoverage(format!("r spans [{r_min}, {r_max}], less than one decade")));
    }
    let (curvature, circle) = if samples.iter().any(|s| s.rm_norm < FLAT_THRESHOLD) {
        let reason = "curvature vanishes on the ray: no decay to fit".to_string();
        (DecayFit::NoDecay { reason: reason.clone() }, DecayFit::NoDecay { reason })
    } else {
        let rm: Vec<_> = samples.iter().map(|s| (s.r, s.rm_norm)).collect();
        let len: Vec<_> = samples.iter().map(|s| (s.r, s.circle_length)).collect();
        (DecayFit::Fitted(loglog_fit(&rm)?), DecayFit::Fitted(loglog_fit(&len)?))
    };
    Ok(DecayReport { samples, curvature, circle })
}

/// Fit of `log y = log C - delta r^power` for a difference field `y(r)`;
/// the returned slope is `-delta`.
pub fn exponential_decay_fit(samples: &[(f64, f64)], power: f64) -> Result<FitResult> {
    if let Some(&(r, y)) = samples.iter().find(|(r, y)| !(*r > 0.0) || !(*y > 0.0)) {
        return Err(Error::NonPositiveSample(r, y));
    }
    let pts: Vec<_> = samples.iter().map(|&(r, y)| (r.powf(power), y.ln())).collect();
    linear_fit(&pts)
}
