use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Least-squares line `y = slope x + intercept`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FitResult {
    pub slope: f64,
    pub intercept: f64,
    pub residual_rms: f64,
    pub sample_count: usize,
}

pub fn linear_fit(points: &[(f64, f64)]) -> Result<FitResult> {
    if points.len() < 2 {
        return Err(Error::TooFewSamples(points.len()));
    }
    let n = points.len() as f64;
    let mx = points.iter().map(|p| p.0).sum::<f64>() / n;
    let my = points.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = points.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = points.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return Err(Error::InsufficientCoverage("all abscissae coincide".into()));
    }
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ss: f64 = points.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(FitResult { slope, intercept, residual_rms: (ss / n).sqrt(), sample_count: points.len() })
}

/// Least-squares line through `(log r, log y)`.
pub fn loglog_fit(samples: &[(f64, f64)]) -> Result<FitResult> {
    if samples.len() < 2 {
        return Err(Error::TooFewSamples(samples.len()));
    }
    if let Some(&(r, y)) = samples.iter().find(|(r, y)| !(*r > 0.0) || !(*y > 0.0)) {
        return Err(Error::NonPositiveSample(r, y));
    }
    let pts: Vec<(f64, f64)> = samples.iter().map(|&(r, y)| (r.ln(), y.ln())).collect();
    linear_fit(&pts)
}
