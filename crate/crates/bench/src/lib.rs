//! Inputs shared by the benchmarks in `benches/`.

use num_complex::Complex64 as C;

use instanton_core::calabi::{AnsatzChart, ChartPoint};
use instanton_core::torus::make_curve;

/// Calabi chart over `C / (Z + Z i)` with `b = 1`.
pub fn reference_chart() -> AnsatzChart {
    AnsatzChart::standard(make_curve(C::new(0.0, 1.0), 1).expect("valid modulus"))
}

/// `n` deterministic points spread over the torus and depths `0.5..=40`.
pub fn chart_points(chart: &AnsatzChart, n: usize) -> Vec<ChartPoint> {
    let tau = chart.curve().tau();
    (0..n)
        .map(|k| {
            let s = (k as f64 * 0.618_034).fract();
            let t = (k as f64 * 0.414_214).fract();
            let depth = 0.5 * 80f64.powf(k as f64 / n.max(1) as f64);
            ChartPoint::at_depth(chart, C::new(s, 0.0) + tau * t, depth, 0.7 * k as f64)
        })
        .collect()
}
