//! Box-plot summaries and linear correlation.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Tukey box summary. Quartiles interpolate linearly between order
/// statistics at position `p·(n−1)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BoxStats {
    pub n: usize,
    pub mean: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub whisker_low: f64,
    pub whisker_high: f64,
    /// Points beyond the whiskers, ascending.
    pub outliers: Vec<f64>,
}

fn quantile(sorted: &[f64], p: f64) -> f64 {
    let pos = p * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

pub fn box_stats(values: &[f64]) -> Result<BoxStats> {
    if values.is_empty() {
        return Err(Error::Degenerate(
            "box statistics of an empty sample".into(),
        ));
    }
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::Validation(
            "box statistics need finite values".into(),
        ));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    let q1 = quantile(&sorted, 0.25);
    let median = quantile(&sorted, 0.5);
    let q3 = quantile(&sorted, 0.75);
    let iqr = q3 - q1;
    let (fence_low, fence_high) = (q1 - 1.5 * iqr, q3 + 1.5 * iqr);
    let whisker_low = sorted
        .iter()
        .copied()
        .find(|&v| v >= fence_low)
        .unwrap_or(q1);
    let whisker_high = sorted
        .iter()
        .rev()
        .copied()
        .find(|&v| v <= fence_high)
        .unwrap_or(q3);
    let outliers = sorted
        .iter()
        .copied()
        .filter(|&v| v < whisker_low || v > whisker_high)
        .collect();
    Ok(BoxStats {
        n: values.len(),
        mean: values.iter().sum::<f64>() / values.len() as f64,
        median,
        q1,
        q3,
        iqr,
        whisker_low,
        whisker_high,
        outliers,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationResult {
    pub pearson_r: f64,
    pub slope: f64,
    pub intercept: f64,
    pub n: usize,
}

/// Pearson coefficient and least-squares line `y = slope·x + intercept`.
pub fn correlate(x: &[f64], y: &[f64]) -> Result<CorrelationResult> {
    if x.len() != y.len() {
        return Err(Error::Validation(format!(
            "correlation inputs differ in length: {} vs {}",
            x.len(),
            y.len()
        )));
    }
    let n = x.len();
    if n < 3 {
        return Err(Error::Degenerate(format!(
            "correlation needs at least 3 points, got {n}"
        )));
    }
    if x.iter().chain(y).any(|v| !v.is_finite()) {
        return Err(Error::Validation(
            "correlation inputs must be finite".into(),
        ));
    }
    if x.iter().all(|&v| v == x[0]) {
        return Err(Error::Degenerate("x is constant".into()));
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    if y.iter().all(|&v| v == y[0]) {
        return Ok(CorrelationResult {
            pearson_r: 0.0,
            slope: 0.0,
            intercept: y[0],
            n,
        });
    }
    let (mut sxx, mut syy, mut sxy) = (0.0, 0.0, 0.0);
    for (&a, &b) in x.iter().zip(y) {
        let (dx, dy) = (a - mx, b - my);
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    let slope = sxy / sxx;
    Ok(CorrelationResult {
        pearson_r: (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0),
        slope,
        intercept: my - slope * mx,
        n,
    })
}
