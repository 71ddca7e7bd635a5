//! Per-trace switching metrics.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::G_Q;
use crate::simulator::SweepTrace;

/// How a device-level pinch-off voltage is formed from the two sweeps.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PinchCombine {
    #[default]
    Average,
    Down,
    Up,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AnalysisConfig {
    /// Pinch-off threshold relative to `g_on`.
    pub off_frac: f64,
    /// Consecutive below-threshold samples needed to call pinch-off.
    pub persistence: usize,
    /// Fraction of the gate range, at its negative end, averaged for `g_off`.
    pub tail_frac: f64,
    /// Smallest `g_on` of a switching device (S).
    #[serde(rename = "min_g_on_S")]
    pub min_g_on: f64,
    pub combine: PinchCombine,
}

impl Default for AnalysisConfig {
    fn default() -> Self {
        AnalysisConfig {
            off_frac: 0.01,
            persistence: 3,
            tail_frac: 0.05,
            min_g_on: 0.1 * G_Q,
            combine: PinchCombine::Average,
        }
    }
}

impl AnalysisConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.off_frac > 0.0 && self.off_frac < 1.0) {
            return Err(Error::Validation(format!(
                "off_frac must lie in (0, 1), got {}",
                self.off_frac
            )));
        }
        if self.persistence == 0 {
            return Err(Error::Validation("persistence must be at least 1".into()));
        }
        if !(self.tail_frac > 0.0 && self.tail_frac <= 1.0) {
            return Err(Error::Validation(format!(
                "tail_frac must lie in (0, 1], got {}",
                self.tail_frac
            )));
        }
        if !(self.min_g_on >= 0.0 && self.min_g_on.is_finite()) {
            return Err(Error::Validation(format!(
                "min_g_on_S must be non-negative, got {}",
                self.min_g_on
            )));
        }
        Ok(())
    }
}

/// Samples as (v_g, G) pairs sorted by increasing gate voltage.
fn ascending(trace: &SweepTrace) -> Vec<(f64, f64)> {
    let mut pts: Vec<(f64, f64)> = trace.samples.iter().map(|s| (s.v_g, s.g_meas)).collect();
    pts.sort_by(|a, b| a.0.total_cmp(&b.0));
    pts
}

/// Linear interpolation on points sorted by x. `x` must lie inside the range.
fn interpolate(pts: &[(f64, f64)], x: f64) -> f64 {
    let i = pts.partition_point(|p| p.0 < x);
    if i < pts.len() && pts[i].0 == x {
        return pts[i].1;
    }
    if i == 0 {
        return pts[0].1;
    }
    if i == pts.len() {
        return pts[pts.len() - 1].1;
    }
    let (x0, y0) = pts[i - 1];
    let (x1, y1) = pts[i];
    y0 + (y1 - y0) * (x - x0) / (x1 - x0)
}

/// Conductance at zero gate voltage.
pub fn extract_g_on(trace: &SweepTrace) -> Result<f64> {
    let pts = ascending(trace);
    let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
    if hi < 0.0 || lo > 0.0 {
        return Err(Error::Trace(format!(
            "{}/{} {}: gate range [{lo}, {hi}] V does not contain 0 V",
            trace.chip_id,
            trace.junction_id,
            trace.direction.as_str()
        )));
    }
    Ok(interpolate(&pts, 0.0))
}

/// Mean conductance over the most negative `tail_frac` of the gate range.
pub fn extract_g_off(trace: &SweepTrace, tail_frac: f64) -> f64 {
    let pts = ascending(trace);
    let (lo, hi) = (pts[0].0, pts[pts.len() - 1].0);
    let edge = lo + tail_frac * (hi - lo) + 1e-9 * (hi - lo);
    let tail: Vec<f64> = pts
        .iter()
        .take_while(|p| p.0 <= edge)
        .map(|p| p.1)
        .collect();
    tail.iter().sum::<f64>() / tail.len() as f64
}

/// First gate voltage, walking from 0 V toward negative, at which `G` stays
/// below `off_frac · g_on` for `persistence` consecutive samples.
///
/// `None` when the device never pinches off or carries no current at 0 V.
pub fn extract_pinch_off(
    trace: &SweepTrace,
    off_frac: f64,
    persistence: usize,
) -> Result<Option<f64>> {
    let g_on = extract_g_on(trace)?;
    if g_on <= 0.0 {
        return Ok(None);
    }
    let threshold = off_frac * g_on;
    let walk: Vec<(f64, f64)> = ascending(trace)
        .into_iter()
        .rev()
        .filter(|p| p.0 <= 0.0)
        .collect();
    let persistence = persistence.max(1);
    let mut run = 0;
    for (i, &(_, g)) in walk.iter().enumerate() {
        if g < threshold {
            run += 1;
            if run == persistence {
                return Ok(Some(walk[i + 1 - persistence].0));
            }
        } else {
            run = 0;
        }
    }
    Ok(None)
}

/// Largest `|G_down − G_up|` over the union of both gate grids, restricted to
/// their overlap and resampled linearly.
pub fn hysteresis_max(down: &SweepTrace, up: &SweepTrace) -> Result<f64> {
    let a = ascending(down);
    let b = ascending(up);
    let lo = a[0].0.max(b[0].0);
    let hi = a[a.len() - 1].0.min(b[b.len() - 1].0);
    if lo > hi {
        return Err(Error::Trace(format!(
            "{}/{}: sweep directions cover disjoint gate ranges",
            down.chip_id, down.junction_id
        )));
    }
    let grid = a
        .iter()
        .chain(&b)
        .map(|p| p.0)
        .filter(|&v| v >= lo && v <= hi);
    Ok(grid
        .map(|v| (interpolate(&a, v) - interpolate(&b, v)).abs())
        .fold(0.0, f64::max))
}

/// Metrics of one sweep direction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DirectionMetrics {
    #[serde(rename = "v_pinch_V")]
    pub v_pinch: Option<f64>,
    #[serde(rename = "g_on_S")]
    pub g_on: f64,
    #[serde(rename = "g_off_S")]
    pub g_off: f64,
}

pub fn direction_metrics(trace: &SweepTrace, config: &AnalysisConfig) -> Result<DirectionMetrics> {
    Ok(DirectionMetrics {
        v_pinch: extract_pinch_off(trace, config.off_frac, config.persistence)?,
        g_on: extract_g_on(trace)?,
        g_off: extract_g_off(trace, config.tail_frac),
    })
}

/// Switching verdict: every available direction pinches off, conducts at
/// least `min_g_on` at 0 V and ends below the pinch-off threshold.
pub fn classify_switching(directions: &[DirectionMetrics], min_g_on: f64, off_frac: f64) -> bool {
    !directions.is_empty()
        && directions
            .iter()
            .all(|m| m.v_pinch.is_some() && m.g_on >= min_g_on && m.g_off <= off_frac * m.g_on)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceMetrics {
    pub chip_id: String,
    pub junction_id: String,
    pub down: DirectionMetrics,
    pub up: Option<DirectionMetrics>,
    /// Device pinch-off voltage combined from both directions.
    #[serde(rename = "v_pinch_V")]
    pub v_pinch: Option<f64>,
    /// ON conductance of the first (downward) sweep.
    #[serde(rename = "g_on_S")]
    pub g_on: f64,
    #[serde(rename = "g_off_S")]
    pub g_off: f64,
    #[serde(rename = "hysteresis_max_S")]
    pub hysteresis_max: f64,
    pub is_switching: bool,
}

/// Metrics of a junction from its downward sweep and, when present, the
/// return sweep.
pub fn analyze_trace_pair(
    down: &SweepTrace,
    up: Option<&SweepTrace>,
    config: &AnalysisConfig,
) -> Result<TraceMetrics> {
    config.validate()?;
    if let Some(up) = up {
        if up.chip_id != down.chip_id || up.junction_id != down.junction_id {
            return Err(Error::Trace(format!(
                "trace pair mismatch: {}/{} vs {}/{}",
                down.chip_id, down.junction_id, up.chip_id, up.junction_id
            )));
        }
    }
    let d = direction_metrics(down, config)?;
    let u = up.map(|t| direction_metrics(t, config)).transpose()?;
    let v_pinch = match (config.combine, u) {
        (_, None) => d.v_pinch,
        (PinchCombine::Down, Some(_)) => d.v_pinch,
        (PinchCombine::Up, Some(u)) => u.v_pinch,
        (PinchCombine::Average, Some(u)) => match (d.v_pinch, u.v_pinch) {
            (Some(a), Some(b)) => Some(0.5 * (a + b)),
            _ => None,
        },
    };
    let hysteresis = match up {
        Some(up) => hysteresis_max(down, up)?,
        None => 0.0,
    };
    let all: Vec<DirectionMetrics> = std::iter::once(d).chain(u).collect();
    Ok(TraceMetrics {
        chip_id: down.chip_id.clone(),
        junction_id: down.junction_id.clone(),
        down: d,
        up: u,
        v_pinch,
        g_on: d.g_on,
        g_off: d.g_off,
        hysteresis_max: hysteresis,
        is_switching: classify_switching(&all, config.min_g_on, config.off_frac),
    })
}
