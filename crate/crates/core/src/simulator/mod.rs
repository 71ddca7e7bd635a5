//! Synthetic gate sweeps of split-gate junctions.
//!
//! The pieces, bottom up: [`conductance`] holds the noise-free device model
//! (QPC staircase, series contacts, failure signatures, heating hysteresis),
//! [`lockin`] emulates the ac measurement, [`sweep`] drives the shared gate
//! pads through a bidirectional sweep, [`ensemble`] runs whole chip arrays
//! and [`io`] reads and writes trace files.

pub mod conductance;
pub mod ensemble;
pub mod io;
pub mod lockin;
pub mod sweep;

use serde::{Deserialize, Serialize};

use crate::chip::GATE_SOURCE_LIMIT;
use crate::error::{Error, Result};

pub use conductance::{
    conductance_with_failure, hysteretic_conductance, ideal_conductance, DeviceModel,
    HysteresisState, SignatureConfig,
};
pub use ensemble::{run_ensemble, wafer_chips, Ensemble, EnsembleConfig};
pub use lockin::{lockin_measure, LockIn, NoiseConfig};
pub use sweep::{run_sweep, GateLogEntry, SweepPair, SweepSession};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// From `v_start` toward the most negative voltage.
    Down,
    /// Return sweep back to `v_start`.
    Up,
}

impl Direction {
    pub fn as_str(self) -> &'static str {
        match self {
            Direction::Down => "down",
            Direction::Up => "up",
        }
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "down" => Ok(Direction::Down),
            "up" => Ok(Direction::Up),
            other => Err(Error::Trace(format!("unknown sweep direction `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepDirections {
    DownThenUp,
    DownOnly,
}

/// Gate sweep and lock-in settings.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepProtocol {
    #[serde(rename = "v_start_V")]
    pub v_start: f64,
    #[serde(rename = "v_end_V")]
    pub v_end: f64,
    #[serde(rename = "v_step_V")]
    pub v_step: f64,
    pub directions: SweepDirections,
    /// Lock-in excitation amplitude (V).
    #[serde(rename = "v_ac_V")]
    pub v_ac: f64,
    /// Lock-in reference frequency (Hz).
    #[serde(rename = "f_ac_Hz")]
    pub f_ac: f64,
    /// Averaging window per gate point (s).
    #[serde(rename = "integration_time_s")]
    pub integration_time: f64,
    #[serde(rename = "v_dc_bias_V")]
    pub v_dc_bias: f64,
    /// Current samples per excitation period.
    pub samples_per_cycle: u32,
}

/// Minimum number of whole excitation periods in a lock-in window.
pub const MIN_LOCKIN_CYCLES: u32 = 5;

impl Default for SweepProtocol {
    /// 0 → -1 V and back in 5 mV steps; 5 µV at 70 Hz averaged over 10 periods.
    fn default() -> Self {
        SweepProtocol {
            v_start: 0.0,
            v_end: -1.0,
            v_step: 0.005,
            directions: SweepDirections::DownThenUp,
            v_ac: 5e-6,
            f_ac: 70.0,
            integration_time: 10.0 / 70.0,
            v_dc_bias: 0.0,
            samples_per_cycle: 40,
        }
    }
}

impl SweepProtocol {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Validation(m));
        if !(self.v_step > 0.0 && self.v_step.is_finite()) {
            return bad(format!("v_step must be positive, got {}", self.v_step));
        }
        if !(self.v_start > self.v_end) {
            return bad(format!(
                "downward sweep needs v_start > v_end, got {} and {}",
                self.v_start, self.v_end
            ));
        }
        if self.v_start.abs() > GATE_SOURCE_LIMIT || self.v_end.abs() > GATE_SOURCE_LIMIT {
            return bad(format!("sweep range exceeds ±{GATE_SOURCE_LIMIT} V"));
        }
        if !(self.v_ac > 0.0 && self.v_ac.is_finite()) {
            return bad(format!("v_ac must be positive, got {}", self.v_ac));
        }
        if !(self.f_ac > 0.0 && self.f_ac.is_finite()) {
            return bad(format!("f_ac must be positive, got {}", self.f_ac));
        }
        if self.samples_per_cycle < 4 {
            return bad(format!(
                "samples_per_cycle must be at least 4, got {}",
                self.samples_per_cycle
            ));
        }
        if self.lockin_cycles() < MIN_LOCKIN_CYCLES {
            return bad(format!(
                "integration window holds {:.3} excitation periods, need at least {MIN_LOCKIN_CYCLES}",
                self.integration_time * self.f_ac
            ));
        }
        Ok(())
    }

    /// Whole excitation periods that fit in the integration window.
    pub fn lockin_cycles(&self) -> u32 {
        let cycles = self.integration_time * self.f_ac;
        if !(cycles.is_finite() && cycles > 0.0) {
            return 0;
        }
        (cycles + 1e-9).floor().min(f64::from(u32::MAX)) as u32
    }

    /// Gate voltages of the downward sweep, `v_start - k * v_step`.
    pub fn down_grid(&self) -> Vec<f64> {
        let span = self.v_start - self.v_end;
        let n = (span / self.v_step + 1e-9).floor() as usize + 1;
        (0..n)
            .map(|k| self.v_start - k as f64 * self.v_step)
            .collect()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SweepSample {
    pub v_g: f64,
    /// Demodulated conductance clamped at zero (S).
    pub g_meas: f64,
    /// Demodulated conductance before clamping (S).
    pub g_raw: f64,
}

/// One sweep direction of one junction, in acquisition order.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepTrace {
    pub chip_id: String,
    pub junction_id: String,
    pub direction: Direction,
    pub samples: Vec<SweepSample>,
    /// Stream seed, when known.
    pub seed: Option<u64>,
    pub protocol: Option<SweepProtocol>,
}

impl SweepTrace {
    pub fn new(
        chip_id: impl Into<String>,
        junction_id: impl Into<String>,
        direction: Direction,
        samples: Vec<SweepSample>,
    ) -> Result<Self> {
        let trace = SweepTrace {
            chip_id: chip_id.into(),
            junction_id: junction_id.into(),
            direction,
            samples,
            seed: None,
            protocol: None,
        };
        trace.validate()?;
        Ok(trace)
    }

    /// At least two samples, strictly monotone gate voltage in the sweep direction.
    pub fn validate(&self) -> Result<()> {
        if self.samples.len() < 2 {
            return Err(Error::Trace(format!(
                "{}/{} {}: need at least 2 samples, got {}",
                self.chip_id,
                self.junction_id,
                self.direction.as_str(),
                self.samples.len()
            )));
        }
        let ok = self.samples.windows(2).all(|w| match self.direction {
            Direction::Down => w[1].v_g < w[0].v_g,
            Direction::Up => w[1].v_g > w[0].v_g,
        });
        if !ok {
            return Err(Error::Trace(format!(
                "{}/{} {}: gate voltage is not strictly monotone in the sweep direction",
                self.chip_id,
                self.junction_id,
                self.direction.as_str()
            )));
        }
        if self
            .samples
            .iter()
            .any(|s| !s.v_g.is_finite() || !s.g_meas.is_finite())
        {
            return Err(Error::Trace(format!(
                "{}/{}: non-finite sample",
                self.chip_id, self.junction_id
            )));
        }
        Ok(())
    }

    pub fn gate_voltages(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.v_g)
    }

    pub fn conductances(&self) -> impl Iterator<Item = f64> + '_ {
        self.samples.iter().map(|s| s.g_meas)
    }
}

/// Everything a sweep needs besides the chip.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimulationConfig {
    pub protocol: SweepProtocol,
    pub noise: NoiseConfig,
    pub signatures: SignatureConfig,
}

impl SimulationConfig {
    pub fn noise_free() -> Self {
        SimulationConfig {
            noise: NoiseConfig::off(),
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.protocol.validate()?;
        self.noise.validate()?;
        self.signatures.validate()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_has_201_points() {
        let p = SweepProtocol::default();
        let g = p.down_grid();
        assert_eq!(g.len(), 201);
        assert_eq!(g[0], 0.0);
        assert!((g[200] + 1.0).abs() < 1e-12);
        assert_eq!(p.lockin_cycles(), 10);
        p.validate().unwrap();
    }

    #[test]
    fn protocol_validation() {
        let p = SweepProtocol {
            v_step: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = SweepProtocol {
            integration_time: 4.0 / 70.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = SweepProtocol {
            v_end: -12.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
        let p = SweepProtocol {
            v_start: -1.0,
            v_end: 0.0,
            ..Default::default()
        };
        assert!(p.validate().is_err());
    }

    #[test]
    fn trace_monotonicity() {
        let s = |v: f64| SweepSample {
            v_g: v,
            g_meas: 0.0,
            g_raw: 0.0,
        };
        assert!(SweepTrace::new("C1", "J1", Direction::Down, vec![s(0.0), s(-0.1)]).is_ok());
        assert!(SweepTrace::new("C1", "J1", Direction::Up, vec![s(0.0), s(-0.1)]).is_err());
        assert!(SweepTrace::new("C1", "J1", Direction::Down, vec![s(0.0)]).is_err());
        assert!(SweepTrace::new("C1", "J1", Direction::Down, vec![s(0.0), s(0.0)]).is_err());
    }
}
