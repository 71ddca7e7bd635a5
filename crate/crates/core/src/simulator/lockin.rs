//! Lock-in emulation: sinusoidal excitation, noisy current, synchronous
//! demodulation over a whole number of periods.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::seeds;
use crate::simulator::SweepProtocol;

/// Current noise added to the measured signal.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    pub enabled: bool,
    /// Standard deviation of white current noise per sample (A).
    #[serde(rename = "white_sigma_A")]
    pub white_sigma: f64,
    /// Amplitude of the 1/f component (A); scales the white input of a pinking filter.
    #[serde(rename = "pink_sigma_A")]
    pub pink_sigma: f64,
}

impl Default for NoiseConfig {
    fn default() -> Self {
        NoiseConfig {
            enabled: true,
            white_sigma: 5e-13,
            pink_sigma: 0.0,
        }
    }
}

impl NoiseConfig {
    pub fn off() -> Self {
        NoiseConfig {
            enabled: false,
            white_sigma: 0.0,
            pink_sigma: 0.0,
        }
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("white_sigma_A", self.white_sigma),
            ("pink_sigma_A", self.pink_sigma),
        ] {
            if !(v >= 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name} must be non-negative, got {v}"
                )));
            }
        }
        Ok(())
    }

    fn is_silent(&self) -> bool {
        !self.enabled || (self.white_sigma == 0.0 && self.pink_sigma == 0.0)
    }

    /// Standard deviation of the demodulated conductance from white noise alone (S).
    pub fn white_estimator_sd(&self, protocol: &SweepProtocol) -> f64 {
        if self.is_silent() {
            return 0.0;
        }
        let n = f64::from(protocol.lockin_cycles() * protocol.samples_per_cycle);
        self.white_sigma * (2.0 / n).sqrt() / protocol.v_ac
    }
}

/// Kellet's three-pole approximation of a 1/f spectrum.
#[derive(Debug, Clone, Copy, Default)]
struct PinkFilter {
    b: [f64; 3],
}

impl PinkFilter {
    fn next(&mut self, white: f64) -> f64 {
        self.b[0] = 0.99765 * self.b[0] + white * 0.099_046_0;
        self.b[1] = 0.96300 * self.b[1] + white * 0.296_516_4;
        self.b[2] = 0.57000 * self.b[2] + white * 1.052_691_3;
        self.b[0] + self.b[1] + self.b[2] + white * 0.1848
    }
}

/// A lock-in amplifier bound to one protocol. Keeps the 1/f filter state
/// between gate points so slow drifts span a sweep.
#[derive(Debug, Clone)]
pub struct LockIn {
    reference: Vec<f64>,
    v_ac: f64,
    v_dc: f64,
    noise: NoiseConfig,
    pink: PinkFilter,
}

impl LockIn {
    pub fn new(protocol: &SweepProtocol, noise: NoiseConfig) -> Result<Self> {
        let cycles = protocol.lockin_cycles();
        if cycles < super::MIN_LOCKIN_CYCLES {
            return Err(Error::Validation(format!(
                "integration window holds {:.3} excitation periods, need at least {}",
                protocol.integration_time * protocol.f_ac,
                super::MIN_LOCKIN_CYCLES
            )));
        }
        if protocol.samples_per_cycle < 4 {
            return Err(Error::Validation(
                "samples_per_cycle must be at least 4".into(),
            ));
        }
        noise.validate()?;
        let per_cycle = protocol.samples_per_cycle as usize;
        // sample k sits at t = k / (f * per_cycle); the phase depends only on k mod per_cycle
        let one_cycle: Vec<f64> = (0..per_cycle)
            .map(|k| (2.0 * PI * k as f64 / per_cycle as f64).sin())
            .collect();
        let reference = one_cycle
            .iter()
            .copied()
            .cycle()
            .take(per_cycle * cycles as usize)
            .collect();
        Ok(LockIn {
            reference,
            v_ac: protocol.v_ac,
            v_dc: protocol.v_dc_bias,
            noise,
            pink: PinkFilter::default(),
        })
    }

    /// Number of current samples per gate point.
    pub fn window_len(&self) -> usize {
        self.reference.len()
    }

    /// Demodulated differential conductance `2 <I sin> / v_ac`, unclamped (S).
    pub fn measure<R: Rng + ?Sized>(&mut self, g_true: f64, rng: &mut R) -> f64 {
        let silent = self.noise.is_silent();
        let mut acc = 0.0;
        for &s in &self.reference {
            let mut current = g_true * (self.v_dc + self.v_ac * s);
            if !silent {
                let w: f64 = StandardNormal.sample(rng);
                current += self.noise.white_sigma * w;
                if self.noise.pink_sigma > 0.0 {
                    let p: f64 = StandardNormal.sample(rng);
                    current += self.noise.pink_sigma * self.pink.next(p);
                }
            }
            acc += current * s;
        }
        2.0 * acc / (self.v_ac * self.reference.len() as f64)
    }
}

/// One lock-in reading of `g_true` with a fresh noise stream.
pub fn lockin_measure(
    g_true: f64,
    protocol: &SweepProtocol,
    noise: &NoiseConfig,
    seed: u64,
) -> Result<f64> {
    let mut lockin = LockIn::new(protocol, *noise)?;
    let mut rng = seeds::stream(seed, &["lockin"]);
    Ok(lockin.measure(g_true, &mut rng))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn noise_free_demodulation_is_exact() {
        let p = SweepProtocol::default();
        let g = lockin_measure(1e-4, &p, &NoiseConfig::off(), 0).unwrap();
        assert!(((g - 1e-4) / 1e-4).abs() < 1e-4);
        assert!(((g - 1e-4) / 1e-4).abs() < 1e-12);
        assert_eq!(
            lockin_measure(0.0, &p, &NoiseConfig::off(), 0).unwrap(),
            0.0
        );
    }

    #[test]
    fn dc_bias_does_not_leak_into_the_estimate() {
        let p = SweepProtocol {
            v_dc_bias: 1e-3,
            ..Default::default()
        };
        let g = lockin_measure(1e-4, &p, &NoiseConfig::off(), 0).unwrap();
        assert!(((g - 1e-4) / 1e-4).abs() < 1e-6);
    }

    #[test]
    fn short_window_is_rejected() {
        let p = SweepProtocol {
            integration_time: 0.05,
            ..Default::default()
        };
        assert!(lockin_measure(1e-4, &p, &NoiseConfig::off(), 0).is_err());
    }

    #[test]
    fn estimator_sd_matches_prediction() {
        let p = SweepProtocol::default();
        let noise = NoiseConfig {
            white_sigma: 1e-10,
            ..NoiseConfig::default()
        };
        let n = 2000;
        let readings: Vec<f64> = (0..n)
            .map(|s| lockin_measure(0.0, &p, &noise, s).unwrap())
            .collect();
        let mean = readings.iter().sum::<f64>() / n as f64;
        let sd = (readings.iter().map(|r| (r - mean).powi(2)).sum::<f64>() / (n - 1) as f64).sqrt();
        let predicted = noise.white_estimator_sd(&p);
        assert!(
            (sd / predicted - 1.0).abs() < 0.1,
            "sd {sd} predicted {predicted}"
        );
    }

    #[test]
    fn pink_noise_is_reproducible() {
        let p = SweepProtocol::default();
        let noise = NoiseConfig {
            pink_sigma: 1e-12,
            ..NoiseConfig::default()
        };
        let a = lockin_measure(1e-5, &p, &noise, 3).unwrap();
        let b = lockin_measure(1e-5, &p, &noise, 3).unwrap();
        assert_eq!(a, b);
    }
}
