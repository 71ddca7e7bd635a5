//! Noise-free conductance of a gated constriction.
//!
//! The constriction is a hard-wall waveguide whose width shrinks linearly
//! with negative gate voltage. Each transverse subband contributes one
//! conductance quantum weighted by a logistic transmission around the Fermi
//! energy, and the channel sits in series with the Nb/2DEG contacts.
//!
//! The depletion line is anchored so the lowest subband is 1% transmitting
//! exactly at the calibrated pinch-off voltage `v_pinch_star`; below that
//! voltage the channel is closed. This keeps the visible switching voltage a
//! calibration input, independent of the constriction width.

use serde::{Deserialize, Serialize};

use crate::chip::{FailureMode, JunctionDevice};
use crate::error::{Error, Result};
use crate::physics::{Material2DEG, G_Q, HBAR, K_B};
use crate::simulator::Direction;

/// Modes whose transmission drops below this are not summed.
const TRANSMISSION_CUTOFF: f64 = 1e-9;
/// Transmission of the lowest subband at the pinch-off voltage.
const PINCH_TRANSMISSION: f64 = 0.01;

/// Heating proxy gain per sample, normalised to one conductance quantum
/// driven by 5 µV across a 1.4 µm junction.
const HEAT_GAIN: f64 = 0.01;
const HEAT_REFERENCE_V_AC: f64 = 5e-6;
const HEAT_REFERENCE_L_J_UM: f64 = 1.4;

/// Conductance signatures of the failure modes.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SignatureConfig {
    /// Residual conductance of a device that never pinches, as a fraction of G(0).
    pub floor_frac: f64,
    /// Gate leakage conductance per volt of |V_g| (S/V).
    #[serde(rename = "leak_slope_S_per_V")]
    pub leak_slope: f64,
}

impl Default for SignatureConfig {
    fn default() -> Self {
        SignatureConfig {
            floor_frac: 0.15,
            leak_slope: 3e-5,
        }
    }
}

impl SignatureConfig {
    pub fn validate(&self) -> Result<()> {
        if !(0.0..=1.0).contains(&self.floor_frac) {
            return Err(Error::Validation(format!(
                "floor_frac must lie in [0, 1], got {}",
                self.floor_frac
            )));
        }
        if !(self.leak_slope >= 0.0 && self.leak_slope.is_finite()) {
            return Err(Error::Validation(format!(
                "leak_slope must be non-negative, got {}",
                self.leak_slope
            )));
        }
        Ok(())
    }
}

/// Accumulated dissipation of the current sweep.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct HysteresisState {
    pub heat_level: f64,
}

impl HysteresisState {
    /// Fraction of the saturated effect reached, in [0, 1).
    pub fn saturation(&self) -> f64 {
        1.0 - (-self.heat_level).exp()
    }
}

/// A device bound to its material and temperature, with the gate-independent
/// parts of the model precomputed.
#[derive(Debug, Clone)]
pub struct DeviceModel<'a> {
    pub device: &'a JunctionDevice,
    pub signatures: SignatureConfig,
    fermi_energy: f64,
    /// Smearing energy Γ (J).
    gamma: f64,
    m_star: f64,
    /// Voltage at which the linear depletion would reach zero width.
    v_zero_width: f64,
    /// False when the constriction is too narrow to carry any mode.
    can_open: bool,
}

impl<'a> DeviceModel<'a> {
    pub fn new(
        device: &'a JunctionDevice,
        material: &Material2DEG,
        temperature: f64,
        signatures: SignatureConfig,
    ) -> Self {
        let cal = device.calibration;
        let fermi_energy = material.fermi_energy();
        let m_star = material.m_star();
        // lever arm converts the voltage smear into an energy
        let lever_arm = fermi_energy / cal.v_pinch_star.abs();
        let gamma = (K_B * temperature).max(lever_arm * cal.smear_width);

        // width at which E_1 = E_F + Γ ln(1/p - 1), i.e. T_1 = p
        let e_pinch = fermi_energy + gamma * (1.0 / PINCH_TRANSMISSION - 1.0).ln();
        let w_pinch = std::f64::consts::PI * HBAR / (2.0 * m_star * e_pinch).sqrt();
        let frac = w_pinch / device.geometry.w_c();
        let can_open = frac < 1.0;
        let v_zero_width = if can_open {
            cal.v_pinch_star / (1.0 - frac)
        } else {
            cal.v_pinch_star
        };
        DeviceModel {
            device,
            signatures,
            fermi_energy,
            gamma,
            m_star,
            v_zero_width,
            can_open,
        }
    }

    /// Smearing energy Γ = max(k_B T, lever arm × smear width) (J).
    pub fn gamma(&self) -> f64 {
        self.gamma
    }

    /// Effective constriction width at gate voltage `v_g` (m).
    pub fn effective_width(&self, v_g: f64) -> f64 {
        let frac = ((v_g - self.v_zero_width) / -self.v_zero_width).clamp(0.0, 1.0);
        self.device.geometry.w_c() * frac
    }

    /// Conductance of the bare constriction in units of G_q.
    pub fn channel_modes(&self, v_g: f64) -> f64 {
        if !self.can_open || v_g <= self.device.calibration.v_pinch_star {
            return 0.0;
        }
        let w = self.effective_width(v_g);
        if w <= 0.0 {
            return 0.0;
        }
        let level =
            std::f64::consts::PI * std::f64::consts::PI * HBAR * HBAR / (2.0 * self.m_star * w * w);
        let mut sum = 0.0;
        let mut n = 1u32;
        loop {
            let e_n = level * f64::from(n) * f64::from(n);
            let t_n = transmission(e_n - self.fermi_energy, self.gamma);
            if e_n > self.fermi_energy && t_n < TRANSMISSION_CUTOFF {
                break;
            }
            sum += t_n;
            n += 1;
        }
        sum
    }

    /// Healthy-device conductance including the series contacts (S).
    pub fn ideal(&self, v_g: f64) -> f64 {
        let g_ch = G_Q * self.channel_modes(v_g);
        if g_ch <= 0.0 {
            return 0.0;
        }
        1.0 / (1.0 / g_ch + 1.0 / self.device.calibration.g_series)
    }

    /// Conductance with the device's failure signature applied (S).
    pub fn with_failure(&self, v_g: f64) -> f64 {
        match self.device.failure {
            FailureMode::None => self.ideal(v_g),
            FailureMode::OpenContact | FailureMode::PrePinched => 0.0,
            FailureMode::ThickOxideNoPinchoff => self
                .ideal(v_g)
                .max(self.signatures.floor_frac * self.ideal(0.0)),
            FailureMode::GateLeak => self.ideal(v_g) + self.signatures.leak_slope * v_g.abs(),
        }
    }

    /// Conductance during a sweep with heating hysteresis.
    ///
    /// The downward sweep heats the junction in proportion to the dissipated
    /// ac power and the junction length. The return sweep is scaled by a
    /// single factor set by the accumulated heat, so zero stays zero and the
    /// pinch-off voltage does not move.
    pub fn hysteretic(
        &self,
        v_g: f64,
        direction: Direction,
        state: HysteresisState,
        v_ac: f64,
    ) -> (f64, HysteresisState) {
        let g = self.with_failure(v_g);
        match direction {
            Direction::Down => {
                let drive = (v_ac / HEAT_REFERENCE_V_AC).powi(2);
                let length = self.device.geometry.l_j_um / HEAT_REFERENCE_L_J_UM;
                let heat = state.heat_level + HEAT_GAIN * (g / G_Q) * drive * length;
                (g, HysteresisState { heat_level: heat })
            }
            Direction::Up => {
                let factor = 1.0 - self.device.calibration.hysteresis_amp * state.saturation();
                (g * factor, state)
            }
        }
    }
}

/// Logistic transmission of a subband `delta` above the Fermi energy.
fn transmission(delta: f64, gamma: f64) -> f64 {
    if gamma <= 0.0 {
        return if delta < 0.0 { 1.0 } else { 0.0 };
    }
    1.0 / (1.0 + (delta / gamma).exp())
}

pub fn ideal_conductance(
    device: &JunctionDevice,
    material: &Material2DEG,
    v_g: f64,
    temperature: f64,
) -> f64 {
    DeviceModel::new(device, material, temperature, SignatureConfig::default()).ideal(v_g)
}

pub fn conductance_with_failure(
    device: &JunctionDevice,
    material: &Material2DEG,
    v_g: f64,
    temperature: f64,
    signatures: SignatureConfig,
) -> f64 {
    DeviceModel::new(device, material, temperature, signatures).with_failure(v_g)
}

pub fn hysteretic_conductance(
    device: &JunctionDevice,
    material: &Material2DEG,
    v_g: f64,
    temperature: f64,
    direction: Direction,
    state: HysteresisState,
    v_ac: f64,
) -> (f64, HysteresisState) {
    DeviceModel::new(device, material, temperature, SignatureConfig::default())
        .hysteretic(v_g, direction, state, v_ac)
}
