//! Physical constants and closed-form transport quantities of the 2DEG.
//!
//! Everything here is a pure function of its arguments. The electron gas is
//! taken as spin degenerate, so `k_F = sqrt(2π n_s)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Reduced Planck constant (J·s), CODATA 2018.
pub const HBAR: f64 = 1.054_571_817e-34;
/// Planck constant (J·s), exact.
pub const PLANCK: f64 = 6.626_070_15e-34;
/// Elementary charge (C), exact.
pub const E_CHARGE: f64 = 1.602_176_634e-19;
/// Boltzmann constant (J/K), exact.
pub const K_B: f64 = 1.380_649e-23;
/// Free electron mass (kg), CODATA 2018.
pub const M_E: f64 = 9.109_383_701_5e-31;
/// Conductance quantum 2e²/h (S).
pub const G_Q: f64 = 2.0 * E_CHARGE * E_CHARGE / PLANCK;

/// Default operating temperature of a liquid-helium dip station (K).
pub const DEFAULT_TEMPERATURE: f64 = 4.2;
/// Default factor in the `l_e >= factor * L` ballistic criterion.
pub const DEFAULT_BALLISTIC_FACTOR: f64 = 3.0;

/// Snapshot of the constants table, for reports.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhysicalConstants {
    pub hbar: f64,
    pub e_charge: f64,
    pub k_b: f64,
    pub m_e: f64,
    pub g_q: f64,
}

impl PhysicalConstants {
    pub const CODATA_2018: PhysicalConstants = PhysicalConstants {
        hbar: HBAR,
        e_charge: E_CHARGE,
        k_b: K_B,
        m_e: M_E,
        g_q: G_Q,
    };
}

impl Default for PhysicalConstants {
    fn default() -> Self {
        Self::CODATA_2018
    }
}

/// Two-dimensional electron gas in the InGaAs quantum well.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Material2DEG {
    /// Sheet density (m⁻²).
    pub n_s: f64,
    /// Mobility (m²/V·s).
    pub mu_e: f64,
    /// Effective mass in units of the free electron mass.
    pub m_star_ratio: f64,
    /// Quantum well thickness (m).
    pub well_thickness: f64,
    /// Depth of the well below the surface (m).
    pub well_depth: f64,
}

impl Material2DEG {
    pub const WELL_THICKNESS: f64 = 30e-9;
    pub const WELL_DEPTH: f64 = 120e-9;

    pub fn new(n_s: f64, mu_e: f64, m_star_ratio: f64) -> Result<Self> {
        let material = Material2DEG {
            n_s,
            mu_e,
            m_star_ratio,
            well_thickness: Self::WELL_THICKNESS,
            well_depth: Self::WELL_DEPTH,
        };
        material.validate()?;
        Ok(material)
    }

    /// Wafer values measured in the dark: 2.24e11 cm⁻², 2.5e5 cm²/Vs, m* = 0.039 m_e.
    pub fn dark() -> Self {
        Material2DEG {
            n_s: 2.24e15,
            mu_e: 25.0,
            m_star_ratio: 0.039,
            well_thickness: Self::WELL_THICKNESS,
            well_depth: Self::WELL_DEPTH,
        }
    }

    /// Wafer values after illumination: 2.28e11 cm⁻², 2.58e5 cm²/Vs.
    pub fn illuminated() -> Self {
        Material2DEG {
            n_s: 2.28e15,
            mu_e: 25.8,
            ..Self::dark()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.n_s > 0.0 && self.n_s.is_finite()) {
            return Err(Error::Validation(format!(
                "n_s must be positive, got {}",
                self.n_s
            )));
        }
        if !(self.mu_e > 0.0 && self.mu_e.is_finite()) {
            return Err(Error::Validation(format!(
                "mu_e must be positive, got {}",
                self.mu_e
            )));
        }
        if !(self.m_star_ratio > 0.0 && self.m_star_ratio < 1.0) {
            return Err(Error::Validation(format!(
                "m_star_ratio must lie in (0, 1), got {}",
                self.m_star_ratio
            )));
        }
        Ok(())
    }

    /// Effective mass (kg).
    pub fn m_star(&self) -> f64 {
        self.m_star_ratio * M_E
    }

    pub fn fermi_wavevector(&self) -> f64 {
        // validated materials always have n_s > 0
        (2.0 * PI * self.n_s).sqrt()
    }

    pub fn fermi_energy(&self) -> f64 {
        let k_f = self.fermi_wavevector();
        HBAR * HBAR * k_f * k_f / (2.0 * self.m_star())
    }
}

/// Derived transport quantities at one temperature.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TransportQuantities {
    pub k_f: f64,
    pub v_f: f64,
    pub e_f: f64,
    pub l_e: f64,
    pub zeta_n: f64,
    pub temperature: f64,
}

impl TransportQuantities {
    pub fn derive(material: &Material2DEG, temperature: f64) -> Result<Self> {
        material.validate()?;
        let k_f = fermi_wavevector(material.n_s)?;
        let v_f = fermi_velocity(k_f, material.m_star_ratio)?;
        let e_f = fermi_energy(k_f, material.m_star_ratio)?;
        let l_e = mean_free_path(material.mu_e, material.n_s)?;
        let zeta_n = coherence_length(v_f, temperature)?;
        Ok(TransportQuantities {
            k_f,
            v_f,
            e_f,
            l_e,
            zeta_n,
            temperature,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RegimeClassification {
    pub is_clean: bool,
    pub is_ballistic: bool,
    pub reference_length: f64,
}

/// Fermi wavevector `sqrt(2π n_s)` of a spin-degenerate 2DEG (1/m).
pub fn fermi_wavevector(n_s: f64) -> Result<f64> {
    if !(n_s > 0.0) || !n_s.is_finite() {
        return Err(Error::Domain(format!(
            "sheet density must be positive, got {n_s}"
        )));
    }
    Ok((2.0 * PI * n_s).sqrt())
}

pub fn fermi_velocity(k_f: f64, m_star_ratio: f64) -> Result<f64> {
    if !(m_star_ratio > 0.0) {
        return Err(Error::Domain(format!(
            "effective mass ratio must be positive, got {m_star_ratio}"
        )));
    }
    if !(k_f >= 0.0) {
        return Err(Error::Domain(format!(
            "k_F must be non-negative, got {k_f}"
        )));
    }
    Ok(HBAR * k_f / (m_star_ratio * M_E))
}

/// Parabolic-band Fermi energy `ħ²k_F²/2m*` (J).
pub fn fermi_energy(k_f: f64, m_star_ratio: f64) -> Result<f64> {
    if !(m_star_ratio > 0.0) {
        return Err(Error::Domain(format!(
            "effective mass ratio must be positive, got {m_star_ratio}"
        )));
    }
    Ok(HBAR * HBAR * k_f * k_f / (2.0 * m_star_ratio * M_E))
}

/// Elastic mean free path `ħ μ_e sqrt(2π n_s) / e` (m).
pub fn mean_free_path(mu_e: f64, n_s: f64) -> Result<f64> {
    if !(mu_e > 0.0) || !mu_e.is_finite() {
        return Err(Error::Domain(format!(
            "mobility must be positive, got {mu_e}"
        )));
    }
    let k_f = fermi_wavevector(n_s)?;
    Ok(HBAR * mu_e * k_f / E_CHARGE)
}

/// Thermal coherence length of the normal region `ħ v_F / (2π k_B T)` (m).
pub fn coherence_length(v_f: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) || !temperature.is_finite() {
        return Err(Error::Domain(format!(
            "temperature must be positive, got {temperature}"
        )));
    }
    Ok(HBAR * v_f / (2.0 * PI * K_B * temperature))
}

/// Clean limit is `l_e > ζ_N` (strict); ballistic is `l_e >= factor * L`.
pub fn classify_regime(
    l_e: f64,
    zeta_n: f64,
    reference_length: f64,
    ballistic_factor: f64,
) -> Result<RegimeClassification> {
    for (name, value) in [
        ("l_e", l_e),
        ("zeta_N", zeta_n),
        ("reference length", reference_length),
        ("ballistic factor", ballistic_factor),
    ] {
        if !(value > 0.0) || !value.is_finite() {
            return Err(Error::Domain(format!(
                "{name} must be positive, got {value}"
            )));
        }
    }
    Ok(RegimeClassification {
        is_clean: l_e > zeta_n,
        is_ballistic: l_e >= ballistic_factor * reference_length,
        reference_length,
    })
}

/// Number of hard-wall subbands of a channel of width `width` lying strictly
/// below the Fermi energy, i.e. the count of `n >= 1` with `n π < k_F W`.
///
/// Equals `floor(k_F W / π)` except when `k_F W / π` is an exact integer,
/// where the top subband sits at `E_F` and is not counted.
pub fn max_modes(k_f: f64, width: f64) -> u32 {
    if !(width > 0.0) || !(k_f > 0.0) {
        return 0;
    }
    let x = k_f * width / PI;
    let floor = x.floor();
    let n = if floor == x { floor - 1.0 } else { floor };
    n.max(0.0) as u32
}

/// Energy of hard-wall subband `n` in a channel of width `width` (J).
pub fn subband_energy(n: u32, width: f64, m_star_ratio: f64) -> f64 {
    let n = f64::from(n);
    n * n * PI * PI * HBAR * HBAR / (2.0 * m_star_ratio * M_E * width * width)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn rel(a: f64, b: f64) -> f64 {
        ((a - b) / b).abs()
    }

    #[test]
    fn conductance_quantum_matches_planck() {
        let planck = 2.0 * PI * HBAR;
        assert!(rel(G_Q, 2.0 * E_CHARGE * E_CHARGE / planck) < 1e-9);
        assert!(rel(G_Q, 7.748_091_729e-5) < 1e-9);
    }

    #[test]
    fn fermi_wavevector_unit_case() {
        let k = fermi_wavevector(1.0 / (2.0 * PI)).unwrap();
        assert!((k - 1.0).abs() < 1e-15);
    }

    #[test]
    fn fermi_wavevector_wafer_values() {
        assert!(rel(fermi_wavevector(2.24e15).unwrap(), 1.1864e8) < 1e-4);
        assert!(rel(fermi_wavevector(2.28e15).unwrap(), 1.197e8) < 1e-3);
    }

    #[test]
    fn non_positive_inputs_are_domain_errors() {
        assert!(matches!(fermi_wavevector(0.0), Err(Error::Domain(_))));
        assert!(matches!(fermi_wavevector(-1.0), Err(Error::Domain(_))));
        assert!(matches!(fermi_velocity(1.0, 0.0), Err(Error::Domain(_))));
        assert!(matches!(mean_free_path(0.0, 1e15), Err(Error::Domain(_))));
        assert!(matches!(mean_free_path(1.0, -1e15), Err(Error::Domain(_))));
        assert!(matches!(coherence_length(1e5, 0.0), Err(Error::Domain(_))));
    }

    #[test]
    fn fermi_velocity_values() {
        assert_eq!(fermi_velocity(0.0, 0.039).unwrap(), 0.0);
        assert!(rel(fermi_velocity(1.1864e8, 0.039).unwrap(), 3.52e5) < 5e-3);
        let v1 = fermi_velocity(1e8, 0.039).unwrap();
        let v2 = fermi_velocity(2e8, 0.039).unwrap();
        assert!(rel(v2, 2.0 * v1) < 1e-15);
    }

    #[test]
    fn mean_free_path_values() {
        assert!(rel(mean_free_path(25.0, 2.24e15).unwrap(), 1.95e-6) < 5e-3);
        assert!(rel(mean_free_path(25.8, 2.28e15).unwrap(), 2.03e-6) < 5e-3);
        let full = mean_free_path(25.0, 2.24e15).unwrap();
        let half = mean_free_path(12.5, 2.24e15).unwrap();
        assert!(rel(half, full / 2.0) < 1e-15);
    }

    #[test]
    fn coherence_length_values() {
        assert!(rel(coherence_length(3.52e5, 4.2).unwrap(), 1.02e-7) < 5e-3);
        assert!(rel(coherence_length(3.52e5, 2.1).unwrap(), 2.04e-7) < 5e-3);
        let a = coherence_length(3.52e5, 4.2).unwrap();
        let b = coherence_length(3.52e5, 8.4).unwrap();
        assert_eq!(b, a / 2.0);
    }

    #[test]
    fn regime_examples() {
        let r = classify_regime(1.95e-6, 0.102e-6, 0.4e-6, 3.0).unwrap();
        assert!(r.is_clean && r.is_ballistic);
        let r = classify_regime(1e-6, 1e-6, 0.1e-6, 3.0).unwrap();
        assert!(!r.is_clean);
        let r = classify_regime(1.95e-6, 0.102e-6, 3.2e-6, 3.0).unwrap();
        assert!(r.is_clean && !r.is_ballistic);
        assert!(classify_regime(-1.0, 1.0, 1.0, 3.0).is_err());
    }

    #[test]
    fn mode_counts() {
        assert_eq!(max_modes(1.1864e8, 400e-9), 15);
        assert_eq!(max_modes(1.1864e8, 100e-9), 3);
        assert_eq!(max_modes(1.1864e8, 0.9 * PI / 1.1864e8), 0);
        // top subband exactly at E_F is not counted
        assert_eq!(max_modes(PI, 2.0), 1);
    }

    #[test]
    fn dark_material_derivation() {
        let q = TransportQuantities::derive(&Material2DEG::dark(), 4.2).unwrap();
        assert!(q.l_e > q.zeta_n);
        assert!(rel(q.e_f, Material2DEG::dark().fermi_energy()) < 1e-12);
        assert!(rel(q.v_f, HBAR * q.k_f / Material2DEG::dark().m_star()) < 1e-12);
    }

    #[test]
    fn material_validation() {
        assert!(Material2DEG::new(2.24e15, 25.0, 0.039).is_ok());
        assert!(Material2DEG::new(0.0, 25.0, 0.039).is_err());
        assert!(Material2DEG::new(2.24e15, -1.0, 0.039).is_err());
        assert!(Material2DEG::new(2.24e15, 25.0, 1.0).is_err());
    }
}
