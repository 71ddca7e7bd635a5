//! Data model of an addressable chip: eight split-gate junctions sharing two
//! global gate pads, their designed geometry, per-device calibration and
//! failure state, and the JSON manifest format.

use std::collections::HashSet;
use std::fs;
use std::path::Path;

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::physics::{Material2DEG, DEFAULT_TEMPERATURE, G_Q};
use crate::seeds;

/// Junctions per chip.
pub const JUNCTIONS_PER_CHIP: usize = 8;
/// Chips per wafer quadrant set.
pub const CHIPS_PER_WAFER: usize = 9;
/// Output range of the gate voltage source (V).
pub const GATE_SOURCE_LIMIT: f64 = 10.0;

/// Designed dimensions of one junction. Stored in the manifest units
/// (nm for the constriction, µm for the junction); accessors return metres.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionGeometry {
    pub l_c_nm: f64,
    pub w_c_nm: f64,
    pub l_j_um: f64,
    pub w_j_um: f64,
}

impl JunctionGeometry {
    pub fn new(l_c_nm: f64, w_c_nm: f64, l_j_um: f64, w_j_um: f64) -> Result<Self> {
        let g = JunctionGeometry {
            l_c_nm,
            w_c_nm,
            l_j_um,
            w_j_um,
        };
        g.validate()?;
        Ok(g)
    }

    /// Constriction length (m).
    pub fn l_c(&self) -> f64 {
        self.l_c_nm * 1e-9
    }

    /// Constriction width (m).
    pub fn w_c(&self) -> f64 {
        self.w_c_nm * 1e-9
    }

    /// Nb-to-Nb junction length (m).
    pub fn l_j(&self) -> f64 {
        self.l_j_um * 1e-6
    }

    /// Junction width (m).
    pub fn w_j(&self) -> f64 {
        self.w_j_um * 1e-6
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("L_c_nm", self.l_c_nm),
            ("W_c_nm", self.w_c_nm),
            ("L_J_um", self.l_j_um),
            ("W_J_um", self.w_j_um),
        ] {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::Validation(format!(
                    "{name} must be positive, got {v}"
                )));
            }
        }
        if self.w_c() > self.w_j() {
            return Err(Error::Validation(format!(
                "W_c_nm ({}) exceeds W_J_um ({})",
                self.w_c_nm, self.w_j_um
            )));
        }
        if self.l_c() > self.l_j() {
            return Err(Error::Validation(format!(
                "L_c_nm ({}) exceeds L_J_um ({})",
                self.l_c_nm, self.l_j_um
            )));
        }
        Ok(())
    }

    /// True when both lengths match the given class to within 0.1%.
    pub fn in_class(&self, l_j_um: f64, w_c_nm: f64) -> bool {
        let close = |a: f64, b: f64| (a - b).abs() <= 1e-3 * b.abs().max(1e-12);
        close(self.l_j_um, l_j_um) && close(self.w_c_nm, w_c_nm)
    }
}

/// Per-device parameters of the conductance model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JunctionCalibration {
    /// Gate voltage at which the channel closes (V, negative).
    pub v_pinch_star: f64,
    /// Contact/interface conductance in series with the channel (S). May be infinite.
    pub g_series: f64,
    /// Fractional conductance loss of the return sweep at saturated heating, in [0, 1).
    pub hysteresis_amp: f64,
    /// Gate-voltage scale of the transition smearing (V).
    pub smear_width: f64,
}

impl JunctionCalibration {
    /// Nominal calibration for a designed geometry.
    ///
    /// Pinch-off sits at -0.56 V for 1.4 µm junctions and moves up by
    /// 0.02 V per µm of extra junction length. Series conductance falls with
    /// junction length; only junctions longer than 2 µm show hysteresis.
    pub fn nominal(geometry: &JunctionGeometry) -> Self {
        let spread = CalibrationSpread::default();
        JunctionCalibration {
            v_pinch_star: spread.v_pinch_mean
                + spread.v_pinch_slope_per_um * (geometry.l_j_um - REFERENCE_L_J_UM),
            g_series: 20.0 * G_Q * (REFERENCE_L_J_UM / geometry.l_j_um).powf(1.5),
            hysteresis_amp: (0.2 * (geometry.l_j_um - 2.0)).clamp(0.0, 0.5),
            smear_width: 0.02,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.v_pinch_star < 0.0 && self.v_pinch_star.is_finite()) {
            return Err(Error::Validation(format!(
                "v_pinch_star_V must be negative, got {}",
                self.v_pinch_star
            )));
        }
        if !(self.g_series > 0.0) {
            return Err(Error::Validation(format!(
                "g_series_S must be positive, got {}",
                self.g_series
            )));
        }
        if !(0.0..1.0).contains(&self.hysteresis_amp) {
            return Err(Error::Validation(format!(
                "hysteresis_amp must lie in [0, 1), got {}",
                self.hysteresis_amp
            )));
        }
        if !(self.smear_width > 0.0 && self.smear_width.is_finite()) {
            return Err(Error::Validation(format!(
                "smear_width_V must be positive, got {}",
                self.smear_width
            )));
        }
        Ok(())
    }
}

const REFERENCE_L_J_UM: f64 = 1.4;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FailureMode {
    None,
    /// Broken contact pad or bond wire: no current path.
    OpenContact,
    /// Gate leaks into the channel: extra conductance growing with |V_g|.
    GateLeak,
    /// Thicker gate oxide: the channel never fully pinches off.
    ThickOxideNoPinchoff,
    /// Surface charge already depletes the constriction at zero bias.
    PrePinched,
}

impl FailureMode {
    pub const FAILED: [FailureMode; 4] = [
        FailureMode::OpenContact,
        FailureMode::GateLeak,
        FailureMode::ThickOxideNoPinchoff,
        FailureMode::PrePinched,
    ];

    pub fn is_failed(self) -> bool {
        self != FailureMode::None
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct JunctionDevice {
    pub junction_id: String,
    pub geometry: JunctionGeometry,
    pub calibration: JunctionCalibration,
    pub failure: FailureMode,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ChipManifest {
    pub chip_id: String,
    pub junctions: Vec<JunctionDevice>,
    pub material: Material2DEG,
    /// Measurement temperature (K).
    pub temperature: f64,
    /// Free-text process notes; not interpreted.
    pub fabrication_notes: String,
}

/// Designed Table-1 geometry of junction `J{index+1}`.
pub fn designed_geometry(index: usize) -> JunctionGeometry {
    const W_C_NM: [f64; JUNCTIONS_PER_CHIP] =
        [400.0, 300.0, 200.0, 100.0, 100.0, 100.0, 100.0, 100.0];
    const L_J_UM: [f64; JUNCTIONS_PER_CHIP] = [1.4, 1.4, 1.4, 1.4, 1.4, 1.4, 1.4, 3.2];
    JunctionGeometry {
        l_c_nm: 400.0,
        w_c_nm: W_C_NM[index],
        l_j_um: L_J_UM[index],
        w_j_um: 5.0,
    }
}

/// A chip with the eight designed junctions, nominal calibration and no failures.
pub fn default_chip(chip_id: &str, material: Material2DEG) -> ChipManifest {
    let junctions = (0..JUNCTIONS_PER_CHIP)
        .map(|i| {
            let geometry = designed_geometry(i);
            JunctionDevice {
                junction_id: format!("J{}", i + 1),
                geometry,
                calibration: JunctionCalibration::nominal(&geometry),
                failure: FailureMode::None,
            }
        })
        .collect();
    ChipManifest {
        chip_id: chip_id.to_string(),
        junctions,
        material,
        temperature: DEFAULT_TEMPERATURE,
        fabrication_notes: String::new(),
    }
}

impl ChipManifest {
    pub fn validate(&self) -> Result<()> {
        if self.chip_id.trim().is_empty() {
            return Err(Error::Validation("chip_id must be nonempty".into()));
        }
        if self.junctions.len() != JUNCTIONS_PER_CHIP {
            return Err(Error::Validation(format!(
                "chip {} has {} junctions, expected {}",
                self.chip_id,
                self.junctions.len(),
                JUNCTIONS_PER_CHIP
            )));
        }
        if !(self.temperature > 0.0 && self.temperature.is_finite()) {
            return Err(Error::Validation(format!(
                "temperature_K must be positive, got {}",
                self.temperature
            )));
        }
        self.material.validate()?;
        let mut seen = HashSet::new();
        for j in &self.junctions {
            if !seen.insert(j.junction_id.as_str()) {
                return Err(Error::Validation(format!(
                    "duplicate junction id {} on chip {}",
                    j.junction_id, self.chip_id
                )));
            }
            let ctx = |e: Error| match e {
                Error::Validation(m) => Error::Validation(format!(
                    "chip {} junction {}: {m}",
                    self.chip_id, j.junction_id
                )),
                other => other,
            };
            j.geometry.validate().map_err(ctx)?;
            j.calibration.validate().map_err(ctx)?;
        }
        Ok(())
    }

    pub fn junction(&self, junction_id: &str) -> Result<&JunctionDevice> {
        self.junctions
            .iter()
            .find(|j| j.junction_id == junction_id)
            .ok_or_else(|| Error::UnknownJunction(junction_id.to_string()))
    }
}

/// Selected source-drain pair plus the voltages on the two global gate pads.
///
/// The pad voltages are shared by every junction on the chip; only the
/// measured pair changes with the selection.
#[derive(Debug, Clone, PartialEq)]
pub struct GateAddress {
    pub selected_junction: String,
    pub v_gate_left: f64,
    pub v_gate_right: f64,
}

impl GateAddress {
    /// Gate voltage seen by a symmetric split gate: the mean of both halves.
    pub fn effective_gate_voltage(&self) -> f64 {
        0.5 * (self.v_gate_left + self.v_gate_right)
    }
}

pub fn address(
    chip: &ChipManifest,
    junction_id: &str,
    v_left: f64,
    v_right: f64,
) -> Result<GateAddress> {
    chip.junction(junction_id)?;
    check_gate_range("left", v_left)?;
    check_gate_range("right", v_right)?;
    Ok(GateAddress {
        selected_junction: junction_id.to_string(),
        v_gate_left: v_left,
        v_gate_right: v_right,
    })
}

fn check_gate_range(side: &'static str, value: f64) -> Result<()> {
    if !(value.abs() <= GATE_SOURCE_LIMIT) {
        return Err(Error::GateOutOfRange {
            side,
            value,
            limit: GATE_SOURCE_LIMIT,
        });
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Failures and calibration spread

/// Failure probability of one (L_J, W_c) design class.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureClass {
    #[serde(rename = "L_J_um")]
    pub l_j_um: f64,
    #[serde(rename = "W_c_nm")]
    pub w_c_nm: f64,
    pub p_fail: f64,
}

/// Relative weights of the failure kinds, given that a junction failed.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureKindWeights {
    pub open_contact: f64,
    pub gate_leak: f64,
    pub thick_oxide_no_pinchoff: f64,
    pub pre_pinched: f64,
}

impl FailureKindWeights {
    fn as_array(&self) -> [f64; 4] {
        [
            self.open_contact,
            self.gate_leak,
            self.thick_oxide_no_pinchoff,
            self.pre_pinched,
        ]
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FailureConfig {
    pub classes: Vec<FailureClass>,
    /// Used for geometries matching no class.
    pub default_p_fail: f64,
    /// Kind weights for constrictions of 100 nm and narrower.
    pub narrow_weights: FailureKindWeights,
    pub wide_weights: FailureKindWeights,
    #[serde(default = "default_narrow_limit")]
    pub narrow_limit_nm: f64,
}

fn default_narrow_limit() -> f64 {
    100.0
}

impl FailureConfig {
    /// Failure rates set to one minus the measured per-class switching yield
    /// (6/7, 6/7, 6/8, 26/35, 5/9).
    pub fn measured_yields() -> Self {
        FailureConfig {
            classes: vec![
                FailureClass {
                    l_j_um: 1.4,
                    w_c_nm: 400.0,
                    p_fail: 1.0 / 7.0,
                },
                FailureClass {
                    l_j_um: 1.4,
                    w_c_nm: 300.0,
                    p_fail: 1.0 / 7.0,
                },
                FailureClass {
                    l_j_um: 1.4,
                    w_c_nm: 200.0,
                    p_fail: 2.0 / 8.0,
                },
                FailureClass {
                    l_j_um: 1.4,
                    w_c_nm: 100.0,
                    p_fail: 9.0 / 35.0,
                },
                FailureClass {
                    l_j_um: 3.2,
                    w_c_nm: 100.0,
                    p_fail: 4.0 / 9.0,
                },
            ],
            default_p_fail: 0.0,
            // narrow non-switching devices mostly show no conductance at zero bias
            narrow_weights: FailureKindWeights {
                open_contact: 0.2,
                gate_leak: 0.1,
                thick_oxide_no_pinchoff: 0.1,
                pre_pinched: 0.6,
            },
            wide_weights: FailureKindWeights {
                open_contact: 0.4,
                gate_leak: 0.3,
                thick_oxide_no_pinchoff: 0.3,
                pre_pinched: 0.0,
            },
            narrow_limit_nm: default_narrow_limit(),
        }
    }

    pub fn none() -> Self {
        FailureConfig {
            classes: Vec::new(),
            default_p_fail: 0.0,
            ..Self::measured_yields()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let check_p = |name: &str, p: f64| {
            if (0.0..=1.0).contains(&p) {
                Ok(())
            } else {
                Err(Error::Validation(format!(
                    "{name} must lie in [0, 1], got {p}"
                )))
            }
        };
        check_p("default_p_fail", self.default_p_fail)?;
        for c in &self.classes {
            check_p(
                &format!("p_fail of class ({} um, {} nm)", c.l_j_um, c.w_c_nm),
                c.p_fail,
            )?;
        }
        for (name, w) in [
            ("narrow_weights", &self.narrow_weights),
            ("wide_weights", &self.wide_weights),
        ] {
            let a = w.as_array();
            if a.iter().any(|x| !(*x >= 0.0 && x.is_finite())) || a.iter().sum::<f64>() <= 0.0 {
                return Err(Error::Validation(format!(
                    "{name} must be non-negative with a positive sum"
                )));
            }
        }
        Ok(())
    }

    pub fn p_fail(&self, geometry: &JunctionGeometry) -> f64 {
        self.classes
            .iter()
            .find(|c| geometry.in_class(c.l_j_um, c.w_c_nm))
            .map_or(self.default_p_fail, |c| c.p_fail)
    }

    fn weights(&self, geometry: &JunctionGeometry) -> &FailureKindWeights {
        if geometry.w_c_nm <= self.narrow_limit_nm {
            &self.narrow_weights
        } else {
            &self.wide_weights
        }
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let config: FailureConfig = serde_json::from_str(&text)
            .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
        config.validate()?;
        Ok(config)
    }
}

impl Default for FailureConfig {
    fn default() -> Self {
        Self::measured_yields()
    }
}

/// Assigns a failure mode to every junction. Each junction draws from its own
/// stream keyed by `(seed, chip_id, junction_id)`, so the outcome does not
/// depend on chip order or on the other junctions. Failures already declared
/// in the manifest are kept.
pub fn sample_failures(
    chip: &ChipManifest,
    config: &FailureConfig,
    seed: u64,
) -> Result<ChipManifest> {
    config.validate()?;
    let mut out = chip.clone();
    for j in &mut out.junctions {
        if j.failure.is_failed() {
            continue;
        }
        let mut rng = seeds::stream(seed, &["failure", &chip.chip_id, &j.junction_id]);
        let u: f64 = rng.random();
        let p = config.p_fail(&j.geometry);
        j.failure = if u < p {
            let weights = config.weights(&j.geometry).as_array();
            let total: f64 = weights.iter().sum();
            let mut pick = rng.random::<f64>() * total;
            let mut kind = FailureMode::FAILED[3];
            for (w, k) in weights.iter().zip(FailureMode::FAILED) {
                if *w > 0.0 && pick < *w {
                    kind = k;
                    break;
                }
                pick -= w;
            }
            kind
        } else {
            FailureMode::None
        };
    }
    Ok(out)
}

/// Device-to-device variation of the calibration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CalibrationSpread {
    pub v_pinch_mean: f64,
    pub v_pinch_sd: f64,
    /// Shift of the pinch-off voltage per µm of junction length beyond 1.4 µm.
    pub v_pinch_slope_per_um: f64,
    /// Log-normal spread of the series conductance shared by a whole chip.
    pub g_series_chip_log_sd: f64,
    pub g_series_junction_log_sd: f64,
}

impl Default for CalibrationSpread {
    fn default() -> Self {
        CalibrationSpread {
            v_pinch_mean: -0.56,
            v_pinch_sd: 0.03,
            v_pinch_slope_per_um: 0.02,
            g_series_chip_log_sd: 0.25,
            g_series_junction_log_sd: 0.1,
        }
    }
}

/// Draws per-device calibrations around the nominal values.
pub fn sample_calibrations(
    chip: &ChipManifest,
    spread: &CalibrationSpread,
    seed: u64,
) -> ChipManifest {
    let mut out = chip.clone();
    let mut chip_rng = seeds::stream(seed, &["calibration", &chip.chip_id]);
    let z_chip: f64 = StandardNormal.sample(&mut chip_rng);
    for j in &mut out.junctions {
        let mut rng = seeds::stream(seed, &["calibration", &chip.chip_id, &j.junction_id]);
        let z_vp: f64 = StandardNormal.sample(&mut rng);
        let z_g: f64 = StandardNormal.sample(&mut rng);
        let nominal = JunctionCalibration::nominal(&j.geometry);
        let v_pinch = spread.v_pinch_mean
            + spread.v_pinch_slope_per_um * (j.geometry.l_j_um - REFERENCE_L_J_UM)
            + spread.v_pinch_sd * z_vp;
        j.calibration = JunctionCalibration {
            v_pinch_star: v_pinch.min(-0.05),
            g_series: nominal.g_series
                * (spread.g_series_chip_log_sd * z_chip + spread.g_series_junction_log_sd * z_g)
                    .exp(),
            ..j.calibration
        };
    }
    out
}

// ---------------------------------------------------------------------------
// Manifest file format

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MaterialRecord {
    pub n_s_per_m2: f64,
    #[serde(rename = "mu_e_m2_per_Vs")]
    pub mu_e_m2_per_vs: f64,
    pub m_star_ratio: f64,
}

impl From<&Material2DEG> for MaterialRecord {
    fn from(m: &Material2DEG) -> Self {
        MaterialRecord {
            n_s_per_m2: m.n_s,
            mu_e_m2_per_vs: m.mu_e,
            m_star_ratio: m.m_star_ratio,
        }
    }
}

impl MaterialRecord {
    pub fn to_material(&self) -> Result<Material2DEG> {
        Material2DEG::new(self.n_s_per_m2, self.mu_e_m2_per_vs, self.m_star_ratio)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CalibrationRecord {
    #[serde(rename = "v_pinch_star_V")]
    v_pinch_star_v: f64,
    #[serde(rename = "g_series_S")]
    g_series_s: f64,
    hysteresis_amp: f64,
    #[serde(rename = "smear_width_V")]
    smear_width_v: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct JunctionRecord {
    id: String,
    #[serde(rename = "L_c_nm")]
    l_c_nm: f64,
    #[serde(rename = "W_c_nm")]
    w_c_nm: f64,
    #[serde(rename = "L_J_um")]
    l_j_um: f64,
    #[serde(rename = "W_J_um")]
    w_j_um: f64,
    calibration: CalibrationRecord,
    failure: FailureMode,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct ManifestRecord {
    chip_id: String,
    #[serde(rename = "temperature_K")]
    temperature_k: f64,
    material: MaterialRecord,
    #[serde(default)]
    fabrication_notes: String,
    junctions: Vec<JunctionRecord>,
}

impl From<&ChipManifest> for ManifestRecord {
    fn from(c: &ChipManifest) -> Self {
        ManifestRecord {
            chip_id: c.chip_id.clone(),
            temperature_k: c.temperature,
            material: MaterialRecord::from(&c.material),
            fabrication_notes: c.fabrication_notes.clone(),
            junctions: c
                .junctions
                .iter()
                .map(|j| JunctionRecord {
                    id: j.junction_id.clone(),
                    l_c_nm: j.geometry.l_c_nm,
                    w_c_nm: j.geometry.w_c_nm,
                    l_j_um: j.geometry.l_j_um,
                    w_j_um: j.geometry.w_j_um,
                    calibration: CalibrationRecord {
                        v_pinch_star_v: j.calibration.v_pinch_star,
                        g_series_s: j.calibration.g_series,
                        hysteresis_amp: j.calibration.hysteresis_amp,
                        smear_width_v: j.calibration.smear_width,
                    },
                    failure: j.failure,
                })
                .collect(),
        }
    }
}

impl ManifestRecord {
    fn into_manifest(self) -> Result<ChipManifest> {
        let material = self.material.to_material()?;
        let chip = ChipManifest {
            chip_id: self.chip_id,
            temperature: self.temperature_k,
            material,
            fabrication_notes: self.fabrication_notes,
            junctions: self
                .junctions
                .into_iter()
                .map(|j| JunctionDevice {
                    junction_id: j.id,
                    geometry: JunctionGeometry {
                        l_c_nm: j.l_c_nm,
                        w_c_nm: j.w_c_nm,
                        l_j_um: j.l_j_um,
                        w_j_um: j.w_j_um,
                    },
                    calibration: JunctionCalibration {
                        v_pinch_star: j.calibration.v_pinch_star_v,
                        g_series: j.calibration.g_series_s,
                        hysteresis_amp: j.calibration.hysteresis_amp,
                        smear_width: j.calibration.smear_width_v,
                    },
                    failure: j.failure,
                })
                .collect(),
        };
        chip.validate()?;
        Ok(chip)
    }
}

/// Canonical JSON text of a manifest (fixed field order, shortest round-trip floats).
pub fn manifest_to_string(chip: &ChipManifest) -> Result<String> {
    if !chip
        .junctions
        .iter()
        .all(|j| j.calibration.g_series.is_finite())
    {
        return Err(Error::Validation(
            "g_series_S must be finite to be written to a manifest".into(),
        ));
    }
    let mut text = serde_json::to_string_pretty(&ManifestRecord::from(chip))
        .map_err(|e| Error::parse("manifest", e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Parses and validates manifest text. `context` names the source in errors.
pub fn manifest_from_str(text: &str, context: &str) -> Result<ChipManifest> {
    let record: ManifestRecord =
        serde_json::from_str(text).map_err(|e| Error::parse(context, e.to_string()))?;
    record.into_manifest()
}

pub fn load_manifest(path: &Path) -> Result<ChipManifest> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    manifest_from_str(&text, &path.display().to_string())
}

pub fn save_manifest(chip: &ChipManifest, path: &Path) -> Result<()> {
    chip.validate()?;
    let text = manifest_to_string(chip)?;
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Reads a standalone material file (the `material` object of a manifest).
pub fn load_material(path: &Path) -> Result<Material2DEG> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    let record: MaterialRecord = serde_json::from_str(&text)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    record.to_material()
}
