//! Bidirectional gate sweeps through the shared gate pads of a chip.

use crate::chip::{address, ChipManifest, GateAddress};
use crate::error::Result;
use crate::seeds;
use crate::simulator::conductance::{DeviceModel, HysteresisState};
use crate::simulator::lockin::LockIn;
use crate::simulator::{Direction, SimulationConfig, SweepDirections, SweepSample, SweepTrace};

/// One write to the gate pads, as seen by the whole chip.
#[derive(Debug, Clone, PartialEq)]
pub struct GateLogEntry {
    pub selected_junction: String,
    pub v_gate_left: f64,
    pub v_gate_right: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SweepPair {
    pub down: SweepTrace,
    /// Absent for down-only protocols.
    pub up: Option<SweepTrace>,
}

/// Measurement session on one chip. The two gate pads are global state:
/// every junction sees the same voltages, and selecting a junction only
/// picks which source-drain pair is read out.
#[derive(Debug)]
pub struct SweepSession<'a> {
    chip: &'a ChipManifest,
    config: SimulationConfig,
    gate: Option<GateAddress>,
    heat: Vec<HysteresisState>,
    log: Vec<GateLogEntry>,
}

impl<'a> SweepSession<'a> {
    pub fn new(chip: &'a ChipManifest, config: SimulationConfig) -> Result<Self> {
        chip.validate()?;
        config.validate()?;
        Ok(SweepSession {
            chip,
            config,
            gate: None,
            heat: vec![HysteresisState::default(); chip.junctions.len()],
            log: Vec::new(),
        })
    }

    pub fn apply(&mut self, addr: GateAddress) {
        self.log.push(GateLogEntry {
            selected_junction: addr.selected_junction.clone(),
            v_gate_left: addr.v_gate_left,
            v_gate_right: addr.v_gate_right,
        });
        self.gate = Some(addr);
    }

    pub fn gate(&self) -> Option<&GateAddress> {
        self.gate.as_ref()
    }

    pub fn log(&self) -> &[GateLogEntry] {
        &self.log
    }

    /// Effective gate voltage sequence applied while `junction_id` was selected.
    pub fn gate_history(&self, junction_id: &str) -> Vec<f64> {
        self.log
            .iter()
            .filter(|e| e.selected_junction == junction_id)
            .map(|e| 0.5 * (e.v_gate_left + e.v_gate_right))
            .collect()
    }

    /// Noise-free conductance of `junction_id` at the current pad voltages.
    pub fn probe(&self, junction_id: &str) -> Result<f64> {
        let device = self.chip.junction(junction_id)?;
        let v_g = self
            .gate
            .as_ref()
            .map_or(0.0, GateAddress::effective_gate_voltage);
        let model = DeviceModel::new(
            device,
            &self.chip.material,
            self.chip.temperature,
            self.config.signatures,
        );
        Ok(model.with_failure(v_g))
    }

    /// Runs the protocol on one junction. Each direction draws its lock-in
    /// noise from its own stream keyed by `(seed, chip, junction, direction)`.
    pub fn sweep(&mut self, junction_id: &str, seed: u64) -> Result<SweepPair> {
        let index = self
            .chip
            .junctions
            .iter()
            .position(|j| j.junction_id == junction_id)
            .ok_or_else(|| crate::error::Error::UnknownJunction(junction_id.to_string()))?;
        let chip = self.chip;
        let device = &chip.junctions[index];
        let model = DeviceModel::new(
            device,
            &chip.material,
            chip.temperature,
            self.config.signatures,
        );
        let protocol = self.config.protocol;
        let grid = protocol.down_grid();

        self.heat[index] = HysteresisState::default();
        let down =
            self.run_direction(index, &model, Direction::Down, grid.iter().copied(), seed)?;
        let up = match protocol.directions {
            SweepDirections::DownThenUp => Some(self.run_direction(
                index,
                &model,
                Direction::Up,
                grid.iter().rev().copied(),
                seed,
            )?),
            SweepDirections::DownOnly => None,
        };
        Ok(SweepPair { down, up })
    }

    fn run_direction(
        &mut self,
        index: usize,
        model: &DeviceModel<'_>,
        direction: Direction,
        voltages: impl Iterator<Item = f64>,
        seed: u64,
    ) -> Result<SweepTrace> {
        let chip = self.chip;
        let junction_id = &chip.junctions[index].junction_id;
        let mut lockin = LockIn::new(&self.config.protocol, self.config.noise)?;
        let mut rng = seeds::stream(
            seed,
            &["lockin", &chip.chip_id, junction_id, direction.as_str()],
        );
        let mut samples = Vec::new();
        for v_g in voltages {
            self.apply(address(chip, junction_id, v_g, v_g)?);
            let v_eff = self
                .gate
                .as_ref()
                .map_or(v_g, GateAddress::effective_gate_voltage);
            let (g_true, state) = model.hysteretic(
                v_eff,
                direction,
                self.heat[index],
                self.config.protocol.v_ac,
            );
            self.heat[index] = state;
            let g_raw = lockin.measure(g_true, &mut rng);
            samples.push(SweepSample {
                v_g: v_eff,
                g_meas: g_raw.max(0.0),
                g_raw,
            });
        }
        let mut trace = SweepTrace::new(
            chip.chip_id.clone(),
            junction_id.clone(),
            direction,
            samples,
        )?;
        trace.seed = Some(seed);
        trace.protocol = Some(self.config.protocol);
        Ok(trace)
    }
}

/// Sweeps one junction down and back up.
pub fn run_sweep(
    chip: &ChipManifest,
    junction_id: &str,
    config: &SimulationConfig,
    seed: u64,
) -> Result<SweepPair> {
    SweepSession::new(chip, *config)?.sweep(junction_id, seed)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chip::{default_chip, FailureMode};
    use crate::physics::Material2DEG;
    use crate::simulator::{NoiseConfig, SweepProtocol};

    fn chip() -> ChipManifest {
        default_chip("C1", Material2DEG::dark())
    }

    #[test]
    fn default_protocol_sample_counts() {
        let pair = run_sweep(&chip(), "J4", &SimulationConfig::default(), 1).unwrap();
        assert_eq!(pair.down.samples.len(), 201);
        let up = pair.up.unwrap();
        assert_eq!(up.samples.len(), 201);
        assert_eq!(up.samples[0].v_g, pair.down.samples[200].v_g);
    }

    #[test]
    fn down_only_protocol() {
        let config = SimulationConfig {
            protocol: SweepProtocol {
                directions: SweepDirections::DownOnly,
                ..Default::default()
            },
            ..Default::default()
        };
        let pair = run_sweep(&chip(), "J1", &config, 1).unwrap();
        assert!(pair.up.is_none());
    }

    #[test]
    fn seed_repeat_is_bit_identical() {
        let a = run_sweep(&chip(), "J2", &SimulationConfig::default(), 99).unwrap();
        let b = run_sweep(&chip(), "J2", &SimulationConfig::default(), 99).unwrap();
        assert_eq!(a, b);
        let c = run_sweep(&chip(), "J2", &SimulationConfig::default(), 100).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn noise_free_sweep_is_monotone() {
        let pair = run_sweep(&chip(), "J4", &SimulationConfig::noise_free(), 1).unwrap();
        for w in pair.down.samples.windows(2) {
            assert!(w[1].g_meas <= w[0].g_meas);
        }
    }

    #[test]
    fn noisy_sweep_violations_are_noise_bounded() {
        let config = SimulationConfig::default();
        let sigma = config.noise.white_estimator_sd(&config.protocol);
        let pair = run_sweep(&chip(), "J4", &config, 5).unwrap();
        for w in pair.down.samples.windows(2) {
            // the true curve never rises, so any rise is the difference of two noisy readings
            assert!(w[1].g_raw - w[0].g_raw <= 5.0 * sigma * 2f64.sqrt());
        }
    }

    #[test]
    fn global_gates_are_shared() {
        let c = chip();
        let mut session = SweepSession::new(&c, SimulationConfig::noise_free()).unwrap();
        session.apply(address(&c, "J3", -0.5, -0.5).unwrap());
        let g3 = session.probe("J3").unwrap();
        let g5 = session.probe("J5").unwrap();
        let model5 = DeviceModel::new(
            c.junction("J5").unwrap(),
            &c.material,
            c.temperature,
            Default::default(),
        );
        assert_eq!(g5, model5.with_failure(-0.5));
        assert!(g3 > g5, "J3 is wider than J5");

        session.sweep("J3", 1).unwrap();
        session.sweep("J5", 1).unwrap();
        let h3 = session.gate_history("J3");
        assert_eq!(h3.len(), 1 + 402);
        assert_eq!(h3[1..], session.gate_history("J5")[..]);
    }

    #[test]
    fn open_contact_reads_zero_without_noise() {
        let mut c = chip();
        c.junctions[0].failure = FailureMode::OpenContact;
        let pair = run_sweep(&c, "J1", &SimulationConfig::noise_free(), 1).unwrap();
        assert!(pair.down.samples.iter().all(|s| s.g_meas == 0.0));
    }

    #[test]
    fn unknown_junction_is_an_error() {
        assert!(run_sweep(&chip(), "J9", &SimulationConfig::default(), 1).is_err());
        let noisy = SimulationConfig {
            noise: NoiseConfig::default(),
            ..Default::default()
        };
        assert!(run_sweep(&chip(), "J1", &noisy, 1).is_ok());
    }
}
