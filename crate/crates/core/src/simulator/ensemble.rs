//! Whole-array simulation: failures and calibration spread are sampled per
//! chip, then every junction is swept in both directions.

use std::collections::HashSet;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::chip::{
    default_chip, sample_calibrations, sample_failures, CalibrationSpread, ChipManifest,
    FailureConfig, CHIPS_PER_WAFER,
};
use crate::error::{Error, Result};
use crate::physics::Material2DEG;
use crate::seeds;
use crate::simulator::{run_sweep, SimulationConfig, SweepPair};

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleConfig {
    pub simulation: SimulationConfig,
    pub failures: FailureConfig,
    /// Device-to-device calibration variation; `None` keeps manifest values.
    pub calibration_spread: Option<CalibrationSpread>,
}

impl EnsembleConfig {
    /// Defaults with failures disabled.
    pub fn healthy() -> Self {
        EnsembleConfig {
            failures: FailureConfig::none(),
            ..Self::default()
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Ensemble {
    pub master_seed: u64,
    /// Chips as simulated, with sampled calibration and failures.
    pub chips: Vec<ChipManifest>,
    /// Sweep pairs in chip order, then junction order.
    pub sweeps: Vec<SweepPair>,
}

impl Ensemble {
    pub fn trace_count(&self) -> usize {
        self.sweeps
            .iter()
            .map(|p| 1 + usize::from(p.up.is_some()))
            .sum()
    }
}

/// `n_wafers × 9` default chips. Ids are `C1..C9` for a single wafer and
/// `W01-C1..` when there are several.
pub fn wafer_chips(n_wafers: usize, material: Material2DEG) -> Vec<ChipManifest> {
    let mut chips = Vec::with_capacity(n_wafers * CHIPS_PER_WAFER);
    for w in 1..=n_wafers {
        for c in 1..=CHIPS_PER_WAFER {
            let id = if n_wafers == 1 {
                format!("C{c}")
            } else {
                format!("W{w:02}-C{c}")
            };
            chips.push(default_chip(&id, material));
        }
    }
    chips
}

/// Seed of the sweep stream of one junction.
pub fn junction_seed(master_seed: u64, chip_id: &str, junction_id: &str) -> u64 {
    seeds::derive_seed(master_seed, &["sweep", chip_id, junction_id])
}

/// Simulates every junction of every chip. Junctions run in parallel on
/// independent streams; results come back in deterministic order.
pub fn run_ensemble(
    chips: &[ChipManifest],
    config: &EnsembleConfig,
    seed: u64,
) -> Result<Ensemble> {
    if chips.is_empty() {
        return Err(Error::Validation("ensemble needs at least one chip".into()));
    }
    config.simulation.validate()?;
    let mut ids = HashSet::new();
    for chip in chips {
        if !ids.insert(chip.chip_id.as_str()) {
            return Err(Error::Validation(format!(
                "duplicate chip id {}",
                chip.chip_id
            )));
        }
    }

    let prepared = chips
        .iter()
        .map(|chip| {
            let chip = match &config.calibration_spread {
                Some(spread) => sample_calibrations(chip, spread, seed),
                None => chip.clone(),
            };
            sample_failures(&chip, &config.failures, seed)
        })
        .collect::<Result<Vec<_>>>()?;

    let tasks: Vec<(usize, usize)> = prepared
        .iter()
        .enumerate()
        .flat_map(|(c, chip)| (0..chip.junctions.len()).map(move |j| (c, j)))
        .collect();
    let sweeps = tasks
        .par_iter()
        .map(|&(c, j)| {
            let chip = &prepared[c];
            let junction_id = &chip.junctions[j].junction_id;
            run_sweep(
                chip,
                junction_id,
                &config.simulation,
                junction_seed(seed, &chip.chip_id, junction_id),
            )
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(Ensemble {
        master_seed: seed,
        chips: prepared,
        sweeps,
    })
}
