//! Trace files: one CSV per (junction, direction) plus a JSON sidecar with
//! the protocol, seeds and device description.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::chip::{manifest_to_string, FailureMode, JunctionDevice, JunctionGeometry};
use crate::error::{Error, Result};
use crate::simulator::ensemble::{Ensemble, EnsembleConfig};
use crate::simulator::{
    Direction, NoiseConfig, SignatureConfig, SweepProtocol, SweepSample, SweepTrace,
};

pub const TRACE_HEADER: &str = "chip_id,junction_id,direction,v_g_volts,g_siemens,g_raw_siemens";
pub const INDEX_FILE: &str = "index.json";
pub const MANIFEST_DIR: &str = "manifests";

/// Formats like C's `%.9e`: ten significant digits, signed exponent of at
/// least two digits.
pub fn format_sci(x: f64) -> String {
    let s = format!("{x:.9e}");
    match s.split_once('e') {
        Some((mantissa, exp)) => {
            let exp: i32 = exp.parse().unwrap_or(0);
            let sign = if exp < 0 { '-' } else { '+' };
            format!("{mantissa}e{sign}{:02}", exp.abs())
        }
        None => s,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeometryRecord {
    #[serde(rename = "L_c_nm")]
    pub l_c_nm: f64,
    #[serde(rename = "W_c_nm")]
    pub w_c_nm: f64,
    #[serde(rename = "L_J_um")]
    pub l_j_um: f64,
    #[serde(rename = "W_J_um")]
    pub w_j_um: f64,
}

impl From<&JunctionGeometry> for GeometryRecord {
    fn from(g: &JunctionGeometry) -> Self {
        GeometryRecord {
            l_c_nm: g.l_c_nm,
            w_c_nm: g.w_c_nm,
            l_j_um: g.l_j_um,
            w_j_um: g.w_j_um,
        }
    }
}

/// Simulation inputs of the device, recorded for later comparison with
/// extracted metrics. Analysis never reads it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroundTruth {
    #[serde(rename = "v_pinch_star_V")]
    pub v_pinch_star: f64,
    #[serde(rename = "g_series_S")]
    pub g_series: f64,
    pub hysteresis_amp: f64,
    #[serde(rename = "smear_width_V")]
    pub smear_width: f64,
    pub failure: FailureMode,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TraceMetadata {
    pub chip_id: String,
    pub junction_id: String,
    pub direction: Direction,
    pub master_seed: Option<u64>,
    pub junction_seed: Option<u64>,
    #[serde(rename = "temperature_K")]
    pub temperature: f64,
    pub geometry: GeometryRecord,
    pub protocol: SweepProtocol,
    pub noise: NoiseConfig,
    pub signatures: SignatureConfig,
    pub ground_truth: GroundTruth,
}

impl TraceMetadata {
    pub fn for_device(
        trace: &SweepTrace,
        device: &JunctionDevice,
        temperature: f64,
        protocol: SweepProtocol,
        noise: NoiseConfig,
        signatures: SignatureConfig,
        master_seed: Option<u64>,
    ) -> Self {
        TraceMetadata {
            chip_id: trace.chip_id.clone(),
            junction_id: trace.junction_id.clone(),
            direction: trace.direction,
            master_seed,
            junction_seed: trace.seed,
            temperature,
            geometry: GeometryRecord::from(&device.geometry),
            protocol,
            noise,
            signatures,
            ground_truth: GroundTruth {
                v_pinch_star: device.calibration.v_pinch_star,
                g_series: device.calibration.g_series,
                hysteresis_amp: device.calibration.hysteresis_amp,
                smear_width: device.calibration.smear_width,
                failure: device.failure,
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct IndexEntry {
    pub chip_id: String,
    pub junction_id: String,
    pub direction: Direction,
    pub csv: String,
    pub metadata: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct EnsembleIndex {
    pub master_seed: u64,
    pub config: EnsembleConfig,
    pub chips: Vec<String>,
    pub traces: Vec<IndexEntry>,
}

/// Base file name shared by a trace and its sidecar.
pub fn trace_stem(chip_id: &str, junction_id: &str, direction: Direction) -> String {
    format!("{chip_id}_{junction_id}_{}", direction.as_str())
}

pub fn trace_to_csv(trace: &SweepTrace) -> String {
    let mut out = String::with_capacity(64 * (trace.samples.len() + 1));
    out.push_str(TRACE_HEADER);
    out.push('\n');
    for s in &trace.samples {
        out.push_str(&format!(
            "{},{},{},{},{},{}\n",
            trace.chip_id,
            trace.junction_id,
            trace.direction.as_str(),
            format_sci(s.v_g),
            format_sci(s.g_meas),
            format_sci(s.g_raw)
        ));
    }
    out
}

pub fn write_trace_csv(trace: &SweepTrace, path: &Path) -> Result<()> {
    fs::write(path, trace_to_csv(trace)).map_err(|e| Error::io(path, e))
}

/// Parses trace CSV text. `context` names the source in errors.
pub fn trace_from_csv(text: &str, context: &str) -> Result<SweepTrace> {
    let mut reader = csv::ReaderBuilder::new()
        .has_headers(true)
        .from_reader(text.as_bytes());
    let header = reader
        .headers()
        .map_err(|e| Error::parse(context, e.to_string()))?
        .iter()
        .collect::<Vec<_>>()
        .join(",");
    if header != TRACE_HEADER {
        return Err(Error::parse(
            context,
            format!("expected header `{TRACE_HEADER}`, found `{header}`"),
        ));
    }
    let mut ids: Option<(String, String, Direction)> = None;
    let mut samples = Vec::new();
    for (i, record) in reader.records().enumerate() {
        let line = i + 2;
        let record = record.map_err(|e| Error::parse(context, format!("line {line}: {e}")))?;
        if record.len() != 6 {
            return Err(Error::parse(
                context,
                format!("line {line}: expected 6 fields, found {}", record.len()),
            ));
        }
        let direction = Direction::parse(&record[2])
            .map_err(|e| Error::parse(context, format!("line {line}: {e}")))?;
        let row_ids = (record[0].to_string(), record[1].to_string(), direction);
        match &ids {
            None => ids = Some(row_ids),
            Some(first) if *first != row_ids => {
                return Err(Error::parse(
                    context,
                    format!("line {line}: chip/junction/direction differ from the first row"),
                ))
            }
            Some(_) => {}
        }
        let num = |k: usize, name: &str| -> Result<f64> {
            let v: f64 = record[k].trim().parse().map_err(|_| {
                Error::parse(
                    context,
                    format!("line {line}: field {name}: not a number `{}`", &record[k]),
                )
            })?;
            if !v.is_finite() {
                return Err(Error::parse(
                    context,
                    format!("line {line}: field {name} is not finite"),
                ));
            }
            Ok(v)
        };
        samples.push(SweepSample {
            v_g: num(3, "v_g_volts")?,
            g_meas: num(4, "g_siemens")?,
            g_raw: num(5, "g_raw_siemens")?,
        });
    }
    let (chip_id, junction_id, direction) =
        ids.ok_or_else(|| Error::parse(context, "no samples"))?;
    SweepTrace::new(chip_id, junction_id, direction, samples)
        .map_err(|e| Error::parse(context, e.to_string()))
}

pub fn read_trace_csv(path: &Path) -> Result<SweepTrace> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    trace_from_csv(&text, &path.display().to_string())
}

pub fn read_metadata(path: &Path) -> Result<TraceMetadata> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

fn write_json<T: Serialize>(value: &T, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(value)
        .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))?;
    text.push('\n');
    fs::write(path, text).map_err(|e| Error::io(path, e))
}

/// Writes every trace of an ensemble with its sidecar, the simulated chip
/// manifests and an index. Returns the trace CSV paths in acquisition order.
pub fn write_ensemble(
    ensemble: &Ensemble,
    config: &EnsembleConfig,
    dir: &Path,
) -> Result<Vec<PathBuf>> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))?;
    let manifests = dir.join(MANIFEST_DIR);
    fs::create_dir_all(&manifests).map_err(|e| Error::io(&manifests, e))?;
    for chip in &ensemble.chips {
        let path = manifests.join(format!("{}.json", chip.chip_id));
        let mut file = fs::File::create(&path).map_err(|e| Error::io(&path, e))?;
        file.write_all(manifest_to_string(chip)?.as_bytes())
            .map_err(|e| Error::io(&path, e))?;
    }

    let sim = &config.simulation;
    let mut written = Vec::new();
    let mut entries = Vec::new();
    for pair in &ensemble.sweeps {
        for trace in std::iter::once(&pair.down).chain(pair.up.as_ref()) {
            let chip = ensemble
                .chips
                .iter()
                .find(|c| c.chip_id == trace.chip_id)
                .ok_or_else(|| Error::UnknownJunction(trace.chip_id.clone()))?;
            let device = chip.junction(&trace.junction_id)?;
            let stem = trace_stem(&trace.chip_id, &trace.junction_id, trace.direction);
            let csv_path = dir.join(format!("{stem}.csv"));
            let meta_path = dir.join(format!("{stem}.json"));
            write_trace_csv(trace, &csv_path)?;
            let meta = TraceMetadata::for_device(
                trace,
                device,
                chip.temperature,
                sim.protocol,
                sim.noise,
                sim.signatures,
                Some(ensemble.master_seed),
            );
            write_json(&meta, &meta_path)?;
            entries.push(IndexEntry {
                chip_id: trace.chip_id.clone(),
                junction_id: trace.junction_id.clone(),
                direction: trace.direction,
                csv: format!("{stem}.csv"),
                metadata: format!("{stem}.json"),
            });
            written.push(csv_path);
        }
    }
    let index = EnsembleIndex {
        master_seed: ensemble.master_seed,
        config: config.clone(),
        chips: ensemble.chips.iter().map(|c| c.chip_id.clone()).collect(),
        traces: entries,
    };
    write_json(&index, &dir.join(INDEX_FILE))?;
    Ok(written)
}

/// A trace read back from disk, with its sidecar when one exists.
#[derive(Debug, Clone)]
pub struct LoadedTrace {
    pub path: PathBuf,
    pub trace: SweepTrace,
    pub metadata: Option<TraceMetadata>,
}

/// A file that could not be read as a trace.
#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub path: PathBuf,
    pub message: String,
}

/// Reads every `*.csv` directly inside `dir`, in file-name order.
/// Malformed files are reported and skipped.
pub fn read_trace_dir(dir: &Path) -> Result<(Vec<LoadedTrace>, Vec<Diagnostic>)> {
    let entries = fs::read_dir(dir).map_err(|e| Error::io(dir, e))?;
    let mut paths = Vec::new();
    for entry in entries {
        let entry = entry.map_err(|e| Error::io(dir, e))?;
        let path = entry.path();
        if path.is_file() && path.extension().is_some_and(|e| e == "csv") {
            paths.push(path);
        }
    }
    paths.sort();
    let mut traces = Vec::new();
    let mut diagnostics = Vec::new();
    for path in paths {
        match read_trace_csv(&path) {
            Ok(trace) => {
                let meta_path = path.with_extension("json");
                let metadata = if meta_path.exists() {
                    match read_metadata(&meta_path) {
                        Ok(m) => Some(m),
                        Err(e) => {
                            diagnostics.push(Diagnostic {
                                path: meta_path,
                                message: e.to_string(),
                            });
                            None
                        }
                    }
                } else {
                    None
                };
                traces.push(LoadedTrace {
                    path,
                    trace,
                    metadata,
                });
            }
            Err(e) => diagnostics.push(Diagnostic {
                path,
                message: e.to_string(),
            }),
        }
    }
    Ok((traces, diagnostics))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::chip::default_chip;
    use crate::physics::Material2DEG;
    use crate::simulator::{run_sweep, SimulationConfig};

    #[test]
    fn sci_format_matches_printf() {
        assert_eq!(format_sci(0.0), "0.000000000e+00");
        assert_eq!(format_sci(-0.005), "-5.000000000e-03");
        assert_eq!(format_sci(2.3e-4), "2.300000000e-04");
        assert_eq!(format_sci(1.0), "1.000000000e+00");
        assert_eq!(format_sci(123456.0), "1.234560000e+05");
        assert_eq!(format_sci(1e-100), "1.000000000e-100");
    }

    #[test]
    fn csv_round_trip_preserves_ten_digits() {
        let chip = default_chip("C1", Material2DEG::dark());
        let trace = run_sweep(&chip, "J4", &SimulationConfig::default(), 3)
            .unwrap()
            .down;
        let text = trace_to_csv(&trace);
        assert!(text.starts_with(TRACE_HEADER));
        assert_eq!(text.lines().count(), 202);
        let back = trace_from_csv(&text, "mem").unwrap();
        assert_eq!(back.chip_id, "C1");
        assert_eq!(back.direction, Direction::Down);
        for (a, b) in trace.samples.iter().zip(&back.samples) {
            assert!((a.v_g - b.v_g).abs() <= 1e-9 * a.v_g.abs().max(1e-3));
            assert!((a.g_raw - b.g_raw).abs() <= 1e-9 * a.g_raw.abs());
        }
        assert_eq!(trace_to_csv(&back), text);
    }

    #[test]
    fn malformed_csv_reports_line() {
        let bad = format!("{TRACE_HEADER}\nC1,J1,down,0.0,1e-4,1e-4\nC1,J1,down,abc,1e-4,1e-4\n");
        let err = trace_from_csv(&bad, "t.csv").unwrap_err().to_string();
        assert!(err.contains("line 3") && err.contains("v_g_volts"), "{err}");
        let wrong_header = "a,b,c\n1,2,3\n";
        assert!(trace_from_csv(wrong_header, "t.csv").is_err());
        let mixed =
            format!("{TRACE_HEADER}\nC1,J1,down,0.0,1e-4,1e-4\nC1,J2,down,-0.1,1e-4,1e-4\n");
        assert!(trace_from_csv(&mixed, "t.csv").is_err());
        let sideways = format!("{TRACE_HEADER}\nC1,J1,sideways,0.0,1e-4,1e-4\n");
        assert!(trace_from_csv(&sideways, "t.csv").is_err());
    }
}
