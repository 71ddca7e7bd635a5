//! The `nanoswitch` command line.
//!
//! Exit codes: 0 success, 2 invalid input or configuration, 3 filesystem
//! failure. Settings resolve as flag, then run-config file, then the
//! `NANOSWITCH_OUT_DIR` environment variable (output directory only), then
//! built-in defaults.

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::analysis::report::{
    build_report, devices_from_traces, metrics_csv, plot_files, report_from_str, report_to_string,
    MetricsReport,
};
use crate::analysis::{AnalysisConfig, PinchCombine};
use crate::chip::{
    default_chip, load_manifest, load_material, manifest_to_string, CalibrationSpread,
    ChipManifest, FailureConfig,
};
use crate::error::{Error, Result};
use crate::physics::{
    classify_regime, max_modes, Material2DEG, TransportQuantities, DEFAULT_BALLISTIC_FACTOR,
    DEFAULT_TEMPERATURE, E_CHARGE,
};
use crate::simulator::io::{read_trace_dir, write_ensemble};
use crate::simulator::{
    run_ensemble, wafer_chips, EnsembleConfig, NoiseConfig, SignatureConfig, SimulationConfig,
    SweepProtocol,
};

pub const OUT_DIR_ENV: &str = "NANOSWITCH_OUT_DIR";
pub const DEFAULT_SEED: u64 = 1;
pub const DEFAULT_OUT_DIR: &str = "nanoswitch-out";
pub const EXIT_OK: i32 = 0;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_IO: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "nanoswitch",
    version,
    about = "Split-gate switch array simulation and analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Print derived transport quantities, mode counts and regime flags.
    Physics(PhysicsArgs),
    /// Write a chip manifest with the designed geometry and nominal calibration.
    ChipNew(ChipNewArgs),
    /// Simulate gate sweeps and write trace files.
    Simulate(SimulateArgs),
    /// Extract metrics from a trace directory or a device/metrics file.
    Analyze(AnalyzeArgs),
    /// Turn a metrics report into plot-ready CSV files.
    Report(ReportArgs),
}

#[derive(Debug, Args)]
struct PhysicsArgs {
    /// Material JSON (`n_s_per_m2`, `mu_e_m2_per_Vs`, `m_star_ratio`); dark wafer values if omitted.
    #[arg(long)]
    material: Option<PathBuf>,
    /// Temperature (K).
    #[arg(long, default_value_t = DEFAULT_TEMPERATURE)]
    temperature: f64,
    /// Ballistic when `l_e >= factor · L`.
    #[arg(long, default_value_t = DEFAULT_BALLISTIC_FACTOR)]
    ballistic_factor: f64,
}

#[derive(Debug, Args)]
struct ChipNewArgs {
    #[arg(long, default_value = "C1")]
    id: String,
    #[arg(long)]
    material: Option<PathBuf>,
    #[arg(long, default_value_t = DEFAULT_TEMPERATURE)]
    temperature: f64,
    #[arg(long)]
    notes: Option<String>,
    /// Manifest path; standard output if omitted.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct SimulateArgs {
    /// Run-config JSON; flags override its fields.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Chip manifests to simulate; repeatable. Replaces generated chips.
    #[arg(long = "manifest")]
    manifests: Vec<PathBuf>,
    /// Generate this many nine-chip wafers.
    #[arg(long, conflicts_with = "chips")]
    wafers: Option<usize>,
    /// Generate this many chips `C1..`.
    #[arg(long)]
    chips: Option<usize>,
    #[arg(long)]
    material: Option<PathBuf>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    no_noise: bool,
    /// Disable sampled failures.
    #[arg(long)]
    no_failures: bool,
    /// Failure probabilities JSON.
    #[arg(long)]
    failure_config: Option<PathBuf>,
    /// Keep nominal calibrations on generated chips.
    #[arg(long)]
    no_spread: bool,
    /// Gate step (V).
    #[arg(long)]
    v_step: Option<f64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AnalyzeArgs {
    /// Trace directory, or a metrics/device JSON file.
    input: PathBuf,
    /// Defaults to `<input dir>/analysis`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Analysis settings JSON.
    #[arg(long)]
    config: Option<PathBuf>,
    /// How the device pinch-off voltage combines the two sweeps.
    #[arg(long, value_parser = ["average", "down", "up"])]
    combine: Option<String>,
}

#[derive(Debug, Args)]
struct ReportArgs {
    /// Metrics report JSON written by `analyze`.
    metrics: PathBuf,
    /// Defaults to `<metrics dir>/plots`.
    #[arg(long)]
    out: Option<PathBuf>,
}

/// File form of the `simulate` settings. Every field is optional.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub seed: Option<u64>,
    pub out_dir: Option<PathBuf>,
    pub wafers: Option<usize>,
    pub chips: Option<usize>,
    #[serde(default)]
    pub manifests: Vec<PathBuf>,
    pub material: Option<PathBuf>,
    pub protocol: Option<SweepProtocol>,
    pub noise: Option<NoiseConfig>,
    pub signatures: Option<SignatureConfig>,
    pub failures_enabled: Option<bool>,
    pub failure_config: Option<PathBuf>,
    pub spread_enabled: Option<bool>,
    pub calibration_spread: Option<CalibrationSpread>,
}

impl RunConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        serde_json::from_str(&text)
            .map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
    }
}

fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T> {
    let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    serde_json::from_str(&text).map_err(|e| Error::parse(path.display().to_string(), e.to_string()))
}

fn write_file(path: &Path, contents: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).map_err(|e| Error::io(parent, e))?;
    }
    fs::write(path, contents).map_err(|e| Error::io(path, e))
}

fn env_out_dir() -> Option<PathBuf> {
    std::env::var_os(OUT_DIR_ENV)
        .filter(|v| !v.is_empty())
        .map(PathBuf::from)
}

fn material_or_dark(path: Option<&Path>) -> Result<Material2DEG> {
    path.map_or(Ok(Material2DEG::dark()), load_material)
}

fn cmd_physics(args: &PhysicsArgs, out: &mut dyn Write) -> Result<()> {
    let material = material_or_dark(args.material.as_deref())?;
    let q = TransportQuantities::derive(&material, args.temperature)?;
    let mut lines = vec![
        format!("n_s_per_m2={}", material.n_s),
        format!("mu_e_m2_per_Vs={}", material.mu_e),
        format!("m_star_ratio={}", material.m_star_ratio),
        format!("temperature_K={}", q.temperature),
        format!("k_F_per_m={:.6e}", q.k_f),
        format!("v_F_m_per_s={:.6e}", q.v_f),
        format!("E_F_J={:.6e}", q.e_f),
        format!("E_F_meV={:.4}", q.e_f / E_CHARGE * 1e3),
        format!("l_e_um={:.4}", q.l_e * 1e6),
        format!("zeta_N_nm={:.2}", q.zeta_n * 1e9),
        format!("clean_limit={}", q.l_e > q.zeta_n),
    ];
    let chip = default_chip("C1", material);
    let mut widths: Vec<f64> = chip.junctions.iter().map(|j| j.geometry.w_c_nm).collect();
    widths.dedup();
    for w in widths {
        lines.push(format!(
            "max_modes_W_c_{w}nm={}",
            max_modes(q.k_f, w * 1e-9)
        ));
    }
    let mut seen = Vec::new();
    for j in &chip.junctions {
        let g = j.geometry;
        for (label, len) in [
            (format!("L_c_{}nm", g.l_c_nm), g.l_c()),
            (format!("L_J_{}um", g.l_j_um), g.l_j()),
        ] {
            if seen.contains(&label) {
                continue;
            }
            let r = classify_regime(q.l_e, q.zeta_n, len, args.ballistic_factor)?;
            lines.push(format!("ballistic_{label}={}", r.is_ballistic));
            seen.push(label);
        }
    }
    for line in lines {
        writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}

fn cmd_chip_new(args: &ChipNewArgs, out: &mut dyn Write) -> Result<()> {
    let mut chip = default_chip(&args.id, material_or_dark(args.material.as_deref())?);
    chip.temperature = args.temperature;
    if let Some(notes) = &args.notes {
        chip.fabrication_notes = notes.clone();
    }
    chip.validate()?;
    let text = manifest_to_string(&chip)?;
    match &args.out {
        Some(path) => {
            write_file(path, &text)?;
            writeln!(out, "manifest={}", path.display()).map_err(|e| Error::io("<stdout>", e))
        }
        None => out
            .write_all(text.as_bytes())
            .map_err(|e| Error::io("<stdout>", e)),
    }
}

/// Resolved `simulate` inputs.
struct SimulatePlan {
    chips: Vec<ChipManifest>,
    config: EnsembleConfig,
    seed: u64,
    out_dir: PathBuf,
}

fn plan_simulation(args: &SimulateArgs) -> Result<SimulatePlan> {
    let file = match &args.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    let material_path = args.material.clone().or(file.material.clone());
    let manifests = if args.manifests.is_empty() {
        file.manifests.clone()
    } else {
        args.manifests.clone()
    };
    let from_manifests = !manifests.is_empty();
    let chips = if from_manifests {
        manifests
            .iter()
            .map(|p| load_manifest(p))
            .collect::<Result<Vec<_>>>()?
    } else {
        let material = material_or_dark(material_path.as_deref())?;
        let (wafers, chips) = match (args.wafers, args.chips) {
            (Some(w), _) => (Some(w), None),
            (_, Some(c)) => (None, Some(c)),
            _ => (file.wafers, file.chips),
        };
        match (wafers, chips) {
            (Some(0), _) | (_, Some(0)) => {
                return Err(Error::Validation("chip count must be positive".into()))
            }
            (Some(w), _) => wafer_chips(w, material),
            (None, Some(c)) => (1..=c)
                .map(|i| default_chip(&format!("C{i}"), material))
                .collect(),
            (None, None) => vec![default_chip("C1", material)],
        }
    };

    let mut protocol = file.protocol.unwrap_or_default();
    if let Some(step) = args.v_step {
        protocol.v_step = step;
    }
    let mut noise = file.noise.unwrap_or_default();
    if args.no_noise {
        noise = NoiseConfig::off();
    }
    let failures_enabled = !args.no_failures && file.failures_enabled.unwrap_or(true);
    let failures = if !failures_enabled {
        FailureConfig::none()
    } else if let Some(path) = args
        .failure_config
        .as_ref()
        .or(file.failure_config.as_ref())
    {
        FailureConfig::load(path)?
    } else {
        FailureConfig::default()
    };
    // manifests carry their own calibration; generated chips get the spread
    let spread_enabled = !args.no_spread && file.spread_enabled.unwrap_or(!from_manifests);
    let calibration_spread = spread_enabled.then(|| file.calibration_spread.unwrap_or_default());

    let config = EnsembleConfig {
        simulation: SimulationConfig {
            protocol,
            noise,
            signatures: file.signatures.unwrap_or_default(),
        },
        failures,
        calibration_spread,
    };
    config.simulation.validate()?;
    config.failures.validate()?;
    let out_dir = args
        .out
        .clone()
        .or(file.out_dir.clone())
        .or_else(env_out_dir)
        .unwrap_or_else(|| PathBuf::from(DEFAULT_OUT_DIR));
    Ok(SimulatePlan {
        chips,
        config,
        seed: args.seed.or(file.seed).unwrap_or(DEFAULT_SEED),
        out_dir,
    })
}

fn cmd_simulate(args: &SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let plan = plan_simulation(args)?;
    let ensemble = run_ensemble(&plan.chips, &plan.config, plan.seed)?;
    let written = write_ensemble(&ensemble, &plan.config, &plan.out_dir)?;
    writeln!(out, "seed={}", plan.seed).map_err(|e| Error::io("<stdout>", e))?;
    writeln!(out, "chips={}", ensemble.chips.len()).map_err(|e| Error::io("<stdout>", e))?;
    writeln!(out, "traces={}", written.len()).map_err(|e| Error::io("<stdout>", e))?;
    writeln!(out, "out_dir={}", plan.out_dir.display()).map_err(|e| Error::io("<stdout>", e))
}

fn summary_lines(report: &MetricsReport) -> Vec<String> {
    let total = &report.yields.by_chip.total;
    let mut lines = vec![
        format!("devices={}", report.devices.len()),
        format!("measured={}", total.measured_count),
        format!("switching={}", total.switching_count),
        format!("yield_percent={}", total.display),
    ];
    if let Some(s) = report
        .box_stats
        .iter()
        .find(|g| g.group == "all" && g.metric == "v_pinch_down")
    {
        lines.push(format!("mean_v_pinch_down_V={:.4}", s.stats.mean));
    }
    for c in &report.correlations {
        if let Some(r) = c.result {
            lines.push(format!("r_v_pinch_vs_{}={:.4}", c.x, r.pearson_r));
        }
    }
    lines.push(format!("diagnostics={}", report.diagnostics.len()));
    lines
}

/// Exit status of `analyze` when the report was written but some inputs were bad.
struct PartialFailure;

fn cmd_analyze(
    args: &AnalyzeArgs,
    out: &mut dyn Write,
    err: &mut dyn Write,
) -> Result<Option<PartialFailure>> {
    let mut config = match &args.config {
        Some(path) => read_json::<AnalysisConfig>(path)?,
        None => AnalysisConfig::default(),
    };
    if let Some(c) = &args.combine {
        config.combine = match c.as_str() {
            "down" => PinchCombine::Down,
            "up" => PinchCombine::Up,
            _ => PinchCombine::Average,
        };
    }
    config.validate()?;

    let input = &args.input;
    let meta = fs::metadata(input).map_err(|e| Error::io(input, e))?;
    let (report, default_out) = if meta.is_dir() {
        let (traces, mut diagnostics) = read_trace_dir(input)?;
        if traces.is_empty() && diagnostics.is_empty() {
            return Err(Error::Validation(format!(
                "no trace files in {}",
                input.display()
            )));
        }
        let (devices, more) = devices_from_traces(&traces, &config);
        diagnostics.extend(more);
        (
            build_report(devices, &config, &diagnostics)?,
            input.join("analysis"),
        )
    } else {
        let text = fs::read_to_string(input).map_err(|e| Error::io(input, e))?;
        let report = report_from_str(&text, &input.display().to_string(), &config)?;
        let parent = input.parent().unwrap_or(Path::new("."));
        (report, parent.join("analysis"))
    };
    let out_dir = args.out.clone().or_else(env_out_dir).unwrap_or(default_out);
    write_file(&out_dir.join("metrics.json"), &report_to_string(&report)?)?;
    write_file(&out_dir.join("metrics.csv"), &metrics_csv(&report))?;
    for line in summary_lines(&report) {
        writeln!(out, "{line}").map_err(|e| Error::io("<stdout>", e))?;
    }
    writeln!(out, "out_dir={}", out_dir.display()).map_err(|e| Error::io("<stdout>", e))?;
    for d in &report.diagnostics {
        writeln!(err, "malformed {}: {}", d.path, d.message)
            .map_err(|e| Error::io("<stderr>", e))?;
    }
    Ok((!report.diagnostics.is_empty()).then_some(PartialFailure))
}

fn cmd_report(args: &ReportArgs, out: &mut dyn Write) -> Result<()> {
    let text = fs::read_to_string(&args.metrics).map_err(|e| Error::io(&args.metrics, e))?;
    let context = args.metrics.display().to_string();
    let value: serde_json::Value =
        serde_json::from_str(&text).map_err(|e| Error::parse(&context, e.to_string()))?;
    if value.get("format").is_none() {
        return Err(Error::parse(
            &context,
            "not a metrics report (missing `format`)",
        ));
    }
    let report = report_from_str(&text, &context, &AnalysisConfig::default())?;
    let default_out = args
        .metrics
        .parent()
        .unwrap_or(Path::new("."))
        .join("plots");
    let out_dir = args.out.clone().or_else(env_out_dir).unwrap_or(default_out);
    for (name, contents) in plot_files(&report) {
        let path = out_dir.join(&name);
        write_file(&path, &contents)?;
        writeln!(out, "wrote={}", path.display()).map_err(|e| Error::io("<stdout>", e))?;
    }
    Ok(())
}

fn exit_code(e: &Error) -> i32 {
    if e.is_io() {
        EXIT_IO
    } else {
        EXIT_INPUT
    }
}

/// Runs the CLI on explicit arguments (the first is the program name) and
/// returns the process exit code.
pub fn run_with<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = write!(err, "{}", e.render());
            return e.exit_code();
        }
    };
    let result = match &cli.command {
        Command::Physics(a) => cmd_physics(a, out),
        Command::ChipNew(a) => cmd_chip_new(a, out),
        Command::Simulate(a) => cmd_simulate(a, out),
        Command::Analyze(a) => match cmd_analyze(a, out, err) {
            Ok(Some(PartialFailure)) => return EXIT_INPUT,
            Ok(None) => Ok(()),
            Err(e) => Err(e),
        },
        Command::Report(a) => cmd_report(a, out),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run() -> i32 {
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_with(std::env::args_os(), &mut stdout.lock(), &mut stderr.lock())
}
