//! Simulator output fed through the analysis.

use nanoswitch::analysis::{analyze_trace_pair, AnalysisConfig};
use nanoswitch::chip::{default_chip, FailureMode};
use nanoswitch::physics::Material2DEG;
use nanoswitch::simulator::io::{read_trace_dir, write_ensemble};
use nanoswitch::simulator::{
    run_ensemble, run_sweep, wafer_chips, EnsembleConfig, SimulationConfig,
};

#[test]
fn healthy_noise_free_wafer_switches_everywhere() {
    let config = EnsembleConfig {
        simulation: SimulationConfig::noise_free(),
        ..EnsembleConfig::healthy()
    };
    let e = run_ensemble(&wafer_chips(1, Material2DEG::dark()), &config, 11).unwrap();
    assert_eq!(e.sweeps.len(), 72);
    for p in &e.sweeps {
        let m = analyze_trace_pair(&p.down, p.up.as_ref(), &AnalysisConfig::default()).unwrap();
        assert!(m.is_switching, "{}/{}", m.chip_id, m.junction_id);
    }
}

#[test]
fn healthy_junction_metrics() {
    let chip = default_chip("C1", Material2DEG::dark());
    let pair = run_sweep(&chip, "J4", &SimulationConfig::default(), 3).unwrap();
    let m = analyze_trace_pair(&pair.down, pair.up.as_ref(), &AnalysisConfig::default()).unwrap();
    assert!(m.is_switching);
    assert!((m.v_pinch.unwrap() + 0.56).abs() <= 0.01);
    assert!(m.g_off <= 0.01 * m.g_on);
}

#[test]
fn short_junctions_overlap_within_noise() {
    let chip = default_chip("C1", Material2DEG::dark());
    let config = SimulationConfig::default();
    let sigma = config.noise.white_estimator_sd(&config.protocol);
    for j in &chip.junctions[..7] {
        let pair = run_sweep(&chip, &j.junction_id, &config, 8).unwrap();
        let m =
            analyze_trace_pair(&pair.down, pair.up.as_ref(), &AnalysisConfig::default()).unwrap();
        // difference of two independent readings, 201 grid points
        assert!(
            m.hysteresis_max <= 6.0 * sigma * 2f64.sqrt(),
            "{}: {}",
            j.junction_id,
            m.hysteresis_max
        );
    }
    let pair = run_sweep(&chip, "J8", &config, 8).unwrap();
    let m = analyze_trace_pair(&pair.down, pair.up.as_ref(), &AnalysisConfig::default()).unwrap();
    assert!(m.hysteresis_max > 100.0 * sigma);
}

#[test]
fn failure_signatures_are_not_switching() {
    let mut chip = default_chip("C1", Material2DEG::dark());
    chip.junctions[0].failure = FailureMode::OpenContact;
    chip.junctions[1].failure = FailureMode::ThickOxideNoPinchoff;
    chip.junctions[2].failure = FailureMode::PrePinched;
    chip.junctions[3].failure = FailureMode::GateLeak;
    for j in &chip.junctions[..4] {
        let pair = run_sweep(&chip, &j.junction_id, &SimulationConfig::default(), 1).unwrap();
        let m =
            analyze_trace_pair(&pair.down, pair.up.as_ref(), &AnalysisConfig::default()).unwrap();
        assert!(!m.is_switching, "{:?}", j.failure);
        if j.failure == FailureMode::OpenContact {
            assert!(m.g_on < 1e-7);
        }
    }
}

#[test]
fn written_traces_analyze_like_in_memory_ones() {
    let tmp = tempfile::tempdir().unwrap();
    let chips = wafer_chips(1, Material2DEG::dark());
    let config = EnsembleConfig::default();
    let e = run_ensemble(&chips[..1], &config, 5).unwrap();
    write_ensemble(&e, &config, tmp.path()).unwrap();
    let (traces, diagnostics) = read_trace_dir(tmp.path()).unwrap();
    assert!(diagnostics.is_empty());
    assert_eq!(traces.len(), 16);
    assert!(traces.iter().all(|t| t.metadata.is_some()));
    let analysis = AnalysisConfig::default();
    for p in &e.sweeps {
        let direct = analyze_trace_pair(&p.down, p.up.as_ref(), &analysis).unwrap();
        let find = |dir| {
            traces
                .iter()
                .find(|t| t.trace.junction_id == p.down.junction_id && t.trace.direction == dir)
                .unwrap()
        };
        let down = find(nanoswitch::simulator::Direction::Down);
        let up = find(nanoswitch::simulator::Direction::Up);
        let read = analyze_trace_pair(&down.trace, Some(&up.trace), &analysis).unwrap();
        assert_eq!(direct.is_switching, read.is_switching);
        assert_eq!(direct.v_pinch, read.v_pinch);
        assert!((direct.g_on - read.g_on).abs() <= 1e-9 * direct.g_on.abs().max(1e-12));
    }
}
