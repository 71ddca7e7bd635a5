//! End-to-end tests of the `nanoswitch` binary.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use nanoswitch::analysis::report::{report_from_str, MetricsReport};
use nanoswitch::analysis::{box_stats, AnalysisConfig};
use nanoswitch::chip::load_manifest;
use nanoswitch::fixtures::{paper_device_set, YIELD_BY_CHIP, YIELD_BY_CLASS, YIELD_TOTAL};
use nanoswitch::simulator::io::TRACE_HEADER;

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_nanoswitch"));
    c.env_remove("NANOSWITCH_OUT_DIR");
    c
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR"))
        .join("fixtures")
        .join(name)
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn value(o: &Output, key: &str) -> String {
    stdout(o)
        .lines()
        .find_map(|l| l.strip_prefix(&format!("{key}=")).map(str::to_string))
        .unwrap_or_else(|| panic!("no `{key}` in output:\n{}", stdout(o)))
}

fn csv_files(dir: &Path) -> Vec<PathBuf> {
    let mut v: Vec<PathBuf> = fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().path())
        .filter(|p| p.extension().is_some_and(|e| e == "csv"))
        .collect();
    v.sort();
    v
}

fn load_report(path: &Path) -> MetricsReport {
    report_from_str(
        &fs::read_to_string(path).unwrap(),
        "test",
        &AnalysisConfig::default(),
    )
    .unwrap()
}

#[test]
fn physics_report() {
    let o = run(&[
        "physics",
        "--material",
        fixture("material_dark.json").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let l_e: f64 = value(&o, "l_e_um").parse().unwrap();
    assert!((l_e - 1.95).abs() / 1.95 < 0.01);
    assert_eq!(value(&o, "max_modes_W_c_100nm"), "3");
    assert_eq!(value(&o, "max_modes_W_c_400nm"), "15");
    assert_eq!(value(&o, "clean_limit"), "true");

    let o = run(&["physics", "--temperature", "2.1"]);
    let zeta: f64 = value(&o, "zeta_N_nm").parse().unwrap();
    assert!((zeta - 204.0).abs() < 1.0, "{zeta}");
}

#[test]
fn physics_rejects_bad_material() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("m.json");
    fs::write(&path, r#"{"mu_e_m2_per_Vs": 25.0, "m_star_ratio": 0.039}"#).unwrap();
    let o = run(&["physics", "--material", path.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("n_s_per_m2"));

    let o = run(&[
        "physics",
        "--material",
        tmp.path().join("absent.json").to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(3));
    assert_eq!(
        run(&["physics", "--temperature", "-1"]).status.code(),
        Some(2)
    );
    assert_eq!(run(&["no-such-command"]).status.code(), Some(2));
}

#[test]
fn chip_new_writes_a_loadable_manifest() {
    let tmp = tempfile::tempdir().unwrap();
    let path = tmp.path().join("c7.json");
    let o = run(&["chip-new", "--id", "C7", "--out", path.to_str().unwrap()]);
    assert!(o.status.success());
    let chip = load_manifest(&path).unwrap();
    assert_eq!(chip.chip_id, "C7");
    assert_eq!(chip.junctions.len(), 8);

    let out_dir = tmp.path().join("sim");
    let o = run(&[
        "simulate",
        "--manifest",
        path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert!(out_dir.join("C7_J8_up.csv").exists());
}

#[test]
fn default_simulation_writes_sixteen_traces() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("sim");
    let o = run(&["simulate", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let files = csv_files(&dir);
    assert_eq!(files.len(), 16);
    let text = fs::read_to_string(dir.join("C1_J1_down.csv")).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some(TRACE_HEADER));
    assert_eq!(
        lines.next().unwrap().split(',').nth(3),
        Some("0.000000000e+00")
    );
    assert_eq!(text.lines().count(), 202);
    assert!(dir.join("C1_J1_down.json").exists());
    assert!(dir.join("index.json").exists());
    assert!(dir.join("manifests/C1.json").exists());
}

#[test]
fn wafer_simulation_writes_144_traces() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("wafer");
    let o = run(&["simulate", "--wafers", "1", "--out", dir.to_str().unwrap()]);
    assert!(o.status.success());
    assert_eq!(csv_files(&dir).len(), 144);
}

#[test]
fn repeated_simulation_is_byte_identical() {
    let tmp = tempfile::tempdir().unwrap();
    let (a, b) = (tmp.path().join("a"), tmp.path().join("b"));
    for d in [&a, &b] {
        assert!(
            run(&["simulate", "--seed", "5", "--out", d.to_str().unwrap()])
                .status
                .success()
        );
    }
    for f in csv_files(&a) {
        let name = f.file_name().unwrap();
        assert_eq!(fs::read(&f).unwrap(), fs::read(b.join(name)).unwrap());
    }
    let c = tmp.path().join("c");
    assert!(
        run(&["simulate", "--seed", "6", "--out", c.to_str().unwrap()])
            .status
            .success()
    );
    assert_ne!(
        fs::read(a.join("C1_J4_down.csv")).unwrap(),
        fs::read(c.join("C1_J4_down.csv")).unwrap()
    );
}

#[test]
fn output_directory_precedence() {
    let tmp = tempfile::tempdir().unwrap();
    let env_dir = tmp.path().join("from_env");
    let cfg_dir = tmp.path().join("from_config");
    let flag_dir = tmp.path().join("from_flag");
    let config = tmp.path().join("run.json");
    fs::write(
        &config,
        format!(
            r#"{{"out_dir": {:?}, "seed": 9}}"#,
            cfg_dir.to_str().unwrap()
        ),
    )
    .unwrap();

    let o = bin()
        .args(["simulate", "--no-noise"])
        .env("NANOSWITCH_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert!(o.status.success());
    assert!(env_dir.join("index.json").exists());

    let cfg = config.to_str().unwrap();
    let o = bin()
        .args(["simulate", "--config", cfg])
        .env("NANOSWITCH_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(value(&o, "seed"), "9");
    assert!(cfg_dir.join("index.json").exists());

    let o = run(&[
        "simulate",
        "--config",
        cfg,
        "--seed",
        "10",
        "--out",
        flag_dir.to_str().unwrap(),
    ]);
    assert_eq!(value(&o, "seed"), "10");
    assert!(flag_dir.join("index.json").exists());

    fs::write(&config, r#"{"unknown_key": 1}"#).unwrap();
    assert_eq!(run(&["simulate", "--config", cfg]).status.code(), Some(2));
}

#[test]
fn invalid_protocol_is_a_config_error() {
    let tmp = tempfile::tempdir().unwrap();
    let d = tmp.path().join("x");
    let o = run(&["simulate", "--v-step", "0", "--out", d.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn simulate_then_analyze_then_report() {
    let tmp = tempfile::tempdir().unwrap();
    let dir = tmp.path().join("sim");
    let d = dir.to_str().unwrap();
    assert!(
        run(&["simulate", "--chips", "3", "--no-failures", "--out", d])
            .status
            .success()
    );
    let o = run(&["analyze", d]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    assert_eq!(value(&o, "yield_percent"), "100");
    let mean: f64 = value(&o, "mean_v_pinch_down_V").parse().unwrap();
    assert!((-0.60..=-0.52).contains(&mean), "{mean}");

    let metrics = dir.join("analysis/metrics.json");
    let csv = fs::read_to_string(dir.join("analysis/metrics.csv")).unwrap();
    assert_eq!(csv.lines().count(), 1 + 24);
    assert!(csv.starts_with("chip_id,junction_id,v_pinch_down_V,v_pinch_up_V,g_on_S,g_off_S,hysteresis_S,is_switching\n"));

    let o = run(&["report", metrics.to_str().unwrap()]);
    assert!(o.status.success());
    let plots = dir.join("analysis/plots");
    let scatter = fs::read_to_string(plots.join("scatter_vp_vs_lj.csv")).unwrap();
    let rows: Vec<Vec<&str>> = scatter
        .lines()
        .skip(1)
        .map(|l| l.split(',').collect())
        .collect();
    let mut junctions: Vec<&str> = rows.iter().map(|r| r[1]).collect();
    junctions.sort();
    junctions.dedup();
    assert_eq!(junctions.len(), 8);
    let wc = fs::read_to_string(plots.join("scatter_vp_vs_wc.csv")).unwrap();
    let mut classes: Vec<(String, String)> = rows
        .iter()
        .zip(wc.lines().skip(1))
        .map(|(r, w)| (r[2].to_string(), w.split(',').nth(2).unwrap().to_string()))
        .collect();
    classes.sort();
    classes.dedup();
    assert_eq!(classes.len(), 5);

    // box medians agree with box statistics recomputed from the flat CSV
    let report = load_report(&metrics);
    let values: Vec<f64> = report
        .devices
        .iter()
        .map(|d| d.metrics.as_ref().unwrap().g_on)
        .collect();
    let want = box_stats(&values).unwrap();
    let line = fs::read_to_string(plots.join("box_g_on.csv"))
        .unwrap()
        .lines()
        .find(|l| l.starts_with("all,"))
        .unwrap()
        .to_string();
    let median: f64 = line.split(',').nth(3).unwrap().parse().unwrap();
    assert!((median - want.median).abs() <= 1e-9 * want.median);
}

#[test]
fn analyze_error_paths() {
    let tmp = tempfile::tempdir().unwrap();
    let empty = tmp.path().join("empty");
    fs::create_dir(&empty).unwrap();
    assert_eq!(
        run(&["analyze", empty.to_str().unwrap()]).status.code(),
        Some(2)
    );
    assert_eq!(
        run(&["analyze", tmp.path().join("missing").to_str().unwrap()])
            .status
            .code(),
        Some(3)
    );

    let dir = tmp.path().join("sim");
    let d = dir.to_str().unwrap();
    assert!(run(&["simulate", "--out", d]).status.success());
    fs::write(dir.join("C9_J1_down.csv"), "not,a,trace\n").unwrap();
    let o = run(&["analyze", d]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("C9_J1_down.csv"));
    let report = load_report(&dir.join("analysis/metrics.json"));
    assert_eq!(report.devices.len(), 8);
    assert_eq!(report.diagnostics.len(), 1);
}

#[test]
fn fixture_reproduces_published_yields() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tmp.path().join("fx");
    let o = run(&[
        "analyze",
        fixture("paper_devices.json").to_str().unwrap(),
        "--out",
        out.to_str().unwrap(),
    ]);
    assert!(o.status.success());
    assert_eq!(value(&o, "yield_percent"), YIELD_TOTAL.2);
    let report = load_report(&out.join("metrics.json"));
    for (row, (id, s, m, shown)) in report.yields.by_chip.rows.iter().zip(YIELD_BY_CHIP) {
        assert_eq!(
            (
                row.group_key.as_str(),
                row.switching_count,
                row.measured_count
            ),
            (id, s, m)
        );
        assert_eq!(row.display, shown);
    }
    for (row, (_, _, s, m, shown)) in report.yields.by_class.rows.iter().zip(YIELD_BY_CLASS) {
        assert_eq!((row.switching_count, row.measured_count), (s, m));
        assert_eq!(row.display, shown);
    }
    let rows = &report.yields.by_chip.rows;
    assert_eq!(
        rows.iter().map(|r| r.switching_count).sum::<usize>(),
        report.yields.by_chip.total.switching_count
    );
}

#[test]
fn shipped_fixture_matches_the_tabulated_set() {
    let text = fs::read_to_string(fixture("paper_devices.json")).unwrap();
    let shipped: nanoswitch::analysis::report::DeviceSet = serde_json::from_str(&text).unwrap();
    assert_eq!(shipped, paper_device_set());
}

#[test]
fn report_of_a_single_device() {
    let tmp = tempfile::tempdir().unwrap();
    let chip = tmp.path().join("c.json");
    assert!(run(&["chip-new", "--out", chip.to_str().unwrap()])
        .status
        .success());
    let dir = tmp.path().join("one");
    fs::create_dir(&dir).unwrap();
    let sim = tmp.path().join("sim");
    assert!(run(&[
        "simulate",
        "--manifest",
        chip.to_str().unwrap(),
        "--no-noise",
        "--no-failures",
        "--out",
        sim.to_str().unwrap()
    ])
    .status
    .success());
    for f in ["C1_J4_down.csv", "C1_J4_up.csv"] {
        fs::copy(sim.join(f), dir.join(f)).unwrap();
    }
    assert!(run(&["analyze", dir.to_str().unwrap()]).status.success());
    let o = run(&[
        "report",
        dir.join("analysis/metrics.json").to_str().unwrap(),
    ]);
    assert!(o.status.success());
    let text = fs::read_to_string(dir.join("analysis/plots/box_v_pinch_down.csv")).unwrap();
    let all: Vec<&str> = text
        .lines()
        .find(|l| l.starts_with("all,"))
        .unwrap()
        .split(',')
        .collect();
    assert_eq!(all[1], "1");
    assert_eq!(all[4], all[5]);
    assert_eq!(all[6], "0.000000000e+00");
}

#[test]
fn report_rejects_non_reports() {
    let tmp = tempfile::tempdir().unwrap();
    let o = run(&[
        "report",
        fixture("paper_devices.json").to_str().unwrap(),
        "--out",
        tmp.path().to_str().unwrap(),
    ]);
    assert_eq!(o.status.code(), Some(2));
    let bad = tmp.path().join("bad.json");
    fs::write(&bad, r#"{"format": "nanoswitch-metrics", "version": 99}"#).unwrap();
    assert_eq!(
        run(&["report", bad.to_str().unwrap()]).status.code(),
        Some(2)
    );
}
