//! Device-level records, the metrics report and its flat CSV and plot-data
//! renderings.

use std::cmp::Ordering;
use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::analysis::extract::{analyze_trace_pair, AnalysisConfig, TraceMetrics};
use crate::analysis::stats::{box_stats, correlate, BoxStats, CorrelationResult};
use crate::analysis::yields::{yield_table, YieldRecord, YieldTable};
use crate::chip::{designed_geometry, JUNCTIONS_PER_CHIP};
use crate::error::{Error, Result};
use crate::simulator::io::{format_sci, Diagnostic, LoadedTrace};
use crate::simulator::{Direction, SweepTrace};

pub const REPORT_FORMAT: &str = "nanoswitch-metrics";
pub const REPORT_VERSION: u32 = 1;
pub const METRICS_CSV_HEADER: &str =
    "chip_id,junction_id,v_pinch_down_V,v_pinch_up_V,g_on_S,g_off_S,hysteresis_S,is_switching";

/// One junction of one chip as it enters the statistics.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceRecord {
    pub chip_id: String,
    pub junction_id: String,
    #[serde(rename = "L_J_um")]
    pub l_j_um: Option<f64>,
    #[serde(rename = "W_c_nm")]
    pub w_c_nm: Option<f64>,
    /// False for devices that could not be measured at all (bonding, pads).
    pub measured: bool,
    pub is_switching: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub metrics: Option<TraceMetrics>,
}

impl DeviceRecord {
    pub fn validate(&self) -> Result<()> {
        let who = format!("{}/{}", self.chip_id, self.junction_id);
        if self.is_switching && !self.measured {
            return Err(Error::Validation(format!(
                "{who}: switching but not measured"
            )));
        }
        if let Some(m) = &self.metrics {
            if m.is_switching != self.is_switching {
                return Err(Error::Validation(format!(
                    "{who}: is_switching disagrees with metrics"
                )));
            }
            if !self.measured {
                return Err(Error::Validation(format!(
                    "{who}: metrics for an unmeasured device"
                )));
            }
        }
        Ok(())
    }
}

/// A bare list of devices, as shipped with the tabulated counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DeviceSet {
    pub devices: Vec<DeviceRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GroupStats {
    pub group: String,
    pub metric: String,
    pub stats: BoxStats,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Yields {
    pub by_chip: YieldTable,
    pub by_class: YieldTable,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CorrelationEntry {
    pub x: String,
    pub y: String,
    pub result: Option<CorrelationResult>,
    /// Why `result` is absent.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiagnosticRecord {
    pub path: String,
    pub message: String,
}

impl From<&Diagnostic> for DiagnosticRecord {
    fn from(d: &Diagnostic) -> Self {
        DiagnosticRecord {
            path: d.path.display().to_string(),
            message: d.message.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MetricsReport {
    pub format: String,
    pub version: u32,
    pub analysis: AnalysisConfig,
    pub devices: Vec<DeviceRecord>,
    pub box_stats: Vec<GroupStats>,
    pub yields: Yields,
    pub correlations: Vec<CorrelationEntry>,
    pub diagnostics: Vec<DiagnosticRecord>,
}

/// Orders ids like `C2 < C10` and `J2 < J10`.
pub fn natural_cmp(a: &str, b: &str) -> Ordering {
    fn chunks(s: &str) -> Vec<(bool, &str)> {
        let mut out = Vec::new();
        let mut start = 0;
        let bytes = s.as_bytes();
        for i in 1..=bytes.len() {
            if i == bytes.len() || bytes[i].is_ascii_digit() != bytes[start].is_ascii_digit() {
                out.push((bytes[start].is_ascii_digit(), &s[start..i]));
                start = i;
            }
        }
        out
    }
    let (ca, cb) = (chunks(a), chunks(b));
    for (x, y) in ca.iter().zip(&cb) {
        let ord = match (x.0, y.0) {
            (true, true) => {
                let (tx, ty) = (x.1.trim_start_matches('0'), y.1.trim_start_matches('0'));
                tx.len().cmp(&ty.len()).then_with(|| tx.cmp(ty))
            }
            _ => x.1.cmp(y.1),
        };
        if ord != Ordering::Equal {
            return ord;
        }
    }
    ca.len().cmp(&cb.len()).then_with(|| a.cmp(b))
}

/// Designed geometry of a `J1`..`J8` id, used when a trace has no sidecar.
fn geometry_from_id(junction_id: &str) -> Option<(f64, f64)> {
    let n: usize = junction_id.strip_prefix('J')?.parse().ok()?;
    (1..=JUNCTIONS_PER_CHIP).contains(&n).then(|| {
        let g = designed_geometry(n - 1);
        (g.l_j_um, g.w_c_nm)
    })
}

/// Pairs loaded traces by (chip, junction) and analyzes each pair. Traces
/// that cannot be paired or analyzed become diagnostics.
pub fn devices_from_traces(
    traces: &[LoadedTrace],
    config: &AnalysisConfig,
) -> (Vec<DeviceRecord>, Vec<Diagnostic>) {
    struct Slot<'a> {
        down: Option<&'a LoadedTrace>,
        up: Option<&'a LoadedTrace>,
    }
    let mut slots: BTreeMap<(String, String), Slot<'_>> = BTreeMap::new();
    let mut diagnostics = Vec::new();
    for t in traces {
        let slot = slots
            .entry((t.trace.chip_id.clone(), t.trace.junction_id.clone()))
            .or_insert(Slot {
                down: None,
                up: None,
            });
        let place = match t.trace.direction {
            Direction::Down => &mut slot.down,
            Direction::Up => &mut slot.up,
        };
        if place.is_some() {
            diagnostics.push(Diagnostic {
                path: t.path.clone(),
                message: format!(
                    "duplicate {} trace for {}/{}",
                    t.trace.direction.as_str(),
                    t.trace.chip_id,
                    t.trace.junction_id
                ),
            });
        } else {
            *place = Some(t);
        }
    }
    let mut keys: Vec<_> = slots.keys().cloned().collect();
    keys.sort_by(|a, b| natural_cmp(&a.0, &b.0).then_with(|| natural_cmp(&a.1, &b.1)));

    let mut devices = Vec::new();
    for key in keys {
        let slot = &slots[&key];
        let Some(down) = slot.down else {
            let up = slot.up.expect("slot holds at least one trace");
            diagnostics.push(Diagnostic {
                path: up.path.clone(),
                message: format!("{}/{}: up trace without a down trace", key.0, key.1),
            });
            continue;
        };
        let up_trace: Option<&SweepTrace> = slot.up.map(|u| &u.trace);
        match analyze_trace_pair(&down.trace, up_trace, config) {
            Ok(metrics) => {
                let geometry = down
                    .metadata
                    .as_ref()
                    .map(|m| (m.geometry.l_j_um, m.geometry.w_c_nm))
                    .or_else(|| geometry_from_id(&key.1));
                devices.push(DeviceRecord {
                    chip_id: key.0.clone(),
                    junction_id: key.1.clone(),
                    l_j_um: geometry.map(|g| g.0),
                    w_c_nm: geometry.map(|g| g.1),
                    measured: true,
                    is_switching: metrics.is_switching,
                    metrics: Some(metrics),
                });
            }
            Err(e) => diagnostics.push(Diagnostic {
                path: down.path.clone(),
                message: e.to_string(),
            }),
        }
    }
    (devices, diagnostics)
}

fn class_key(l_j_um: f64, w_c_nm: f64) -> String {
    format!("L_J={l_j_um}um W_c={w_c_nm}nm")
}

fn push_unique(list: &mut Vec<String>, key: String) {
    if !list.contains(&key) {
        list.push(key);
    }
}

const METRICS: [&str; 4] = ["v_pinch_down", "v_pinch_up", "g_on", "g_off"];

/// Value of `metric` for a device, if it enters that statistic. Pinch-off
/// voltages count only for switching devices.
fn metric_value(d: &DeviceRecord, metric: &str) -> Option<f64> {
    let m = d.metrics.as_ref()?;
    match metric {
        "v_pinch_down" => m.down.v_pinch.filter(|_| d.is_switching),
        "v_pinch_up" => m.up.and_then(|u| u.v_pinch).filter(|_| d.is_switching),
        "g_on" => Some(m.g_on),
        "g_off" => Some(m.g_off),
        _ => None,
    }
}

fn correlation(
    devices: &[DeviceRecord],
    x_name: &str,
    x_of: impl Fn(&DeviceRecord) -> Option<f64>,
) -> CorrelationEntry {
    let (mut xs, mut ys) = (Vec::new(), Vec::new());
    for d in devices.iter().filter(|d| d.is_switching) {
        if let (Some(x), Some(y)) = (x_of(d), d.metrics.as_ref().and_then(|m| m.v_pinch)) {
            xs.push(x);
            ys.push(y);
        }
    }
    let (result, note) = match correlate(&xs, &ys) {
        Ok(r) => (Some(r), None),
        Err(e) => (None, Some(e.to_string())),
    };
    CorrelationEntry {
        x: x_name.to_string(),
        y: "v_pinch_V".to_string(),
        result,
        note,
    }
}

/// Statistics over a device list.
pub fn build_report(
    devices: Vec<DeviceRecord>,
    config: &AnalysisConfig,
    diagnostics: &[Diagnostic],
) -> Result<MetricsReport> {
    for d in &devices {
        d.validate()?;
    }

    let mut groups = vec!["all".to_string()];
    let mut chips = Vec::new();
    let mut junctions = Vec::new();
    let mut lengths = Vec::new();
    let mut widths = Vec::new();
    for d in &devices {
        push_unique(&mut chips, d.chip_id.clone());
        push_unique(&mut junctions, d.junction_id.clone());
        if let Some(l) = d.l_j_um {
            lengths.push(l);
        }
        if let Some(w) = d.w_c_nm {
            widths.push(w);
        }
    }
    junctions.sort_by(|a, b| natural_cmp(a, b));
    lengths.sort_by(f64::total_cmp);
    lengths.dedup();
    widths.sort_by(f64::total_cmp);
    widths.dedup();
    groups.extend(chips.iter().map(|c| format!("chip:{c}")));
    groups.extend(junctions.iter().map(|j| format!("junction:{j}")));
    groups.extend(lengths.iter().map(|l| format!("L_J_um:{l}")));
    groups.extend(widths.iter().rev().map(|w| format!("W_c_nm:{w}")));

    let in_group = |d: &DeviceRecord, group: &str| -> bool {
        match group.split_once(':') {
            None => true,
            Some(("chip", c)) => d.chip_id == c,
            Some(("junction", j)) => d.junction_id == j,
            Some(("L_J_um", l)) => d.l_j_um.map(|v| v.to_string()).as_deref() == Some(l),
            Some(("W_c_nm", w)) => d.w_c_nm.map(|v| v.to_string()).as_deref() == Some(w),
            Some(_) => false,
        }
    };

    let mut stats = Vec::new();
    for metric in METRICS {
        for group in &groups {
            let values: Vec<f64> = devices
                .iter()
                .filter(|d| in_group(d, group))
                .filter_map(|d| metric_value(d, metric))
                .collect();
            if values.is_empty() {
                continue;
            }
            stats.push(GroupStats {
                group: group.clone(),
                metric: metric.to_string(),
                stats: box_stats(&values)?,
            });
        }
    }

    let by_chip: Vec<YieldRecord> = devices
        .iter()
        .map(|d| YieldRecord {
            group_key: d.chip_id.clone(),
            is_switching: d.is_switching,
            measured: d.measured,
        })
        .collect();
    let mut classed: Vec<&DeviceRecord> = devices
        .iter()
        .filter(|d| d.l_j_um.is_some() && d.w_c_nm.is_some())
        .collect();
    // L_J ascending, then W_c descending: the order of the yield-by-dimension table
    classed.sort_by(|a, b| {
        a.l_j_um
            .unwrap()
            .total_cmp(&b.l_j_um.unwrap())
            .then_with(|| b.w_c_nm.unwrap().total_cmp(&a.w_c_nm.unwrap()))
    });
    let by_class: Vec<YieldRecord> = classed
        .iter()
        .map(|d| YieldRecord {
            group_key: class_key(d.l_j_um.unwrap(), d.w_c_nm.unwrap()),
            is_switching: d.is_switching,
            measured: d.measured,
        })
        .collect();

    let correlations = vec![
        correlation(&devices, "L_J_um", |d| d.l_j_um),
        correlation(&devices, "W_c_nm", |d| d.w_c_nm),
    ];

    Ok(MetricsReport {
        format: REPORT_FORMAT.to_string(),
        version: REPORT_VERSION,
        analysis: *config,
        box_stats: stats,
        yields: Yields {
            by_chip: yield_table(&by_chip, 0, 2),
            by_class: yield_table(&by_class, 1, 2),
        },
        correlations,
        diagnostics: diagnostics.iter().map(DiagnosticRecord::from).collect(),
        devices,
    })
}

pub fn report_to_string(report: &MetricsReport) -> Result<String> {
    let mut text = serde_json::to_string_pretty(report)
        .map_err(|e| Error::parse("metrics report", e.to_string()))?;
    text.push('\n');
    Ok(text)
}

/// Parses either a full metrics report or a bare device set; a device set
/// is expanded into a report with `config`.
pub fn report_from_str(
    text: &str,
    context: &str,
    config: &AnalysisConfig,
) -> Result<MetricsReport> {
    let value: serde_json::Value =
        serde_json::from_str(text).map_err(|e| Error::parse(context, e.to_string()))?;
    let is_report = value.get("format").is_some();
    if is_report {
        let report: MetricsReport =
            serde_json::from_value(value).map_err(|e| Error::parse(context, e.to_string()))?;
        if report.format != REPORT_FORMAT || report.version != REPORT_VERSION {
            return Err(Error::parse(
                context,
                format!(
                    "unsupported report format {} v{}",
                    report.format, report.version
                ),
            ));
        }
        for d in &report.devices {
            d.validate()?;
        }
        Ok(report)
    } else {
        let set: DeviceSet =
            serde_json::from_value(value).map_err(|e| Error::parse(context, e.to_string()))?;
        build_report(set.devices, config, &[])
    }
}

fn opt_sci(v: Option<f64>) -> String {
    v.map(format_sci).unwrap_or_default()
}

/// Flat per-device metrics, one row per analyzed device.
pub fn metrics_csv(report: &MetricsReport) -> String {
    let mut out = String::from(METRICS_CSV_HEADER);
    out.push('\n');
    for d in &report.devices {
        let Some(m) = &d.metrics else { continue };
        out.push_str(&format!(
            "{},{},{},{},{},{},{},{}\n",
            d.chip_id,
            d.junction_id,
            opt_sci(m.down.v_pinch),
            opt_sci(m.up.and_then(|u| u.v_pinch)),
            format_sci(m.g_on),
            format_sci(m.g_off),
            format_sci(m.hysteresis_max),
            d.is_switching
        ));
    }
    out
}

/// Plot-ready files as (file name, contents): one box summary per metric,
/// pinch-off scatter against both dimensions, and both yield tables.
pub fn plot_files(report: &MetricsReport) -> Vec<(String, String)> {
    let mut files = Vec::new();
    for metric in METRICS {
        let mut out =
            String::from("group,n,mean,median,q1,q3,iqr,whisker_low,whisker_high,outliers\n");
        for g in report.box_stats.iter().filter(|g| g.metric == metric) {
            let s = &g.stats;
            let outliers: Vec<String> = s.outliers.iter().map(|&v| format_sci(v)).collect();
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{},{},{}\n",
                g.group,
                s.n,
                format_sci(s.mean),
                format_sci(s.median),
                format_sci(s.q1),
                format_sci(s.q3),
                format_sci(s.iqr),
                format_sci(s.whisker_low),
                format_sci(s.whisker_high),
                outliers.join(";")
            ));
        }
        files.push((format!("box_{metric}.csv"), out));
    }
    for (name, x_col, x_of) in [
        (
            "scatter_vp_vs_lj.csv",
            "L_J_um",
            (|d: &DeviceRecord| d.l_j_um) as fn(&DeviceRecord) -> Option<f64>,
        ),
        ("scatter_vp_vs_wc.csv", "W_c_nm", |d: &DeviceRecord| {
            d.w_c_nm
        }),
    ] {
        let mut out =
            format!("chip_id,junction_id,{x_col},v_pinch_down_V,v_pinch_up_V,v_pinch_V\n");
        for d in report.devices.iter().filter(|d| d.is_switching) {
            let (Some(x), Some(m)) = (x_of(d), &d.metrics) else {
                continue;
            };
            out.push_str(&format!(
                "{},{},{x},{},{},{}\n",
                d.chip_id,
                d.junction_id,
                opt_sci(m.down.v_pinch),
                opt_sci(m.up.and_then(|u| u.v_pinch)),
                opt_sci(m.v_pinch)
            ));
        }
        files.push((name.to_string(), out));
    }
    for (name, table) in [
        ("yield_by_chip.csv", &report.yields.by_chip),
        ("yield_by_class.csv", &report.yields.by_class),
    ] {
        let mut out = String::from("group,switching,measured,yield_percent\n");
        for r in table.rows.iter().chain(std::iter::once(&table.total)) {
            out.push_str(&format!(
                "{},{},{},{}\n",
                r.group_key, r.switching_count, r.measured_count, r.display
            ));
        }
        files.push((name.to_string(), out));
    }
    files
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn natural_order() {
        let mut ids = vec!["C10", "C2", "C1", "D1", "W02-C1", "W01-C9"];
        ids.sort_by(|a, b| natural_cmp(a, b));
        assert_eq!(ids, ["C1", "C2", "C10", "D1", "W01-C9", "W02-C1"]);
    }

    #[test]
    fn unmeasured_switching_is_invalid() {
        let d = DeviceRecord {
            chip_id: "C1".into(),
            junction_id: "J1".into(),
            l_j_um: Some(1.4),
            w_c_nm: Some(400.0),
            measured: false,
            is_switching: true,
            metrics: None,
        };
        assert!(build_report(vec![d], &AnalysisConfig::default(), &[]).is_err());
    }

    #[test]
    fn id_fallback_geometry() {
        assert_eq!(geometry_from_id("J8"), Some((3.2, 100.0)));
        assert_eq!(geometry_from_id("J9"), None);
        assert_eq!(geometry_from_id("X1"), None);
    }
}
