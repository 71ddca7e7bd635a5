//! Switching metrics and population statistics of gate sweeps.

pub mod extract;
pub mod report;
pub mod stats;
pub mod yields;

pub use extract::{
    analyze_trace_pair, classify_switching, extract_g_off, extract_g_on, extract_pinch_off,
    hysteresis_max, AnalysisConfig, DirectionMetrics, PinchCombine, TraceMetrics,
};
pub use report::{build_report, devices_from_traces, metrics_csv, DeviceRecord, MetricsReport};
pub use stats::{box_stats, correlate, BoxStats, CorrelationResult};
pub use yields::{format_yield, yield_table, YieldRecord, YieldRow, YieldTable};
