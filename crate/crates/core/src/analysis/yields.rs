//! Yield tables: switching devices over measured devices, per group.

use serde::{Deserialize, Serialize};

/// Shown in place of a percentage when a group has no measured device.
pub const UNDEFINED_YIELD: &str = "n/a";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct YieldRecord {
    pub group_key: String,
    pub is_switching: bool,
    pub measured: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YieldRow {
    pub group_key: String,
    pub switching_count: usize,
    pub measured_count: usize,
    /// Unrounded `100·switching/measured`; absent when nothing was measured.
    pub yield_percent: Option<f64>,
    /// Rounded for presentation.
    pub display: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct YieldTable {
    pub rows: Vec<YieldRow>,
    pub total: YieldRow,
}

/// `100·num/den` rounded half away from zero to `decimals` places, with
/// trailing zeros removed. Exact integer arithmetic.
pub fn format_yield(num: usize, den: usize, decimals: u32) -> String {
    if den == 0 {
        return UNDEFINED_YIELD.to_string();
    }
    let scale = 10u128.pow(decimals);
    let (num, den) = (num as u128, den as u128);
    let scaled = (2 * 100 * num * scale + den) / (2 * den);
    let int = scaled / scale;
    let frac = scaled % scale;
    if decimals == 0 || frac == 0 {
        return int.to_string();
    }
    let digits = format!("{frac:0width$}", width = decimals as usize);
    format!("{int}.{}", digits.trim_end_matches('0'))
}

fn row(group_key: String, switching: usize, measured: usize, decimals: u32) -> YieldRow {
    YieldRow {
        group_key,
        switching_count: switching,
        measured_count: measured,
        yield_percent: (measured > 0).then(|| 100.0 * switching as f64 / measured as f64),
        display: format_yield(switching, measured, decimals),
    }
}

/// Groups records in order of first appearance. Unmeasured devices count in
/// neither numerator nor denominator.
pub fn yield_table(records: &[YieldRecord], row_decimals: u32, total_decimals: u32) -> YieldTable {
    let mut groups: Vec<(String, usize, usize)> = Vec::new();
    for r in records {
        let idx = match groups.iter().position(|g| g.0 == r.group_key) {
            Some(i) => i,
            None => {
                groups.push((r.group_key.clone(), 0, 0));
                groups.len() - 1
            }
        };
        if r.measured {
            groups[idx].2 += 1;
            if r.is_switching {
                groups[idx].1 += 1;
            }
        }
    }
    let switching = groups.iter().map(|g| g.1).sum();
    let measured = groups.iter().map(|g| g.2).sum();
    YieldTable {
        rows: groups
            .into_iter()
            .map(|(k, s, m)| row(k, s, m, row_decimals))
            .collect(),
        total: row("Total".into(), switching, measured, total_decimals),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rounding_rules() {
        assert_eq!(format_yield(6, 7, 1), "85.7");
        assert_eq!(format_yield(6, 8, 1), "75");
        assert_eq!(format_yield(26, 35, 1), "74.3");
        assert_eq!(format_yield(5, 9, 1), "55.6");
        assert_eq!(format_yield(49, 66, 2), "74.24");
        assert_eq!(format_yield(7, 8, 0), "88");
        assert_eq!(format_yield(3, 8, 0), "38");
        assert_eq!(format_yield(0, 8, 0), "0");
        assert_eq!(format_yield(2, 2, 0), "100");
        assert_eq!(format_yield(1, 40, 2), "2.5");
        assert_eq!(format_yield(0, 0, 2), UNDEFINED_YIELD);
    }

    #[test]
    fn unmeasured_devices_are_excluded() {
        let rec = |k: &str, s: bool, m: bool| YieldRecord {
            group_key: k.into(),
            is_switching: s,
            measured: m,
        };
        let t = yield_table(
            &[
                rec("A", true, true),
                rec("A", false, false),
                rec("B", false, false),
                rec("A", false, true),
            ],
            0,
            2,
        );
        assert_eq!(t.rows.len(), 2);
        assert_eq!(
            (t.rows[0].switching_count, t.rows[0].measured_count),
            (1, 2)
        );
        assert_eq!(t.rows[1].display, UNDEFINED_YIELD);
        assert_eq!(t.rows[1].yield_percent, None);
        assert_eq!(t.total.measured_count, 2);
        assert_eq!(t.total.display, "50");
    }
}
