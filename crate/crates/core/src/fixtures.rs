//! Published yield counts and a device-level set consistent with them.
//!
//! Only per-chip and per-dimension totals were published. The device-level
//! set assigns measured and switching flags to individual junctions so that
//! both tables are reproduced at once; which junction of a chip failed is a
//! reconstruction, the counts are not.

use crate::analysis::report::{DeviceRecord, DeviceSet};
use crate::chip::{designed_geometry, JUNCTIONS_PER_CHIP};

/// Per-chip counts: (chip id, switching, measured, published yield).
pub const YIELD_BY_CHIP: [(&str, usize, usize, &str); 10] = [
    ("C1", 0, 8, "0"),
    ("C2", 6, 7, "86"),
    ("C3", 3, 8, "38"),
    ("C4", 7, 8, "88"),
    ("C7", 6, 8, "75"),
    ("C8", 8, 8, "100"),
    ("D1", 2, 2, "100"),
    ("D6", 6, 6, "100"),
    ("D8", 7, 7, "100"),
    ("D9", 4, 4, "100"),
];

/// Published total over all chips.
pub const YIELD_TOTAL: (usize, usize, &str) = (49, 66, "74.24");

/// Per-dimension counts: (L_J µm, W_c nm, switching, measured, published yield).
pub const YIELD_BY_CLASS: [(f64, f64, usize, usize, &str); 5] = [
    (1.4, 400.0, 6, 7, "85.7"),
    (1.4, 300.0, 6, 7, "85.7"),
    (1.4, 200.0, 6, 8, "75"),
    (1.4, 100.0, 26, 35, "74.3"),
    (3.2, 100.0, 5, 9, "55.6"),
];

/// (chip, measured junction numbers, switching junction numbers).
const DEVICE_FLAGS: [(&str, &[usize], &[usize]); 10] = [
    ("C1", &[1, 2, 3, 4, 5, 6, 7, 8], &[]),
    ("C2", &[1, 2, 3, 4, 5, 6, 8], &[1, 2, 3, 4, 5, 6]),
    ("C3", &[1, 2, 3, 4, 5, 6, 7, 8], &[1, 2, 3]),
    ("C4", &[1, 2, 3, 4, 5, 6, 7, 8], &[1, 2, 3, 4, 5, 6, 8]),
    ("C7", &[1, 2, 3, 4, 5, 6, 7, 8], &[1, 2, 4, 5, 6, 7]),
    ("C8", &[1, 2, 3, 4, 5, 6, 7, 8], &[1, 2, 3, 4, 5, 6, 7, 8]),
    ("D1", &[4, 5], &[4, 5]),
    ("D6", &[3, 4, 5, 6, 7, 8], &[3, 4, 5, 6, 7, 8]),
    ("D8", &[1, 2, 3, 4, 5, 6, 8], &[1, 2, 3, 4, 5, 6, 8]),
    ("D9", &[4, 5, 6, 8], &[4, 5, 6, 8]),
];

/// Every junction of the ten tabulated chips, without trace metrics.
pub fn paper_device_set() -> DeviceSet {
    let mut devices = Vec::with_capacity(DEVICE_FLAGS.len() * JUNCTIONS_PER_CHIP);
    for (chip, measured, switching) in DEVICE_FLAGS {
        for n in 1..=JUNCTIONS_PER_CHIP {
            let g = designed_geometry(n - 1);
            devices.push(DeviceRecord {
                chip_id: chip.to_string(),
                junction_id: format!("J{n}"),
                l_j_um: Some(g.l_j_um),
                w_c_nm: Some(g.w_c_nm),
                measured: measured.contains(&n),
                is_switching: switching.contains(&n),
                metrics: None,
            });
        }
    }
    DeviceSet { devices }
}
