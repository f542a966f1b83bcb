//! Memory needed to materialize all pairwise similarities.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Bytes per stored similarity (fp16).
pub const ENTRY_BYTES: u128 = 2;

pub const GIB: u128 = 1 << 30;

/// 80 GiB, the device budget used by default.
pub const DEFAULT_BUDGET_BYTES: u128 = 80 * GIB;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MemoryEstimate {
    pub n: u64,
    /// `n · n · 2`.
    pub materialization_bytes: u128,
    pub budget_bytes: u128,
    /// `materialization_bytes <= budget_bytes`.
    pub feasible: bool,
    pub index_bytes_measured: Option<u64>,
    /// `materialization_bytes / index_bytes_measured`.
    pub ratio: Option<f64>,
}

pub fn memory_wall(n: u64, budget_bytes: u128) -> Result<MemoryEstimate> {
    if n == 0 {
        return Err(Error::invalid("n must be at least 1"));
    }
    let materialization_bytes = u128::from(n) * u128::from(n) * ENTRY_BYTES;
    Ok(MemoryEstimate {
        n,
        materialization_bytes,
        budget_bytes,
        feasible: materialization_bytes <= budget_bytes,
        index_bytes_measured: None,
        ratio: None,
    })
}

impl MemoryEstimate {
    pub fn with_index_bytes(mut self, bytes: u64) -> Self {
        self.index_bytes_measured = Some(bytes);
        self.ratio = (bytes > 0).then(|| self.materialization_bytes as f64 / bytes as f64);
        self
    }

    pub fn materialization_gib(&self) -> f64 {
        self.materialization_bytes as f64 / GIB as f64
    }

    /// Materialization size rendered by [`format_gib`].
    pub fn display_size(&self) -> String {
        format_gib(self.materialization_bytes)
    }
}

/// Two-decimal size in GiB.
///
/// From 1000 GiB upwards the value is printed in thousands of GiB under a
/// `TiB` label, e.g. 1862.65 GiB is shown as `1.86 TiB`, not the binary TiB
/// (2^40 bytes), which would read 1.82.
pub fn format_gib(bytes: u128) -> String {
    let gib = bytes as f64 / GIB as f64;
    if gib >= 1000.0 {
        format!("{:.2} TiB", gib / 1000.0)
    } else {
        format!("{gib:.2} GiB")
    }
}

/// Human-readable size for measured footprints (binary units).
pub fn format_bytes(bytes: u128) -> String {
    const UNITS: [&str; 5] = ["B", "KiB", "MiB", "GiB", "TiB"];
    let mut value = bytes as f64;
    let mut unit = 0;
    while value >= 1024.0 && unit + 1 < UNITS.len() {
        value /= 1024.0;
        unit += 1;
    }
    if unit == 0 {
        format!("{bytes} B")
    } else {
        format!("{value:.2} {}", UNITS[unit])
    }
}
