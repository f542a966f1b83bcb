//! Deterministic work accounting.
//!
//! Hardware energy is replaced by a work-unit proxy:
//! `units = items_scanned * c_item + symbols_compared * c_sym`, with
//! `c_item = 1` and `c_sym = 1 / L`. Reported "joules" are these work units.

use std::time::Duration;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct CostModel {
    pub per_item: f64,
    pub per_symbol: f64,
}

impl CostModel {
    /// The standard model for sequences of length `seq_len`.
    pub fn for_seq_len(seq_len: usize) -> Self {
        CostModel {
            per_item: 1.0,
            per_symbol: 1.0 / seq_len.max(1) as f64,
        }
    }
}

/// Counters for one query stream.
///
/// Reports are plain accumulators; [`WorkReport::merge`] is associative and
/// commutative on the counters, so per-worker reports can be folded in any
/// fixed order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WorkReport {
    pub cost: CostModel,
    pub queries: u64,
    pub symbols_compared: u64,
    pub items_scanned: u64,
    pub nodes_visited: u64,
    pub cache_hits: u64,
    #[serde(skip)]
    pub elapsed: Duration,
}

impl WorkReport {
    pub fn new(cost: CostModel) -> Self {
        WorkReport {
            cost,
            queries: 0,
            symbols_compared: 0,
            items_scanned: 0,
            nodes_visited: 0,
            cache_hits: 0,
            elapsed: Duration::ZERO,
        }
    }

    pub fn energy_proxy_joules(&self) -> f64 {
        self.items_scanned as f64 * self.cost.per_item
            + self.symbols_compared as f64 * self.cost.per_symbol
    }

    /// Mean work units per query, or 0 for an empty stream.
    pub fn energy_per_query(&self) -> f64 {
        if self.queries == 0 {
            0.0
        } else {
            self.energy_proxy_joules() / self.queries as f64
        }
    }

    pub fn merge(&mut self, other: &WorkReport) -> Result<()> {
        if self.cost != other.cost {
            return Err(Error::invalid(
                "cannot merge work reports with different cost models",
            ));
        }
        self.queries += other.queries;
        self.symbols_compared += other.symbols_compared;
        self.items_scanned += other.items_scanned;
        self.nodes_visited += other.nodes_visited;
        self.cache_hits += other.cache_hits;
        self.elapsed += other.elapsed;
        Ok(())
    }

    /// Whether the counters (not the wall time) are all zero.
    pub fn is_zero_work(&self) -> bool {
        self.symbols_compared == 0 && self.items_scanned == 0 && self.nodes_visited == 0
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Reduction {
    pub ratio: f64,
    /// Set when the reduced stream did no work at all; `ratio` is then infinite
    /// (or 1.0 when the baseline did no work either).
    pub zero_work: bool,
}

/// `full / reduced` in work units.
pub fn work_reduction(full: &WorkReport, reduced: &WorkReport) -> Reduction {
    let num = full.energy_proxy_joules();
    let den = reduced.energy_proxy_joules();
    if den == 0.0 {
        let ratio = if num == 0.0 { 1.0 } else { f64::INFINITY };
        Reduction {
            ratio,
            zero_work: true,
        }
    } else {
        Reduction {
            ratio: num / den,
            zero_work: false,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn report(items: u64, syms: u64) -> WorkReport {
        let mut r = WorkReport::new(CostModel::for_seq_len(8));
        r.queries = 1;
        r.items_scanned = items;
        r.symbols_compared = syms;
        r
    }

    #[test]
    fn energy_proxy_formula() {
        assert_eq!(report(10, 16).energy_proxy_joules(), 12.0);
    }

    #[test]
    fn reduction_identity_and_zero() {
        let r = report(5, 3);
        let red = work_reduction(&r, &r);
        assert_eq!(red.ratio, 1.0);
        assert!(!red.zero_work);

        let z = report(0, 0);
        let red = work_reduction(&r, &z);
        assert!(red.ratio.is_infinite() && red.zero_work);
    }

    #[test]
    fn merge_rejects_mixed_models() {
        let mut a = report(1, 1);
        let b = WorkReport::new(CostModel::for_seq_len(4));
        assert!(a.merge(&b).is_err());
        a.merge(&report(2, 3)).unwrap();
        assert_eq!((a.queries, a.items_scanned, a.symbols_compared), (2, 3, 4));
    }

    #[test]
    fn doubling_range_doubles_items() {
        let mut a = report(7, 0);
        a.merge(&report(7, 0)).unwrap();
        assert_eq!(a.items_scanned, 14);
    }
}
