use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::{NodeId, TrieIndex};
use crate::dataset::{check_query_shape, Symbol};
use crate::error::{Error, Result};
use crate::work::{CostModel, WorkReport};

/// How far a trie query looks for hits.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    /// Only items below the deepest matched node; may return fewer than `k`.
    Strict,
    /// Backtracks through ancestors until `min(k, N)` hits are found.
    Complete,
}

impl Mode {
    fn tag(self) -> u8 {
        match self {
            Mode::Strict => 0,
            Mode::Complete => 1,
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Mode::Strict => "strict",
            Mode::Complete => "complete",
        })
    }
}

impl FromStr for Mode {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "strict" => Ok(Mode::Strict),
            "complete" => Ok(Mode::Complete),
            other => Err(Error::invalid(format!(
                "unknown mode {other:?} (expected strict or complete)"
            ))),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Hit {
    pub index: u32,
    pub lcp: u32,
}

/// Hits ordered by `(lcp desc, index asc)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct QueryResult {
    pub hits: Vec<Hit>,
    /// Depth reached by the descent (for range scans: the deepest hit).
    pub matched_depth: u32,
    pub mode: Mode,
}

impl QueryResult {
    pub fn empty(mode: Mode) -> Self {
        QueryResult {
            hits: Vec::new(),
            matched_depth: 0,
            mode,
        }
    }

    /// Canonical little-endian encoding:
    /// `mode: u8, matched_depth: u32, count: u32, (index: u32, lcp: u32)*`.
    pub fn write_bytes(&self, out: &mut Vec<u8>) {
        out.push(self.mode.tag());
        out.extend_from_slice(&self.matched_depth.to_le_bytes());
        out.extend_from_slice(&(self.hits.len() as u32).to_le_bytes());
        for hit in &self.hits {
            out.extend_from_slice(&hit.index.to_le_bytes());
            out.extend_from_slice(&hit.lcp.to_le_bytes());
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(9 + 8 * self.hits.len());
        self.write_bytes(&mut out);
        out
    }

    pub fn is_canonically_ordered(&self) -> bool {
        self.hits
            .windows(2)
            .all(|w| (w[0].lcp, w[1].index) > (w[1].lcp, w[0].index))
    }
}

impl TrieIndex {
    /// Up to `k` items from the subtree of `node`, in breadth-first order with
    /// children taken in ascending symbol order.
    ///
    /// Every posting list sits at depth `L`, so breadth-first emission visits
    /// the leaves of the subtree left to right, which is exactly the node's
    /// contiguous slice of the sorted item array. When `|T_v| <= k` the whole
    /// slice is returned without per-item budgeting.
    pub fn collect_top_k(&self, node: NodeId, k: usize) -> Vec<u32> {
        let items = self.subtree_items(node);
        if items.len() <= k {
            return items.to_vec();
        }
        items[..k].to_vec()
    }

    pub fn query(&self, query: &[Symbol], k: usize, mode: Mode) -> Result<QueryResult> {
        let mut work = WorkReport::new(CostModel::for_seq_len(self.seq_len()));
        self.query_with_work(query, k, mode, &mut work)
    }

    /// Like [`TrieIndex::query`], accumulating counters into `work`.
    pub fn query_with_work(
        &self,
        query: &[Symbol],
        k: usize,
        mode: Mode,
        work: &mut WorkReport,
    ) -> Result<QueryResult> {
        check_query_shape(self.alphabet(), self.seq_len(), query)?;
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        let walk = self.walk(query);
        work.queries += 1;
        work.symbols_compared += walk.symbols_compared as u64;
        work.nodes_visited += walk.ranges.len() as u64;

        let depth = (walk.ranges.len() - 1) as u32;
        let hits = match mode {
            Mode::Strict => {
                // breadth-first order below the node is its slice order
                let below = &self.items[walk.ranges[depth as usize].clone()];
                let mut found = below[..k.min(below.len())].to_vec();
                work.items_scanned += found.len() as u64;
                found.sort_unstable();
                found
                    .into_iter()
                    .map(|index| Hit { index, lcp: depth })
                    .collect()
            }
            Mode::Complete => self.collect_complete(&walk.ranges, k, work),
        };
        Ok(QueryResult {
            hits,
            matched_depth: depth,
            mode,
        })
    }

    /// Tiered collection: the matched subtree has LCP `d`; the part of an
    /// ancestor at depth `j < d` outside the query's path has LCP exactly `j`.
    fn collect_complete(&self, path: &[Range<usize>], k: usize, work: &mut WorkReport) -> Vec<Hit> {
        let want = k.min(self.len());
        let mut hits = Vec::with_capacity(want);
        let depth = path.len() - 1;
        self.push_tier(&[path[depth].clone(), 0..0], depth as u32, want, &mut hits, work);

        for j in (0..depth).rev() {
            if hits.len() == want {
                break;
            }
            work.nodes_visited += 1;
            let (outer, inner) = (&path[j], &path[j + 1]);
            self.push_tier(
                &[outer.start..inner.start, inner.end..outer.end],
                j as u32,
                want,
                &mut hits,
                work,
            );
        }
        hits
    }

    fn push_tier(
        &self,
        ranges: &[Range<usize>; 2],
        lcp: u32,
        want: usize,
        hits: &mut Vec<Hit>,
        work: &mut WorkReport,
    ) {
        let remaining = want - hits.len();
        if remaining == 0 {
            return;
        }
        let mut tier: Vec<u32> = ranges
            .iter()
            .flat_map(|r| self.items[r.clone()].iter().copied())
            .collect();
        work.items_scanned += tier.len() as u64;
        if tier.len() > remaining {
            // the tier ties on LCP; keep the smallest indices
            tier.select_nth_unstable(remaining);
            tier.truncate(remaining);
        }
        tier.sort_unstable();
        hits.extend(tier.into_iter().map(|index| Hit { index, lcp }));
    }
}
