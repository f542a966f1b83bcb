//! Brute-force reference answers.
//!
//! Nothing here touches the trie or the bucketed engine: every answer comes
//! from a linear scan over the raw dataset.

use std::collections::BTreeSet;

use crate::dataset::{Dataset, Symbol};
use crate::error::{Error, Result};
use crate::metric::common_prefix_len;

/// `(item index, lcp)` pairs sorted by `(lcp desc, index asc)`, length `min(k, N)`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct OracleResult {
    pub hits: Vec<(u32, u32)>,
}

impl OracleResult {
    /// Best LCP value, if any item exists.
    pub fn top_lcp(&self) -> Option<u32> {
        self.hits.first().map(|&(_, lcp)| lcp)
    }
}

/// Exact top-`k` by direct comparison against every item.
pub fn oracle_top_k(dataset: &Dataset, query: &[Symbol], k: usize) -> Result<OracleResult> {
    dataset.check_query(query)?;
    if k == 0 {
        return Err(Error::invalid("k must be at least 1"));
    }
    let mut scored = Vec::with_capacity(dataset.len());
    for (i, item) in dataset.items().enumerate() {
        let mut j = 0;
        while j < item.len() && item[j] == query[j] {
            j += 1;
        }
        let shared = common_prefix_len(item, query);
        if shared != j {
            return Err(Error::Invariant(format!(
                "lcp disagreement on item {i}: scan {j}, metric {shared}"
            )));
        }
        scored.push((i as u32, j as u32));
    }
    scored.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));
    scored.truncate(k);
    Ok(OracleResult { hits: scored })
}

/// A query on which the two datasets give different top-1 answers, or `None`
/// when they hold the same set of sequences.
///
/// Both datasets must share `N`, `L` and the alphabet, and be free of
/// duplicates. The witness is the first item (in index order) of one set that
/// is missing from the other: it matches itself with LCP `L` on its own side
/// and nothing on the other side can reach `L`.
pub fn oracle_distinguish(first: &Dataset, second: &Dataset) -> Result<Option<Vec<Symbol>>> {
    if first.alphabet() != second.alphabet()
        || first.seq_len() != second.seq_len()
        || first.len() != second.len()
    {
        return Err(Error::invalid(
            "datasets must share item count, sequence length and alphabet",
        ));
    }
    if first.has_duplicates() || second.has_duplicates() {
        return Err(Error::invalid("datasets must not contain duplicate items"));
    }
    let a: BTreeSet<&[Symbol]> = first.items().collect();
    let b: BTreeSet<&[Symbol]> = second.items().collect();
    let witness = first
        .items()
        .find(|s| !b.contains(s))
        .or_else(|| second.items().find(|s| !a.contains(s)));
    Ok(witness.map(<[Symbol]>::to_vec))
}
