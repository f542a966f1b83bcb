//! Memoized trie queries.

use std::collections::hash_map::DefaultHasher;
use std::collections::HashMap;
use std::hash::BuildHasherDefault;
use std::sync::Arc;

use crate::dataset::Symbol;
use crate::error::Result;
use crate::trie::{Mode, QueryResult, TrieIndex};
use crate::work::WorkReport;

// Fixed-key SipHash: same hashing on every run.
type FixedState = BuildHasherDefault<DefaultHasher>;

/// Cache of query results keyed on `(query, k, mode)`.
///
/// Takes `&mut self`, so each worker owns its own cache. Cached results are
/// immutable and shared through `Arc`.
type Slot = HashMap<Box<[Symbol]>, Arc<QueryResult>, FixedState>;

#[derive(Debug, Default)]
pub struct QueryCache {
    by_params: HashMap<(usize, Mode), Slot, FixedState>,
    hits: u64,
    misses: u64,
}

impl QueryCache {
    pub fn new() -> Self {
        Self::default()
    }

    /// Returns the stored result for `(query, k, mode)`, computing and storing
    /// it on first use. A hit adds one query and one cache hit to `work` and
    /// nothing else.
    pub fn query(
        &mut self,
        index: &TrieIndex,
        query: &[Symbol],
        k: usize,
        mode: Mode,
        work: &mut WorkReport,
    ) -> Result<Arc<QueryResult>> {
        let slot = self.by_params.entry((k, mode)).or_default();
        if let Some(found) = slot.get(query) {
            self.hits += 1;
            work.queries += 1;
            work.cache_hits += 1;
            return Ok(Arc::clone(found));
        }
        let result = Arc::new(index.query_with_work(query, k, mode, work)?);
        self.misses += 1;
        slot.insert(query.into(), Arc::clone(&result));
        Ok(result)
    }

    pub fn hits(&self) -> u64 {
        self.hits
    }

    pub fn misses(&self) -> u64 {
        self.misses
    }

    pub fn len(&self) -> usize {
        self.by_params.values().map(HashMap::len).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn clear(&mut self) {
        self.by_params.clear();
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dataset::{Alphabet, Dataset};
    use crate::work::CostModel;

    fn index() -> TrieIndex {
        let rows: [[Symbol; 3]; 4] = [[0, 1, 2], [0, 1, 3], [3, 3, 3], [0, 2, 2]];
        TrieIndex::build(&Dataset::from_rows(Alphabet::new(4).unwrap(), 3, rows).unwrap())
    }

    #[test]
    fn second_call_is_free_and_identical() {
        let idx = index();
        let mut cache = QueryCache::new();
        let mut cold = WorkReport::new(CostModel::for_seq_len(3));
        let first = cache.query(&idx, &[0, 1, 0], 2, Mode::Complete, &mut cold).unwrap();
        assert!(cold.symbols_compared > 0);

        let mut hot = WorkReport::new(CostModel::for_seq_len(3));
        let second = cache.query(&idx, &[0, 1, 0], 2, Mode::Complete, &mut hot).unwrap();
        assert_eq!(first.to_bytes(), second.to_bytes());
        assert_eq!(hot.symbols_compared, 0);
        assert_eq!(hot.items_scanned, 0);
        assert_eq!(hot.nodes_visited, 0);
        assert_eq!((hot.queries, hot.cache_hits), (1, 1));
        assert_eq!((cache.hits(), cache.misses()), (1, 1));
    }

    #[test]
    fn key_includes_k_and_mode() {
        let idx = index();
        let mut cache = QueryCache::new();
        let mut work = WorkReport::new(CostModel::for_seq_len(3));
        let q = [0, 1, 0];
        let a = cache.query(&idx, &q, 1, Mode::Complete, &mut work).unwrap();
        let b = cache.query(&idx, &q, 3, Mode::Complete, &mut work).unwrap();
        let c = cache.query(&idx, &q, 3, Mode::Strict, &mut work).unwrap();
        assert_eq!(cache.len(), 3);
        assert_eq!(a.hits.len(), 1);
        assert_eq!(b.hits.len(), 3);
        assert_eq!(c.hits.len(), 2);
        assert_eq!(cache.hits(), 0);
    }

    #[test]
    fn errors_are_not_cached() {
        let idx = index();
        let mut cache = QueryCache::new();
        let mut work = WorkReport::new(CostModel::for_seq_len(3));
        assert!(cache.query(&idx, &[0, 1], 1, Mode::Strict, &mut work).is_err());
        assert!(cache.is_empty());
    }
}
