//! Whole-index self checks: structural invariants, oracle equivalence and
//! per-query work bounds. Every failure is an [`Error::Invariant`] naming the
//! node, bucket or query that broke.

use crate::dataset::{Dataset, Symbol};
use crate::error::{Error, Result};
use crate::oracle::oracle_top_k;
use crate::tal::TalEngine;
use crate::trie::{Mode, QueryResult, TrieIndex};
use crate::work::{CostModel, WorkReport};

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VerifySummary {
    pub nodes_checked: usize,
    pub buckets_checked: usize,
    pub queries_checked: usize,
}

/// Node bound, root size, subtree recurrence and child ordering.
pub fn check_structure(index: &TrieIndex) -> Result<usize> {
    let n = index.len();
    let l = index.seq_len();
    if index.node_count() > n * l + 1 {
        return Err(Error::Invariant(format!(
            "node_count {} exceeds N·L + 1 = {}",
            index.node_count(),
            n * l + 1
        )));
    }
    if index.subtree_size(index.root()) != n {
        return Err(Error::Invariant(format!(
            "root subtree size {} != N = {n}",
            index.subtree_size(index.root())
        )));
    }
    for v in index.nodes() {
        let depth = index.depth(v);
        let mut sum = index.posting(v).len();
        let mut prev: Option<Symbol> = None;
        for (symbol, child) in index.children(v) {
            if prev.is_some_and(|p| p >= symbol) {
                return Err(Error::Invariant(format!("node {}: children not strictly sorted", v)));
            }
            if index.depth(child) != depth + 1 {
                return Err(Error::Invariant(format!("node {}: child {} at wrong depth", v, child)));
            }
            prev = Some(symbol);
            sum += index.subtree_size(child);
        }
        if sum != index.subtree_size(v) {
            return Err(Error::Invariant(format!(
                "node {}: subtree size {} != posting + children = {sum}",
                v,
                index.subtree_size(v)
            )));
        }
        if depth < l && !index.posting(v).is_empty() {
            return Err(Error::Invariant(format!("node {}: posting above depth L", v)));
        }
    }
    Ok(index.node_count())
}

/// Buckets are contiguous, cover `[0, N)`, and hold exactly the rows with
/// their prefix. Returns the number of non-empty buckets.
pub fn check_buckets(engine: &TalEngine) -> Result<usize> {
    let d = engine.depth();
    let mut covered = 0;
    let mut buckets = 0;
    let mut pos = 0;
    while pos < engine.len() {
        let prefix = &engine.row(pos)[..d];
        let range = engine.bucket_range(prefix);
        if range.start != pos || range.is_empty() {
            return Err(Error::Invariant(format!(
                "bucket {prefix:?}: range {range:?} does not start at {pos}"
            )));
        }
        if range != engine.bucket_range_by_search(prefix) {
            return Err(Error::Invariant(format!("bucket {prefix:?}: directory and search disagree")));
        }
        if let Some(bad) = range.clone().find(|&p| &engine.row(p)[..d] != prefix) {
            return Err(Error::Invariant(format!("bucket {prefix:?}: row {bad} has another prefix")));
        }
        covered += range.len();
        buckets += 1;
        pos = range.end;
    }
    if covered != engine.len() {
        return Err(Error::Invariant(format!("buckets cover {covered} of {} rows", engine.len())));
    }
    if let Some(ranges) = engine.bucket_ranges() {
        let mut end = 0;
        for r in ranges {
            if r.start != end {
                return Err(Error::Invariant(format!("directory gap before {}", r.start)));
            }
            end = r.end;
        }
        if end != engine.len() {
            return Err(Error::Invariant(format!("directory ends at {end} of {}", engine.len())));
        }
    }
    Ok(buckets)
}

fn pairs(r: &QueryResult) -> Vec<(u32, u32)> {
    r.hits.iter().map(|h| (h.index, h.lcp)).collect()
}

/// One query against the oracle, in both trie modes and through TAL.
pub fn check_query(
    dataset: &Dataset,
    index: &TrieIndex,
    engine: &TalEngine,
    query: &[Symbol],
    k: usize,
) -> Result<()> {
    let l = dataset.seq_len();
    let cost = CostModel::for_seq_len(l);
    let fail = |what: String| Error::Invariant(format!("query {query:?}, k = {k}: {what}"));
    let expected = oracle_top_k(dataset, query, k)?;

    let mut work = WorkReport::new(cost);
    let complete = index.query_with_work(query, k, Mode::Complete, &mut work)?;
    if pairs(&complete) != expected.hits {
        return Err(fail(format!("complete {:?} != oracle {:?}", pairs(&complete), expected.hits)));
    }
    if work.symbols_compared > l as u64 {
        return Err(fail(format!("descent compared {} symbols", work.symbols_compared)));
    }

    let mut work = WorkReport::new(cost);
    let strict = index.query_with_work(query, k, Mode::Strict, &mut work)?;
    if strict.hits.len() > k || work.items_scanned > k as u64 {
        return Err(fail(format!("strict collected {} items", work.items_scanned)));
    }
    if work.symbols_compared > l as u64 {
        return Err(fail(format!("descent compared {} symbols", work.symbols_compared)));
    }
    // strict hits all share the deepest LCP and must be oracle ties at that level
    let top = expected.top_lcp();
    for h in &strict.hits {
        if Some(h.lcp) != top || h.lcp != strict.matched_depth {
            return Err(fail(format!("strict hit {h:?} below the best LCP {top:?}")));
        }
        if crate::metric::common_prefix_len(dataset.item(h.index as usize), query) != h.lcp as usize {
            return Err(fail(format!("strict hit {h:?} has the wrong LCP")));
        }
    }
    if strict.hits.len() != k.min(index.subtree_size(index.descend(query)?.node)) {
        return Err(fail("strict mode returned too few hits".into()));
    }

    let mut work = WorkReport::new(cost);
    let tal = engine.query_with_work(query, k, &mut work)?;
    let bucket = engine.bucket_range(&query[..engine.depth()]).len();
    if work.items_scanned > bucket as u64 {
        return Err(fail(format!("TAL scanned {} items of a {bucket}-item bucket", work.items_scanned)));
    }
    let floor = engine.depth() as u32;
    let expected_tal: Vec<(u32, u32)> = index
        .query(query, k, Mode::Complete)?
        .hits
        .iter()
        .filter(|h| h.lcp >= floor)
        .map(|h| (h.index, h.lcp))
        .collect();
    if pairs(&tal) != expected_tal {
        return Err(fail(format!("TAL {:?} != filtered complete {:?}", pairs(&tal), expected_tal)));
    }
    Ok(())
}

/// Builds index and TAL engine, then runs every check over `queries × ks`.
pub fn verify_dataset(
    dataset: &Dataset,
    queries: &[Vec<Symbol>],
    ks: &[usize],
    buckets: u64,
) -> Result<VerifySummary> {
    let index = TrieIndex::build(dataset);
    let engine = TalEngine::build(dataset, buckets)?;
    if index.to_dataset() != *dataset {
        return Err(Error::Invariant("index does not reproduce its dataset".into()));
    }
    let nodes_checked = check_structure(&index)?;
    let buckets_checked = check_buckets(&engine)?;
    let mut queries_checked = 0;
    for q in queries {
        for &k in ks {
            check_query(dataset, &index, &engine, q, k)?;
            queries_checked += 1;
        }
    }
    Ok(VerifySummary {
        nodes_checked,
        buckets_checked,
        queries_checked,
    })
}
