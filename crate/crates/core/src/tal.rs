//! Prefix-bucketed range scans.
//!
//! Items are sorted lexicographically once. With bucket depth `d`, every
//! prefix `p` of length `d` owns one contiguous half-open range of the sorted
//! array, and a query scans only the range of its own `d`-prefix. On uniform
//! data that range holds about `N / σ^d` items.

use std::cmp::Reverse;
use std::collections::BinaryHeap;
use std::ops::Range;

use crate::dataset::{check_query_shape, Alphabet, Dataset, Symbol};
use crate::error::{Error, Result};
use crate::metric::common_prefix_len;
use crate::trie::{Hit, Mode, QueryResult};
use crate::work::{CostModel, WorkReport};

/// Largest dense bucket directory, in entries. Deeper configurations locate
/// buckets by binary search alone.
pub const DIRECTORY_CAP: u64 = 1 << 24;

#[derive(Clone, Debug)]
pub struct TalEngine {
    alphabet: Alphabet,
    len: usize,
    depth: usize,
    bucket_count: u64,
    /// Rows in ascending lexicographic order, flattened.
    sorted: Vec<Symbol>,
    /// Original item index of each sorted row.
    indices: Vec<u32>,
    /// `directory[p]..directory[p + 1]` is the range of prefix code `p`.
    directory: Option<Vec<u32>>,
}

/// Smallest `d` with `σ^d >= buckets`.
pub fn bucket_depth(alphabet: Alphabet, buckets: u64) -> usize {
    let sigma = u64::from(alphabet.size());
    let (mut depth, mut reach) = (0usize, 1u64);
    while reach < buckets {
        reach = reach.saturating_mul(sigma);
        depth += 1;
    }
    depth
}

impl TalEngine {
    /// Sorts the dataset and builds the bucket directory for at least
    /// `buckets` buckets. The effective count is `σ^d`.
    pub fn build(dataset: &Dataset, buckets: u64) -> Result<TalEngine> {
        if buckets == 0 {
            return Err(Error::invalid("bucket count must be at least 1"));
        }
        let alphabet = dataset.alphabet();
        let len = dataset.seq_len();
        let depth = bucket_depth(alphabet, buckets);
        if depth > len {
            return Err(Error::invalid(format!(
                "{buckets} buckets need prefix depth {depth}, longer than L={len}"
            )));
        }
        let bucket_count = alphabet
            .checked_pow(depth)
            .ok_or_else(|| Error::invalid("bucket count overflows"))?;

        let order = dataset.lexicographic_order();
        let mut sorted = Vec::with_capacity(dataset.as_flat().len());
        for &i in &order {
            sorted.extend_from_slice(dataset.item(i as usize));
        }

        let mut engine = TalEngine {
            alphabet,
            len,
            depth,
            bucket_count,
            sorted,
            indices: order,
            directory: None,
        };
        if bucket_count <= DIRECTORY_CAP {
            let mut counts = vec![0u32; bucket_count as usize + 1];
            for pos in 0..engine.indices.len() {
                let code = engine.prefix_code(&engine.row(pos)[..depth]);
                counts[code as usize + 1] += 1;
            }
            for p in 0..bucket_count as usize {
                counts[p + 1] += counts[p];
            }
            engine.directory = Some(counts);
        }
        Ok(engine)
    }

    pub fn depth(&self) -> usize {
        self.depth
    }

    /// Effective bucket count `σ^d`.
    pub fn bucket_count(&self) -> u64 {
        self.bucket_count
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn seq_len(&self) -> usize {
        self.len
    }

    pub fn has_directory(&self) -> bool {
        self.directory.is_some()
    }

    /// The `pos`-th row of the sorted array.
    #[inline]
    pub fn row(&self, pos: usize) -> &[Symbol] {
        &self.sorted[pos * self.len..(pos + 1) * self.len]
    }

    /// Original dataset index of the `pos`-th sorted row.
    pub fn original_index(&self, pos: usize) -> u32 {
        self.indices[pos]
    }

    fn prefix_code(&self, prefix: &[Symbol]) -> u64 {
        let sigma = u64::from(self.alphabet.size());
        prefix
            .iter()
            .fold(0u64, |acc, &s| acc * sigma + u64::from(s))
    }

    /// Range of the bucket whose prefix is `prefix` (length `d`).
    pub fn bucket_range(&self, prefix: &[Symbol]) -> Range<usize> {
        match &self.directory {
            Some(dir) => {
                let code = self.prefix_code(prefix) as usize;
                dir[code] as usize..dir[code + 1] as usize
            }
            None => self.bucket_range_by_search(prefix),
        }
    }

    /// Same range as [`TalEngine::bucket_range`], found by binary search over
    /// the sorted rows without the directory.
    pub fn bucket_range_by_search(&self, prefix: &[Symbol]) -> Range<usize> {
        let d = prefix.len();
        let n = self.indices.len();
        let lo = partition_point(n, |pos| &self.row(pos)[..d] < prefix);
        let hi = lo + partition_point(n - lo, |off| &self.row(lo + off)[..d] <= prefix);
        lo..hi
    }

    /// Every bucket's range, in prefix order. Requires the directory.
    pub fn bucket_ranges(&self) -> Option<impl Iterator<Item = Range<usize>> + '_> {
        self.directory
            .as_ref()
            .map(|dir| dir.windows(2).map(|w| w[0] as usize..w[1] as usize))
    }

    pub fn query(&self, query: &[Symbol], k: usize) -> Result<(QueryResult, WorkReport)> {
        let mut work = WorkReport::new(CostModel::for_seq_len(self.len));
        let result = self.query_with_work(query, k, &mut work)?;
        Ok((result, work))
    }

    /// Scans the query's bucket and keeps the best `k` by `(lcp desc, index asc)`.
    ///
    /// Rows in the bucket agree with the query on the first `d` symbols, so
    /// comparison starts at position `d`.
    pub fn query_with_work(
        &self,
        query: &[Symbol],
        k: usize,
        work: &mut WorkReport,
    ) -> Result<QueryResult> {
        check_query_shape(self.alphabet, self.len, query)?;
        if k == 0 {
            return Err(Error::invalid("k must be at least 1"));
        }
        let d = self.depth;
        let range = self.bucket_range(&query[..d]);
        work.queries += 1;
        work.items_scanned += range.len() as u64;

        let tail = &query[d..];
        let mut compared = 0u64;
        // max-heap on the ordering key: the worst kept hit sits on top
        let mut best: BinaryHeap<(Reverse<u32>, u32)> = BinaryHeap::with_capacity(k + 1);
        for pos in range {
            let row_tail = &self.row(pos)[d..];
            let shared = common_prefix_len(row_tail, tail);
            compared += (shared + usize::from(shared < tail.len())) as u64;
            let key = (Reverse((d + shared) as u32), self.indices[pos]);
            if best.len() < k {
                best.push(key);
            } else if key < *best.peek().expect("heap holds k >= 1 entries") {
                best.pop();
                best.push(key);
            }
        }
        work.symbols_compared += compared;

        let hits: Vec<Hit> = best
            .into_sorted_vec()
            .into_iter()
            .map(|(Reverse(lcp), index)| Hit { index, lcp })
            .collect();
        Ok(QueryResult {
            matched_depth: hits.first().map_or(0, |h| h.lcp),
            hits,
            mode: Mode::Strict,
        })
    }

    pub fn heap_bytes(&self) -> usize {
        self.sorted.capacity() * std::mem::size_of::<Symbol>()
            + self.indices.capacity() * 4
            + self.directory.as_ref().map_or(0, |d| d.capacity() * 4)
    }
}

fn partition_point(n: usize, mut pred: impl FnMut(usize) -> bool) -> usize {
    let (mut lo, mut hi) = (0, n);
    while lo < hi {
        let mid = lo + (hi - lo) / 2;
        if pred(mid) {
            lo = mid + 1;
        } else {
            hi = mid;
        }
    }
    lo
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(n: u32) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    fn small() -> Dataset {
        let rows: [[Symbol; 3]; 6] = [[1, 0, 1], [0, 1, 1], [1, 1, 0], [0, 0, 0], [1, 0, 0], [0, 1, 1]];
        Dataset::from_rows(alpha(2), 3, rows).unwrap()
    }

    #[test]
    fn depth_from_bucket_count() {
        assert_eq!(bucket_depth(alpha(2), 1), 0);
        assert_eq!(bucket_depth(alpha(2), 256), 8);
        assert_eq!(bucket_depth(alpha(2), 257), 9);
        assert_eq!(bucket_depth(alpha(4), 16), 2);
        assert_eq!(bucket_depth(alpha(3), 10), 3);
    }

    #[test]
    fn binary_256_buckets() {
        let ds = Dataset::from_rows(alpha(2), 10, [[0u16; 10]]).unwrap();
        let e = TalEngine::build(&ds, 256).unwrap();
        assert_eq!(e.depth(), 8);
        assert_eq!(e.bucket_count(), 256);
        assert_eq!(e.bucket_ranges().unwrap().count(), 256);
    }

    #[test]
    fn single_bucket_spans_everything() {
        let e = TalEngine::build(&small(), 1).unwrap();
        assert_eq!(e.depth(), 0);
        assert_eq!(e.bucket_range(&[]), 0..6);
    }

    #[test]
    fn too_many_buckets_rejected() {
        assert!(TalEngine::build(&small(), 9).is_err());
        assert!(TalEngine::build(&small(), 8).is_ok());
        assert!(TalEngine::build(&small(), 0).is_err());
    }

    #[test]
    fn empty_bucket_scans_nothing() {
        let rows: [[Symbol; 2]; 2] = [[0, 0], [0, 1]];
        let ds = Dataset::from_rows(alpha(3), 2, rows).unwrap();
        let e = TalEngine::build(&ds, 3).unwrap();
        let (r, w) = e.query(&[2, 0], 5).unwrap();
        assert!(r.hits.is_empty());
        assert_eq!((w.items_scanned, w.symbols_compared), (0, 0));
    }

    #[test]
    fn scan_stays_in_bucket() {
        let e = TalEngine::build(&small(), 2).unwrap();
        let (r, w) = e.query(&[0, 1, 0], 10).unwrap();
        assert_eq!(w.items_scanned, 3);
        let got: Vec<(u32, u32)> = r.hits.iter().map(|h| (h.index, h.lcp)).collect();
        assert_eq!(got, vec![(1, 2), (5, 2), (3, 1)]);
        assert_eq!(r.matched_depth, 2);
    }

    #[test]
    fn directory_agrees_with_search() {
        let e = TalEngine::build(&small(), 4).unwrap();
        for a in 0..2 {
            for b in 0..2 {
                assert_eq!(e.bucket_range(&[a, b]), e.bucket_range_by_search(&[a, b]));
            }
        }
    }

    #[test]
    fn no_directory_beyond_cap() {
        let ds = Dataset::from_rows(alpha(65_536), 2, [[7u16, 9], [7, 3], [1, 1]]).unwrap();
        let e = TalEngine::build(&ds, 1 << 20).unwrap();
        assert_eq!(e.depth(), 2);
        assert!(!e.has_directory());
        assert_eq!(e.bucket_range(&[7, 3]), 1..2);
        let (r, _) = e.query(&[7, 3], 1).unwrap();
        assert_eq!(r.hits, vec![Hit { index: 1, lcp: 2 }]);
    }
}
