//! Prefix-tree index with posting lists and subtree sizes.
//!
//! The trie is the uncompressed one: every distinct prefix of every item is a
//! node, and items hang off the depth-`L` node of their full sequence. Node
//! ids are assigned in breadth-first order with children in ascending symbol
//! order, so
//!
//! * all nodes of depth `j` form one contiguous id range (a "level");
//! * the children of a node are a contiguous id range;
//! * the items below a node form a contiguous range of the lexicographically
//!   sorted item array, so subtree sizes and posting lists are slices.
//!
//! Nodes are not stored one by one. With items sorted, a depth-`j` node starts
//! exactly at the sorted positions whose item differs from its predecessor
//! within the first `j` symbols. One bitvector per depth marks those
//! positions; rank and select on it translate between node ids and item
//! ranges, and the edge symbol of a node is read from its first item. The
//! index therefore costs about `N·L·(1 + log2 σ)` bits plus the item array,
//! independent of how many nodes the trie has.

mod bits;
mod packed;
mod query;
mod snapshot;

use std::ops::Range;

use serde::{Deserialize, Serialize};

use crate::dataset::{check_query_shape, Alphabet, Dataset, Symbol};
use crate::error::Result;
use bits::RankBits;
use packed::PackedSymbols;

pub use query::{Hit, Mode, QueryResult};
pub use snapshot::{SNAPSHOT_MAGIC, SNAPSHOT_VERSION};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct NodeId(u32);

impl NodeId {
    pub const ROOT: NodeId = NodeId(0);

    pub fn index(self) -> usize {
        self.0 as usize
    }
}

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "#{}", self.0)
    }
}

/// Shape of the dataset an index was built from.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DatasetMeta {
    pub items: usize,
    pub seq_len: usize,
    pub alphabet: Alphabet,
}

/// Result of walking a query down the trie.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Descent {
    /// Deepest node whose path equals the query's prefix.
    pub node: NodeId,
    /// Length of that prefix.
    pub depth: usize,
    /// Nodes on the root-to-`node` path; `path[j]` has depth `j`.
    pub path: Vec<NodeId>,
    /// Query positions examined, at most `L`.
    pub symbols_compared: usize,
}

/// Descent in terms of sorted item ranges; `ranges[j]` belongs to the
/// depth-`j` node on the path.
pub(crate) struct Walk {
    pub ranges: Vec<Range<usize>>,
    pub symbols_compared: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TrieIndex {
    meta: DatasetMeta,
    /// `level_start[j]..level_start[j + 1]` are the ids of depth-`j` nodes.
    /// Length `L + 2`.
    level_start: Vec<u32>,
    /// `starts[j - 1]` marks the sorted positions where a depth-`j` node begins.
    starts: Vec<RankBits>,
    /// Item symbols in sorted order, row-major.
    rows: PackedSymbols,
    /// Item indices in lexicographic order, ties by ascending index.
    items: Vec<u32>,
}

impl TrieIndex {
    /// Builds the trie for `dataset`.
    ///
    /// Items are sorted once and each adjacent pair's shared prefix length
    /// recorded. Level `j` marks every position whose shared prefix with its
    /// predecessor is shorter than `j`, so each level is the previous one plus
    /// the positions diverging at exactly depth `j - 1`. Total work is
    /// `O(N·L)` beyond the sort.
    pub fn build(dataset: &Dataset) -> TrieIndex {
        let n = dataset.len();
        let len = dataset.seq_len();
        let order = dataset.lexicographic_order();

        let mut rows = PackedSymbols::new(dataset.alphabet().bits_per_symbol());
        rows.reserve(n * len);
        for &i in &order {
            for &s in dataset.item(i as usize) {
                rows.push(s);
            }
        }

        // sorted positions grouped by the depth at which they diverge from
        // their predecessor; duplicates (divergence L) never start a node
        let mut by_depth: Vec<Vec<u32>> = vec![Vec::new(); len + 1];
        for (p, w) in order.windows(2).enumerate() {
            let d = crate::metric::common_prefix_len(
                dataset.item(w[0] as usize),
                dataset.item(w[1] as usize),
            );
            by_depth[d].push(p as u32 + 1);
        }

        let mut words = vec![0u64; n.div_ceil(64)];
        if n > 0 {
            words[0] = 1;
        }
        let mut level_start = Vec::with_capacity(len + 2);
        level_start.push(0u32);
        level_start.push(1u32);
        let mut starts = Vec::with_capacity(len);
        for fresh in by_depth.iter().take(len) {
            for &p in fresh {
                words[p as usize / 64] |= 1 << (p % 64);
            }
            let level = RankBits::from_words(n, words.clone());
            level_start.push(level_start.last().unwrap() + level.count_ones() as u32);
            starts.push(level);
        }
        rows.shrink_to_fit();

        TrieIndex {
            meta: DatasetMeta {
                items: n,
                seq_len: len,
                alphabet: dataset.alphabet(),
            },
            level_start,
            starts,
            rows,
            items: order,
        }
    }

    pub fn meta(&self) -> DatasetMeta {
        self.meta
    }

    pub fn seq_len(&self) -> usize {
        self.meta.seq_len
    }

    pub fn alphabet(&self) -> Alphabet {
        self.meta.alphabet
    }

    /// Number of indexed items `N`.
    pub fn len(&self) -> usize {
        self.meta.items
    }

    pub fn is_empty(&self) -> bool {
        self.meta.items == 0
    }

    /// Number of nodes, root included.
    pub fn node_count(&self) -> usize {
        self.level_start[self.meta.seq_len + 1] as usize
    }

    /// All node ids in breadth-first order.
    pub fn nodes(&self) -> impl Iterator<Item = NodeId> {
        (0..self.node_count() as u32).map(NodeId)
    }

    pub fn root(&self) -> NodeId {
        NodeId::ROOT
    }

    /// Ids of all nodes at `depth`.
    pub fn level(&self, depth: usize) -> impl Iterator<Item = NodeId> + '_ {
        (self.level_start[depth]..self.level_start[depth + 1]).map(NodeId)
    }

    pub fn depth(&self, node: NodeId) -> usize {
        self.level_start.partition_point(|&s| s <= node.0) - 1
    }

    #[inline]
    fn symbol_at(&self, pos: usize, column: usize) -> Symbol {
        self.rows.get(pos * self.meta.seq_len + column)
    }

    /// Id of the depth-`depth` node whose items start at sorted position `pos`.
    #[inline]
    fn node_at(&self, depth: usize, pos: usize) -> NodeId {
        let rank = if depth == 0 { 0 } else { self.starts[depth - 1].rank1(pos) };
        NodeId(self.level_start[depth] + rank as u32)
    }

    /// Sorted item range below a node at `depth` with in-level rank `rank`.
    fn range_at(&self, depth: usize, rank: usize) -> Range<usize> {
        let n = self.meta.items;
        if depth == 0 {
            return 0..n;
        }
        let level = &self.starts[depth - 1];
        let start = level.select1(rank).expect("rank within level");
        let end = level.select1(rank + 1).unwrap_or(n);
        start..end
    }

    #[inline]
    fn item_range(&self, node: NodeId) -> Range<usize> {
        let depth = self.depth(node);
        self.range_at(depth, (node.0 - self.level_start[depth]) as usize)
    }

    /// Symbol on the edge entering `node`; `None` for the root.
    pub fn edge_symbol(&self, node: NodeId) -> Option<Symbol> {
        if node == NodeId::ROOT {
            return None;
        }
        let depth = self.depth(node);
        Some(self.symbol_at(self.item_range(node).start, depth - 1))
    }

    /// Ranks of the children of a depth-`depth` node covering `range`.
    fn child_ranks(&self, depth: usize, range: &Range<usize>) -> Range<usize> {
        if depth == self.meta.seq_len {
            return 0..0;
        }
        let next = &self.starts[depth];
        next.rank1(range.start)..next.rank1(range.end)
    }

    /// Children in ascending symbol order.
    pub fn children(&self, node: NodeId) -> impl Iterator<Item = (Symbol, NodeId)> + '_ {
        let depth = self.depth(node);
        let range = self.item_range(node);
        let base = self.level_start.get(depth + 1).copied().unwrap_or(0);
        self.child_ranks(depth, &range).map(move |r| {
            let pos = self.starts[depth].select1(r).expect("child rank within level");
            (self.symbol_at(pos, depth), NodeId(base + r as u32))
        })
    }

    pub fn child_count(&self, node: NodeId) -> usize {
        let depth = self.depth(node);
        self.child_ranks(depth, &self.item_range(node)).len()
    }

    pub fn child(&self, node: NodeId, symbol: Symbol) -> Option<NodeId> {
        let depth = self.depth(node);
        if depth == self.meta.seq_len {
            return None;
        }
        let range = self.narrow(self.item_range(node), depth, symbol);
        (!range.is_empty()).then(|| self.node_at(depth + 1, range.start))
    }

    /// The part of `range` (items sharing a depth-`depth` prefix) whose next
    /// symbol is `symbol`.
    #[inline]
    fn narrow(&self, range: Range<usize>, depth: usize, symbol: Symbol) -> Range<usize> {
        let (lo, hi) = (range.start, range.end);
        let first = lo + partition(hi - lo, |i| self.symbol_at(lo + i, depth) < symbol);
        let end = first + partition(hi - first, |i| self.symbol_at(first + i, depth) <= symbol);
        first..end
    }

    /// `|T_v|`: number of items stored anywhere below `node`.
    pub fn subtree_size(&self, node: NodeId) -> usize {
        self.item_range(node).len()
    }

    /// All items below `node`, in lexicographic (= breadth-first leaf) order.
    pub fn subtree_items(&self, node: NodeId) -> &[u32] {
        &self.items[self.item_range(node)]
    }

    /// Items ending exactly at `node`; non-empty only at depth `L`.
    pub fn posting(&self, node: NodeId) -> &[u32] {
        if self.depth(node) == self.meta.seq_len {
            self.subtree_items(node)
        } else {
            &[]
        }
    }

    /// Walks `query` down from the root as far as it matches.
    pub fn descend(&self, query: &[Symbol]) -> Result<Descent> {
        check_query_shape(self.meta.alphabet, self.meta.seq_len, query)?;
        let walk = self.walk(query);
        let path: Vec<NodeId> = walk
            .ranges
            .iter()
            .enumerate()
            .map(|(depth, r)| self.node_at(depth, r.start))
            .collect();
        Ok(Descent {
            node: *path.last().expect("path holds the root"),
            depth: path.len() - 1,
            path,
            symbols_compared: walk.symbols_compared,
        })
    }

    /// Child lookup per query position until a symbol has no child.
    pub(crate) fn walk(&self, query: &[Symbol]) -> Walk {
        let mut ranges = Vec::with_capacity(self.meta.seq_len + 1);
        let mut range = 0..self.meta.items;
        ranges.push(range.clone());
        let mut compared = 0;
        for (depth, &symbol) in query.iter().enumerate() {
            compared += 1;
            range = self.narrow(range, depth, symbol);
            if range.is_empty() {
                break;
            }
            ranges.push(range.clone());
        }
        Walk {
            ranges,
            symbols_compared: compared,
        }
    }

    /// Heap bytes held by the index.
    pub fn heap_bytes(&self) -> usize {
        self.level_start.capacity() * std::mem::size_of::<u32>()
            + self.starts.capacity() * std::mem::size_of::<RankBits>()
            + self.starts.iter().map(RankBits::heap_bytes).sum::<usize>()
            + self.rows.heap_bytes()
            + self.items.capacity() * std::mem::size_of::<u32>()
    }

    /// Recovers the dataset the index was built from, item indices included.
    pub fn to_dataset(&self) -> Dataset {
        let len = self.meta.seq_len;
        let mut flat = vec![0 as Symbol; self.meta.items * len];
        for (pos, &item) in self.items.iter().enumerate() {
            let row = &mut flat[item as usize * len..(item as usize + 1) * len];
            for (column, slot) in row.iter_mut().enumerate() {
                *slot = self.symbol_at(pos, column);
            }
        }
        Dataset::from_flat(self.meta.alphabet, len, flat)
            .expect("index holds a valid dataset by construction")
    }
}

/// First `i` in `0..n` with `!pred(i)`, for `pred` true on a prefix.
#[inline]
fn partition(n: usize, pred: impl Fn(usize) -> bool) -> usize {
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

    fn dataset(sigma: u32, len: usize, rows: &[&[Symbol]]) -> Dataset {
        Dataset::from_rows(Alphabet::new(sigma).unwrap(), len, rows.iter().copied()).unwrap()
    }

    #[test]
    fn two_paths_sharing_first_node() {
        let idx = TrieIndex::build(&dataset(3, 2, &[&[0, 1], &[0, 2]]));
        assert_eq!(idx.node_count(), 4);
        assert_eq!(idx.node_count() - 1, 3);
        assert_eq!(idx.subtree_size(idx.root()), 2);
        let mid = idx.child(idx.root(), 0).unwrap();
        assert_eq!(idx.children(mid).map(|(s, _)| s).collect::<Vec<_>>(), vec![1, 2]);
    }

    #[test]
    fn two_paths_diverging_at_root() {
        // 4 non-root nodes when the paths share nothing
        let idx = TrieIndex::build(&dataset(3, 2, &[&[0, 1], &[1, 2]]));
        assert_eq!(idx.node_count() - 1, 4);
        assert_eq!(idx.subtree_size(idx.root()), 2);
    }

    #[test]
    fn identical_items_form_one_chain() {
        let rows: Vec<&[Symbol]> = vec![&[2, 0, 1]; 5];
        let idx = TrieIndex::build(&dataset(4, 3, &rows));
        assert_eq!(idx.node_count() - 1, 3);
        let leaf = idx.level(3).next().unwrap();
        assert_eq!(idx.posting(leaf), &[0, 1, 2, 3, 4]);
        assert_eq!(idx.subtree_size(idx.root()), 5);
    }

    #[test]
    fn empty_dataset_has_only_root() {
        let idx = TrieIndex::build(&Dataset::empty(Alphabet::new(2).unwrap(), 4).unwrap());
        assert_eq!(idx.node_count(), 1);
        assert_eq!(idx.subtree_size(idx.root()), 0);
        assert_eq!(idx.child_count(idx.root()), 0);
        let d = idx.descend(&[0, 1, 0, 1]).unwrap();
        assert_eq!((d.node, d.depth), (NodeId::ROOT, 0));
    }

    #[test]
    fn descend_examples() {
        let idx = TrieIndex::build(&dataset(10, 3, &[&[0, 1, 2], &[0, 1, 3]]));
        assert_eq!(idx.descend(&[0, 1, 9]).unwrap().depth, 2);
        assert_eq!(idx.descend(&[0, 1, 3]).unwrap().depth, 3);
        let miss = idx.descend(&[5, 1, 2]).unwrap();
        assert_eq!((miss.depth, miss.symbols_compared), (0, 1));
        assert!(idx.descend(&[0, 1]).is_err());
        assert!(idx.descend(&[0, 1, 10]).is_err());
    }

    #[test]
    fn posting_only_at_full_depth() {
        let idx = TrieIndex::build(&dataset(4, 2, &[&[3, 1], &[0, 2], &[3, 1]]));
        for node in (0..idx.node_count() as u32).map(NodeId) {
            if idx.depth(node) < 2 {
                assert!(idx.posting(node).is_empty());
            }
        }
        let leaf = idx.descend(&[3, 1]).unwrap().node;
        assert_eq!(idx.posting(leaf), &[0, 2]);
    }

    #[test]
    fn round_trips_dataset() {
        let ds = dataset(5, 3, &[&[4, 0, 1], &[0, 0, 0], &[4, 0, 1], &[4, 3, 2]]);
        assert_eq!(TrieIndex::build(&ds).to_dataset(), ds);
    }
}
