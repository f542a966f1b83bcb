//! Versioned binary snapshot of a [`TrieIndex`].
//!
//! Layout, all integers little-endian:
//!
//! ```text
//! header:
//!   magic        8 bytes  "LCPKTRIE"
//!   version      u16
//!   widths       5 x u8   symbol, item index, node id, depth, count (bytes)
//!   items N      u64
//!   seq_len L    u32
//!   alphabet σ   u32
//!   node_count   u64
//! nodes, in id order:
//!   depth        u32
//!   posting_len  u32, then posting_len x item index (u32)
//!   child_count  u32, then child_count x (symbol u16, child id u32)
//! ```
//!
//! Ids are breadth-first, so the output is a pure function of the dataset.

use std::io::{self, Read, Write};

use super::packed::PackedSymbols;
use super::TrieIndex;
use crate::dataset::{Alphabet, Dataset, Symbol};
use crate::error::{Error, Result};

pub const SNAPSHOT_MAGIC: &[u8; 8] = b"LCPKTRIE";
pub const SNAPSHOT_VERSION: u16 = 1;

const SYMBOL_WIDTH: u8 = 2;
const INDEX_WIDTH: u8 = 4;
const NODE_ID_WIDTH: u8 = 4;
const DEPTH_WIDTH: u8 = 4;
const COUNT_WIDTH: u8 = 4;

impl TrieIndex {
    pub fn write_snapshot<W: Write>(&self, out: &mut W) -> io::Result<()> {
        out.write_all(SNAPSHOT_MAGIC)?;
        out.write_all(&SNAPSHOT_VERSION.to_le_bytes())?;
        out.write_all(&[
            SYMBOL_WIDTH,
            INDEX_WIDTH,
            NODE_ID_WIDTH,
            DEPTH_WIDTH,
            COUNT_WIDTH,
        ])?;
        out.write_all(&(self.meta.items as u64).to_le_bytes())?;
        out.write_all(&(self.meta.seq_len as u32).to_le_bytes())?;
        out.write_all(&self.meta.alphabet.size().to_le_bytes())?;
        out.write_all(&(self.node_count() as u64).to_le_bytes())?;

        // One sweep per level: node starts come from that level's bitvector,
        // children from the next level's, both in ascending position order.
        let n = self.meta.items;
        let len = self.meta.seq_len;
        let mut next_id = 1u32;
        let mut children: Vec<(Symbol, u32)> = Vec::new();
        for depth in 0..=len {
            let mut starts: Box<dyn Iterator<Item = usize>> = if depth == 0 {
                Box::new(std::iter::once(0))
            } else {
                Box::new(self.starts[depth - 1].ones())
            };
            let mut below = (depth < len).then(|| self.starts[depth].ones().peekable());
            let mut current = starts.next();
            while let Some(start) = current {
                current = starts.next();
                let end = current.unwrap_or(n);
                out.write_all(&(depth as u32).to_le_bytes())?;
                let posting = if depth == len { &self.items[start..end] } else { &[][..] };
                out.write_all(&(posting.len() as u32).to_le_bytes())?;
                for &item in posting {
                    out.write_all(&item.to_le_bytes())?;
                }
                children.clear();
                if let Some(below) = below.as_mut() {
                    while let Some(pos) = below.next_if(|&p| p < end) {
                        children.push((self.symbol_at(pos, depth), next_id));
                        next_id += 1;
                    }
                }
                out.write_all(&(children.len() as u32).to_le_bytes())?;
                for &(symbol, child) in &children {
                    out.write_all(&symbol.to_le_bytes())?;
                    out.write_all(&child.to_le_bytes())?;
                }
            }
        }
        Ok(())
    }

    pub fn to_snapshot_bytes(&self) -> Vec<u8> {
        let mut buf = Vec::new();
        self.write_snapshot(&mut buf)
            .expect("writing to a Vec cannot fail");
        buf
    }

    /// Decodes and fully validates a snapshot.
    pub fn read_snapshot<R: Read>(input: &mut R) -> Result<TrieIndex> {
        let mut r = Reader { inner: input, pos: 0 };

        let mut magic = [0u8; 8];
        r.fill(&mut magic, "magic")?;
        if &magic != SNAPSHOT_MAGIC {
            return Err(Error::format("header", "not an index snapshot (bad magic)"));
        }
        let version = r.u16("version")?;
        if version != SNAPSHOT_VERSION {
            return Err(Error::format(
                "header",
                format!("unsupported snapshot version {version}"),
            ));
        }
        let mut widths = [0u8; 5];
        r.fill(&mut widths, "field widths")?;
        if widths != [SYMBOL_WIDTH, INDEX_WIDTH, NODE_ID_WIDTH, DEPTH_WIDTH, COUNT_WIDTH] {
            return Err(Error::format(
                "header",
                format!("unsupported field widths {widths:?}"),
            ));
        }
        let n = r.u64("item count")?;
        let len = r.u32("sequence length")? as usize;
        let sigma = r.u32("alphabet size")?;
        let node_count = r.u64("node count")?;
        let alphabet = Alphabet::new(sigma).map_err(|e| Error::format("header", e.to_string()))?;
        if len == 0 {
            return Err(Error::format("header", "sequence length is zero"));
        }
        if n >= u64::from(u32::MAX) {
            return Err(Error::format("header", format!("item count {n} too large")));
        }
        let n = n as usize;
        if node_count == 0 || node_count > n as u64 * len as u64 + 1 {
            return Err(Error::format(
                "header",
                format!("node count {node_count} impossible for N={n}, L={len}"),
            ));
        }
        let node_count = node_count as usize;

        let mut symbols = PackedSymbols::new(alphabet.bits_per_symbol());
        symbols.push(0);
        let mut level_start: Vec<u32> = vec![0];
        let mut first_child: Vec<u32> = Vec::new();
        let mut leaf_start: Vec<u32> = Vec::new();
        // nothing is preallocated from header counts; a corrupt header must
        // not trigger huge allocations
        let mut items: Vec<u32> = Vec::new();
        let mut next_child: u64 = 1;
        let mut last_depth = 0usize;

        for v in 0..node_count {
            let at = |field: &str| format!("node {v} {field}");
            let depth = r.u32("node depth")? as usize;
            let expected = level_start.partition_point(|&s| s as usize <= v) - 1;
            if depth != expected || depth < last_depth {
                return Err(Error::format(
                    at("depth"),
                    format!("depth {depth}, expected {expected}"),
                ));
            }
            last_depth = depth;

            let posting_len = r.u32("posting length")? as usize;
            if (depth == len) != (posting_len > 0) {
                return Err(Error::format(
                    at("posting"),
                    format!("{posting_len} postings at depth {depth} (L={len})"),
                ));
            }
            if depth == len {
                leaf_start.push(items.len() as u32);
            }
            let mut prev: Option<u32> = None;
            for _ in 0..posting_len {
                let item = r.u32("posting entry")?;
                if item as usize >= n || items.len() == n {
                    return Err(Error::format(
                        at("posting"),
                        format!("item {item} out of range or too many postings"),
                    ));
                }
                if prev.is_some_and(|p| p >= item) {
                    return Err(Error::format(at("posting"), "posting list not ascending"));
                }
                prev = Some(item);
                items.push(item);
            }

            let child_count = r.u32("child count")? as usize;
            if depth < len {
                // every internal node leads to at least one item, except a lone
                // root of an empty index
                if child_count == 0 && !(v == 0 && n == 0) {
                    return Err(Error::format(at("children"), "internal node has no children"));
                }
                first_child.push(next_child as u32);
            } else if child_count != 0 {
                return Err(Error::format(at("children"), "node at depth L has children"));
            }
            let mut prev_symbol: Option<Symbol> = None;
            for c in 0..child_count {
                let symbol = r.u16("child symbol")?;
                let child = r.u32("child id")?;
                if !alphabet.contains(symbol) || prev_symbol.is_some_and(|p| p >= symbol) {
                    return Err(Error::format(
                        at("children"),
                        format!("child symbol {symbol} out of alphabet or order"),
                    ));
                }
                if u64::from(child) != next_child || child as usize >= node_count {
                    return Err(Error::format(
                        at("children"),
                        format!("child id {child}, expected {next_child}"),
                    ));
                }
                if c == 0 && level_start.len() == depth + 1 {
                    level_start.push(child);
                }
                prev_symbol = Some(symbol);
                symbols.push(symbol);
                next_child += 1;
            }
        }
        if next_child != node_count as u64 {
            return Err(Error::format(
                "nodes",
                format!("{next_child} nodes referenced, header says {node_count}"),
            ));
        }
        if items.len() != n {
            return Err(Error::format(
                "nodes",
                format!("{} items in postings, header says {n}", items.len()),
            ));
        }
        let mut sorted = items.clone();
        sorted.sort_unstable();
        if sorted.iter().enumerate().any(|(i, &item)| i as u32 != item) {
            return Err(Error::format("nodes", "postings are not a permutation of the items"));
        }
        drop(sorted);
        if n > 0 && level_start.len() != len + 1 {
            return Err(Error::format("nodes", "trie depth does not match L"));
        }
        let mut extra = [0u8; 1];
        if r.inner.read(&mut extra)? != 0 {
            return Err(Error::format(format!("byte {}", r.pos), "trailing data"));
        }

        while level_start.len() < len + 2 {
            level_start.push(node_count as u32);
        }
        first_child.push(level_start[len + 1]);

        // Item offsets: leaves from their posting position, internal nodes
        // from their first child, bottom-up.
        let mut item_start = vec![0u32; node_count + 1];
        let leaves = level_start[len] as usize..level_start[len + 1] as usize;
        for (v, &start) in leaves.zip(&leaf_start) {
            item_start[v] = start;
        }
        for v in (0..level_start[len] as usize).rev() {
            if first_child[v] < first_child[v + 1] {
                item_start[v] = item_start[first_child[v] as usize];
            }
        }
        drop(first_child);

        // Spell out every item from the edge symbols above it, then rebuild;
        // the result must reproduce the snapshot's node ids and item order.
        let mut flat = vec![0 as Symbol; n * len];
        for depth in 1..=len {
            for v in level_start[depth] as usize..level_start[depth + 1] as usize {
                let start = item_start[v];
                let next = item_start[v + 1];
                let end = if next > start { next as usize } else { n };
                let symbol = symbols.get(v);
                for &item in &items[start as usize..end] {
                    flat[item as usize * len + depth - 1] = symbol;
                }
            }
        }
        drop(item_start);
        drop(symbols);
        let dataset = Dataset::from_flat(alphabet, len, flat)
            .map_err(|e| Error::format("nodes", e.to_string()))?;
        let index = TrieIndex::build(&dataset);
        if index.items != items || index.node_count() != node_count {
            return Err(Error::format("nodes", "nodes do not form a canonical trie of their items"));
        }
        Ok(index)
    }

    pub fn from_snapshot_bytes(mut bytes: &[u8]) -> Result<TrieIndex> {
        Self::read_snapshot(&mut bytes)
    }
}

struct Reader<'a, R: Read> {
    inner: &'a mut R,
    pos: u64,
}

impl<R: Read> Reader<'_, R> {
    fn fill(&mut self, buf: &mut [u8], what: &str) -> Result<()> {
        self.inner.read_exact(buf).map_err(|e| {
            if e.kind() == io::ErrorKind::UnexpectedEof {
                Error::format(format!("byte {}", self.pos), format!("truncated while reading {what}"))
            } else {
                Error::Io(e)
            }
        })?;
        self.pos += buf.len() as u64;
        Ok(())
    }

    fn u16(&mut self, what: &str) -> Result<u16> {
        let mut b = [0u8; 2];
        self.fill(&mut b, what)?;
        Ok(u16::from_le_bytes(b))
    }

    fn u32(&mut self, what: &str) -> Result<u32> {
        let mut b = [0u8; 4];
        self.fill(&mut b, what)?;
        Ok(u32::from_le_bytes(b))
    }

    fn u64(&mut self, what: &str) -> Result<u64> {
        let mut b = [0u8; 8];
        self.fill(&mut b, what)?;
        Ok(u64::from_le_bytes(b))
    }
}
