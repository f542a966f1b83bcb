//! Alphabets, fixed-length sequences and datasets.
//!
//! Symbols are small unsigned integers. A dataset fixes one alphabet and
//! one sequence length for all of its items; anything else is rejected at
//! construction time rather than padded.

use std::cmp::Ordering;
use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Symbol = u16;

/// Largest supported alphabet: every symbol must fit in a [`Symbol`].
pub const MAX_ALPHABET: u32 = 1 << 16;

/// Item indices are stored as `u32` everywhere, so datasets are capped below that.
pub const MAX_ITEMS: usize = u32::MAX as usize;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Alphabet(u32);

impl Alphabet {
    pub fn new(size: u32) -> Result<Self> {
        if !(2..=MAX_ALPHABET).contains(&size) {
            return Err(Error::invalid(format!(
                "alphabet size {size} outside [2, {MAX_ALPHABET}]"
            )));
        }
        Ok(Alphabet(size))
    }

    #[inline]
    pub fn size(self) -> u32 {
        self.0
    }

    #[inline]
    pub fn contains(self, symbol: Symbol) -> bool {
        u32::from(symbol) < self.0
    }

    /// Bits needed to store one symbol of this alphabet.
    pub fn bits_per_symbol(self) -> u32 {
        32 - (self.0 - 1).leading_zeros()
    }

    /// `σ^exp`, or `None` on overflow.
    pub fn checked_pow(self, exp: usize) -> Option<u64> {
        let exp = u32::try_from(exp).ok()?;
        u64::from(self.0).checked_pow(exp)
    }

    pub(crate) fn check_symbols(self, symbols: &[Symbol], what: &str) -> Result<()> {
        if let Some((pos, &s)) = symbols.iter().enumerate().find(|(_, &s)| !self.contains(s)) {
            return Err(Error::invalid(format!(
                "{what}: symbol {s} at position {pos} is outside alphabet of size {}",
                self.0
            )));
        }
        Ok(())
    }
}

impl fmt::Display for Alphabet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "σ={}", self.0)
    }
}

/// An owned sequence validated against an alphabet.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Sequence {
    alphabet: Alphabet,
    symbols: Vec<Symbol>,
}

impl Sequence {
    pub fn new(alphabet: Alphabet, symbols: Vec<Symbol>) -> Result<Self> {
        if symbols.is_empty() {
            return Err(Error::invalid("sequence must contain at least one symbol"));
        }
        alphabet.check_symbols(&symbols, "sequence")?;
        Ok(Sequence { alphabet, symbols })
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn symbols(&self) -> &[Symbol] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    pub fn into_symbols(self) -> Vec<Symbol> {
        self.symbols
    }
}

impl AsRef<[Symbol]> for Sequence {
    fn as_ref(&self) -> &[Symbol] {
        &self.symbols
    }
}

/// `N` sequences of length `L` over one alphabet, stored row-major.
///
/// Item `i` is the `i`-th row in insertion order; duplicates are allowed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Dataset {
    alphabet: Alphabet,
    len: usize,
    symbols: Vec<Symbol>,
}

impl Dataset {
    /// An empty dataset. Useful mostly as the degenerate case.
    pub fn empty(alphabet: Alphabet, len: usize) -> Result<Self> {
        Self::from_flat(alphabet, len, Vec::new())
    }

    pub fn from_flat(alphabet: Alphabet, len: usize, symbols: Vec<Symbol>) -> Result<Self> {
        if len == 0 {
            return Err(Error::invalid("sequence length L must be positive"));
        }
        if len > u32::MAX as usize {
            return Err(Error::invalid(format!("sequence length {len} too large")));
        }
        if symbols.len() % len != 0 {
            return Err(Error::invalid(format!(
                "{} symbols is not a whole number of rows of length {len}",
                symbols.len()
            )));
        }
        if symbols.len() / len >= MAX_ITEMS {
            return Err(Error::invalid("too many items for 32-bit item indices"));
        }
        for (row, chunk) in symbols.chunks_exact(len).enumerate() {
            alphabet.check_symbols(chunk, &format!("item {row}"))?;
        }
        Ok(Dataset {
            alphabet,
            len,
            symbols,
        })
    }

    pub fn from_rows<I, R>(alphabet: Alphabet, len: usize, rows: I) -> Result<Self>
    where
        I: IntoIterator<Item = R>,
        R: AsRef<[Symbol]>,
    {
        let mut symbols = Vec::new();
        for (i, row) in rows.into_iter().enumerate() {
            let row = row.as_ref();
            if row.len() != len {
                return Err(Error::invalid(format!(
                    "item {i} has length {}, expected {len}",
                    row.len()
                )));
            }
            symbols.extend_from_slice(row);
        }
        Self::from_flat(alphabet, len, symbols)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    /// The shared sequence length `L`.
    pub fn seq_len(&self) -> usize {
        self.len
    }

    /// Number of items `N`.
    pub fn len(&self) -> usize {
        self.symbols.len() / self.len
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    #[inline]
    pub fn item(&self, index: usize) -> &[Symbol] {
        &self.symbols[index * self.len..(index + 1) * self.len]
    }

    pub fn items(&self) -> std::slice::ChunksExact<'_, Symbol> {
        self.symbols.chunks_exact(self.len)
    }

    pub fn as_flat(&self) -> &[Symbol] {
        &self.symbols
    }

    /// Checks that `query` could be an item of this dataset.
    pub fn check_query(&self, query: &[Symbol]) -> Result<()> {
        check_query_shape(self.alphabet, self.len, query)
    }

    /// Item indices ordered lexicographically by symbols; equal items keep
    /// ascending index order.
    pub fn lexicographic_order(&self) -> Vec<u32> {
        let mut order: Vec<u32> = (0..self.len() as u32).collect();
        // stable, so equal rows stay in index order
        order.sort_by(|&a, &b| self.item(a as usize).cmp(self.item(b as usize)));
        order
    }

    /// Whether any two items are identical.
    pub fn has_duplicates(&self) -> bool {
        let order = self.lexicographic_order();
        order
            .windows(2)
            .any(|w| self.item(w[0] as usize).cmp(self.item(w[1] as usize)) == Ordering::Equal)
    }
}

pub(crate) fn check_query_shape(alphabet: Alphabet, len: usize, query: &[Symbol]) -> Result<()> {
    if query.len() != len {
        return Err(Error::invalid(format!(
            "query has length {}, expected {len}",
            query.len()
        )));
    }
    alphabet.check_symbols(query, "query")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn alpha(n: u32) -> Alphabet {
        Alphabet::new(n).unwrap()
    }

    #[test]
    fn alphabet_bounds() {
        assert!(Alphabet::new(1).is_err());
        assert!(Alphabet::new(2).is_ok());
        assert!(Alphabet::new(65_536).is_ok());
        assert!(Alphabet::new(65_537).is_err());
    }

    #[test]
    fn bits_per_symbol() {
        assert_eq!(alpha(2).bits_per_symbol(), 1);
        assert_eq!(alpha(3).bits_per_symbol(), 2);
        assert_eq!(alpha(4).bits_per_symbol(), 2);
        assert_eq!(alpha(5).bits_per_symbol(), 3);
        assert_eq!(alpha(256).bits_per_symbol(), 8);
        assert_eq!(alpha(65_536).bits_per_symbol(), 16);
    }

    #[test]
    fn rejects_ragged_rows() {
        let err = Dataset::from_rows(alpha(4), 3, [vec![0, 1, 2], vec![0, 1]]).unwrap_err();
        assert!(err.to_string().contains("item 1 has length 2"), "{err}");
    }

    #[test]
    fn rejects_out_of_alphabet_symbols() {
        let err = Dataset::from_rows(alpha(4), 2, [vec![0, 1], vec![4, 0]]).unwrap_err();
        assert!(err.to_string().contains("item 1"), "{err}");
        assert!(Sequence::new(alpha(2), vec![0, 2]).is_err());
    }

    #[test]
    fn zero_length_rejected() {
        assert!(Dataset::empty(alpha(2), 0).is_err());
        assert!(Sequence::new(alpha(2), vec![]).is_err());
    }

    #[test]
    fn lexicographic_order_is_stable() {
        let ds = Dataset::from_rows(alpha(3), 2, [[1, 0], [0, 2], [1, 0], [0, 1]]).unwrap();
        assert_eq!(ds.lexicographic_order(), vec![3, 1, 0, 2]);
        assert!(ds.has_duplicates());
    }

    #[test]
    fn query_shape_checked() {
        let ds = Dataset::empty(alpha(4), 3).unwrap();
        assert!(ds.check_query(&[0, 1, 3]).is_ok());
        assert!(ds.check_query(&[0, 1]).is_err());
        assert!(ds.check_query(&[0, 1, 4]).is_err());
    }
}
