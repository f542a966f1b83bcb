//! Plain bitvector with rank and select.
//!
//! Rank uses one cumulative count per 512-bit block (6.25% overhead); select
//! binary-searches those counts and finishes inside the block.

const BLOCK_WORDS: usize = 8;

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct RankBits {
    len: usize,
    words: Vec<u64>,
    /// Ones before each block, plus the total at the end.
    block_rank: Vec<u32>,
}

impl RankBits {
    pub fn from_words(len: usize, mut words: Vec<u64>) -> Self {
        debug_assert!(words.len() >= len.div_ceil(64));
        words.truncate(len.div_ceil(64));
        if len % 64 != 0 {
            if let Some(last) = words.last_mut() {
                *last &= (1u64 << (len % 64)) - 1;
            }
        }
        words.shrink_to_fit();
        let mut block_rank = Vec::with_capacity(words.len() / BLOCK_WORDS + 2);
        let mut total = 0u32;
        for block in words.chunks(BLOCK_WORDS) {
            block_rank.push(total);
            total += block.iter().map(|w| w.count_ones()).sum::<u32>();
        }
        block_rank.push(total);
        RankBits {
            len,
            words,
            block_rank,
        }
    }

    pub fn count_ones(&self) -> usize {
        *self.block_rank.last().unwrap_or(&0) as usize
    }

    #[cfg(test)]
    pub fn get(&self, pos: usize) -> bool {
        self.words[pos / 64] >> (pos % 64) & 1 == 1
    }

    /// Ones in `[0, pos)`.
    #[inline]
    pub fn rank1(&self, pos: usize) -> usize {
        debug_assert!(pos <= self.len);
        let word = pos / 64;
        let block = word / BLOCK_WORDS;
        let mut r = self.block_rank[block] as usize;
        for w in &self.words[block * BLOCK_WORDS..word] {
            r += w.count_ones() as usize;
        }
        if pos % 64 != 0 {
            r += (self.words[word] & ((1u64 << (pos % 64)) - 1)).count_ones() as usize;
        }
        r
    }

    /// Position of the one with rank `k` (0-based), if any.
    pub fn select1(&self, k: usize) -> Option<usize> {
        if k >= self.count_ones() {
            return None;
        }
        let k = k as u32;
        // last block whose prefix count is <= k
        let block = self.block_rank.partition_point(|&r| r <= k) - 1;
        let mut remaining = k - self.block_rank[block];
        for (i, &w) in self.words[block * BLOCK_WORDS..].iter().enumerate() {
            let ones = w.count_ones();
            if remaining < ones {
                return Some((block * BLOCK_WORDS + i) * 64 + select_in_word(w, remaining));
            }
            remaining -= ones;
        }
        unreachable!("block counts cover every one")
    }

    /// Positions of all ones, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let bit = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + bit)
            })
        })
    }

    pub fn heap_bytes(&self) -> usize {
        self.words.capacity() * 8 + self.block_rank.capacity() * 4
    }
}

fn select_in_word(mut w: u64, k: u32) -> usize {
    for _ in 0..k {
        w &= w - 1;
    }
    w.trailing_zeros() as usize
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn build(bits: &[bool]) -> RankBits {
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, &b) in bits.iter().enumerate() {
            if b {
                words[i / 64] |= 1 << (i % 64);
            }
        }
        RankBits::from_words(bits.len(), words)
    }

    #[test]
    fn empty() {
        let b = build(&[]);
        assert_eq!(b.rank1(0), 0);
        assert_eq!(b.select1(0), None);
        assert_eq!(b.ones().count(), 0);
    }

    #[test]
    fn stray_high_bits_are_cleared() {
        let b = RankBits::from_words(3, vec![u64::MAX]);
        assert_eq!(b.count_ones(), 3);
    }

    proptest! {
        #[test]
        fn rank_select_match_naive(bits in proptest::collection::vec(any::<bool>(), 0..2000)) {
            let b = build(&bits);
            let ones: Vec<usize> = (0..bits.len()).filter(|&i| bits[i]).collect();
            prop_assert_eq!(b.ones().collect::<Vec<_>>(), ones.clone());
            prop_assert_eq!(b.count_ones(), ones.len());
            for pos in 0..=bits.len() {
                prop_assert_eq!(b.rank1(pos), bits[..pos].iter().filter(|&&x| x).count());
            }
            for (k, &p) in ones.iter().enumerate() {
                prop_assert_eq!(b.select1(k), Some(p));
                prop_assert!(b.get(p));
            }
            prop_assert_eq!(b.select1(ones.len()), None);
        }
    }
}
