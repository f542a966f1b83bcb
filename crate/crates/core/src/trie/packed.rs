use crate::dataset::Symbol;

/// Fixed-width bit-packed symbol column.
///
/// Each entry takes `width` bits (1..=16), so a binary alphabet costs one bit
/// per symbol instead of two bytes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub(crate) struct PackedSymbols {
    width: u32,
    len: usize,
    words: Vec<u64>,
}

impl PackedSymbols {
    pub fn new(width: u32) -> Self {
        assert!((1..=16).contains(&width), "symbol width {width} out of range");
        PackedSymbols {
            width,
            len: 0,
            words: Vec::new(),
        }
    }

    #[inline]
    fn mask(&self) -> u64 {
        (1u64 << self.width) - 1
    }

    pub fn push(&mut self, symbol: Symbol) {
        let value = u64::from(symbol);
        debug_assert!(value <= self.mask());
        let bit = self.len * self.width as usize;
        let (word, offset) = (bit / 64, (bit % 64) as u32);
        if word == self.words.len() {
            self.words.push(0);
        }
        self.words[word] |= value << offset;
        if offset + self.width > 64 {
            self.words.push(value >> (64 - offset));
        }
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, index: usize) -> Symbol {
        debug_assert!(index < self.len);
        let bit = index * self.width as usize;
        let (word, offset) = (bit / 64, (bit % 64) as u32);
        let mut value = self.words[word] >> offset;
        if offset + self.width > 64 {
            value |= self.words[word + 1] << (64 - offset);
        }
        (value & self.mask()) as Symbol
    }

    pub fn reserve(&mut self, entries: usize) {
        let bits = (self.len + entries) * self.width as usize;
        self.words.reserve(bits.div_ceil(64).saturating_sub(self.words.len()));
    }

    #[cfg(test)]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn shrink_to_fit(&mut self) {
        self.words.shrink_to_fit();
    }

    pub fn heap_bytes(&self) -> usize {
        self.words.capacity() * std::mem::size_of::<u64>()
    }
}
