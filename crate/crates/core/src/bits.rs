//! Packed bit and integer storage shared by the bitvectors and the forest
//! headers. Bit `i` of a sequence lives in bit `i % 64` of word `i / 64`.

/// A growable, packed bit sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct BitBuf {
    words: Vec<u64>,
    len: usize,
}

impl BitBuf {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with_capacity(bits: usize) -> Self {
        BitBuf {
            words: Vec::with_capacity(bits.div_ceil(64)),
            len: 0,
        }
    }

    /// Wraps existing words; bits at or beyond `len` must be zero.
    pub fn from_words(mut words: Vec<u64>, len: usize) -> Self {
        words.resize(len.div_ceil(64), 0);
        if len % 64 != 0 {
            let last = words.len() - 1;
            words[last] &= (1u64 << (len % 64)) - 1;
        }
        BitBuf { words, len }
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    #[inline]
    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    #[inline]
    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn into_words(self) -> Vec<u64> {
        self.words
    }

    #[inline]
    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range for length {}", self.len);
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    #[inline]
    pub fn push(&mut self, bit: bool) {
        if self.len % 64 == 0 {
            self.words.push(0);
        }
        if bit {
            self.words[self.len / 64] |= 1 << (self.len % 64);
        }
        self.len += 1;
    }

    /// Appends the low `width` bits of `value`, least significant first.
    pub fn push_bits(&mut self, value: u64, width: u32) {
        debug_assert!(width <= 64);
        if width == 0 {
            return;
        }
        let value = if width == 64 { value } else { value & ((1u64 << width) - 1) };
        let shift = (self.len % 64) as u32;
        if shift == 0 {
            self.words.push(value);
        } else {
            let last = self.words.len() - 1;
            self.words[last] |= value << shift;
            if shift + width > 64 {
                self.words.push(value >> (64 - shift));
            }
        }
        self.len += width as usize;
    }

    pub fn push_u128(&mut self, value: u128, width: u32) {
        debug_assert!(width <= 128);
        if width > 64 {
            self.push_bits(value as u64, 64);
            self.push_bits((value >> 64) as u64, width - 64);
        } else {
            self.push_bits(value as u64, width);
        }
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }
}

impl FromIterator<bool> for BitBuf {
    fn from_iter<I: IntoIterator<Item = bool>>(iter: I) -> Self {
        let mut buf = BitBuf::new();
        for bit in iter {
            buf.push(bit);
        }
        buf
    }
}

/// Reads `width <= 64` bits starting at bit `pos`.
#[inline]
pub(crate) fn read_bits(words: &[u64], pos: usize, width: u32) -> u64 {
    if width == 0 {
        return 0;
    }
    let w = pos / 64;
    let shift = (pos % 64) as u32;
    let mut v = words[w] >> shift;
    if shift + width > 64 {
        v |= words[w + 1] << (64 - shift);
    }
    if width == 64 {
        v
    } else {
        v & ((1u64 << width) - 1)
    }
}

#[inline]
pub(crate) fn read_bits_u128(words: &[u64], pos: usize, width: u32) -> u128 {
    if width > 64 {
        read_bits(words, pos, 64) as u128 | (read_bits(words, pos + 64, width - 64) as u128) << 64
    } else {
        read_bits(words, pos, width) as u128
    }
}

/// Number of set bits among the `len` bits starting at `pos`.
pub(crate) fn count_ones_range(words: &[u64], pos: usize, len: usize) -> usize {
    let mut ones = 0;
    let mut at = pos;
    let end = pos + len;
    while at < end {
        let width = (end - at).min(64) as u32;
        ones += read_bits(words, at, width).count_ones() as usize;
        at += width as usize;
    }
    ones
}

/// Position of the `r`-th set bit of `word` (0-based `r`, `r < popcount`).
#[inline]
pub(crate) fn select_in_word(word: u64, r: u32) -> u32 {
    debug_assert!(r < word.count_ones());
    let mut r = r;
    let mut w = word;
    let mut base = 0;
    loop {
        let c = (w & 0xFF).count_ones();
        if r < c {
            break;
        }
        r -= c;
        w >>= 8;
        base += 8;
    }
    for _ in 0..r {
        w &= w - 1;
    }
    base + w.trailing_zeros()
}

#[inline]
pub(crate) fn select_in_u128(value: u128, r: u32) -> u32 {
    let lo = value as u64;
    let c = lo.count_ones();
    if r < c {
        select_in_word(lo, r)
    } else {
        64 + select_in_word((value >> 64) as u64, r - c)
    }
}

/// `ceil(log2(x))` for `x >= 1`; the width that holds every value below `x`.
#[inline]
pub(crate) fn ceil_log2(x: u64) -> u32 {
    debug_assert!(x >= 1);
    64 - (x - 1).leading_zeros()
}

/// Fixed-width packed unsigned integers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub(crate) struct IntVec {
    words: Vec<u64>,
    width: u32,
    len: usize,
}

impl IntVec {
    pub fn new(width: u32) -> Self {
        assert!(width <= 64);
        IntVec { words: Vec::new(), width, len: 0 }
    }

    pub fn from_parts(words: Vec<u64>, width: u32, len: usize) -> Option<Self> {
        if width > 64 || words.len() != (len * width as usize).div_ceil(64) {
            return None;
        }
        Some(IntVec { words, width, len })
    }

    pub fn push(&mut self, value: u64) {
        debug_assert!(self.width == 64 || value >> self.width == 0, "{value} exceeds width {}", self.width);
        let pos = self.len * self.width as usize;
        let needed = (pos + self.width as usize).div_ceil(64);
        self.words.resize(needed, 0);
        if self.width > 0 {
            let w = pos / 64;
            let shift = (pos % 64) as u32;
            self.words[w] |= value << shift;
            if shift + self.width > 64 {
                self.words[w + 1] |= value >> (64 - shift);
            }
        }
        self.len += 1;
    }

    #[inline]
    pub fn get(&self, i: usize) -> u64 {
        debug_assert!(i < self.len);
        read_bits(&self.words, i * self.width as usize, self.width)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn push_and_read_across_word_boundaries() {
        let mut buf = BitBuf::new();
        buf.push_bits(0b101, 3);
        buf.push_bits(u64::MAX, 64);
        buf.push_bits(0x1234, 13);
        assert_eq!(buf.len(), 80);
        assert_eq!(read_bits(buf.words(), 0, 3), 0b101);
        assert_eq!(read_bits(buf.words(), 3, 64), u64::MAX);
        assert_eq!(read_bits(buf.words(), 67, 13), 0x1234 & 0x1FFF);
    }

    #[test]
    fn select_in_word_matches_scan() {
        let words = [1u64, u64::MAX, 0x8000_0000_0000_0001, 0xF0F0_1234_0000_8000];
        for &w in &words {
            let expected: Vec<u32> = (0..64).filter(|b| w >> b & 1 == 1).collect();
            for (r, &pos) in expected.iter().enumerate() {
                assert_eq!(select_in_word(w, r as u32), pos);
            }
        }
    }

    #[test]
    fn int_vec_roundtrip() {
        let mut v = IntVec::new(7);
        for i in 0..100u64 {
            v.push(i % 128);
        }
        for i in 0..100 {
            assert_eq!(v.get(i), i as u64 % 128);
        }
        let zero = {
            let mut z = IntVec::new(0);
            z.push(0);
            z
        };
        assert_eq!(zero.get(0), 0);
    }

    #[test]
    fn ceil_log2_values() {
        assert_eq!(ceil_log2(1), 0);
        assert_eq!(ceil_log2(2), 1);
        assert_eq!(ceil_log2(63), 6);
        assert_eq!(ceil_log2(64), 6);
        assert_eq!(ceil_log2(1 << 20), 20);
        assert_eq!(ceil_log2(1 << 32), 32);
    }
}
