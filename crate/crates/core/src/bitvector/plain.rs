use crate::bits::{select_in_word, BitBuf};
use crate::error::{Error, Result};
use crate::serial::{Reader, Writer};

use super::RankSelect;

/// Geometry of the plain rank/select directory.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct PlainConfig {
    /// Words per rank superblock; a power of two, at most 512 so relative
    /// counts fit in 16 bits.
    pub superblock_words: usize,
    /// Every `select_sample`-th set (and unset) bit position is sampled.
    pub select_sample: usize,
}

impl Default for PlainConfig {
    fn default() -> Self {
        PlainConfig { superblock_words: 8, select_sample: 8192 }
    }
}

impl PlainConfig {
    fn validate(&self) -> Result<()> {
        if !self.superblock_words.is_power_of_two() || self.superblock_words > 512 {
            return Err(Error::param(format!(
                "superblock_words must be a power of two <= 512, got {}",
                self.superblock_words
            )));
        }
        if self.select_sample == 0 {
            return Err(Error::param("select_sample must be positive"));
        }
        Ok(())
    }
}

/// Uncompressed bitvector with a two-level rank directory and sampled select.
#[derive(Clone, Debug)]
pub struct PlainBitVector {
    /// One zero word past the end so `rank1(len)` never needs a special case.
    words: Vec<u64>,
    len: usize,
    ones: usize,
    config: PlainConfig,
    /// `log2(superblock_words)`.
    sb_shift: u32,
    /// Set bits before each superblock; one trailing entry holding the total.
    sb_ranks: Vec<u64>,
    /// Set bits before each word, relative to its superblock.
    word_ranks: Vec<u16>,
    /// 0-based position of the (k·sample + 1)-th set bit.
    samples1: Vec<u64>,
    samples0: Vec<u64>,
}

impl PlainBitVector {
    pub fn new(bits: &BitBuf) -> Self {
        Self::with_config(bits, PlainConfig::default()).expect("default config is valid")
    }

    pub fn with_config(bits: &BitBuf, config: PlainConfig) -> Result<Self> {
        config.validate()?;
        let len = bits.len();
        let mut words = bits.words().to_vec();
        words.resize(len / 64 + 1, 0);
        let mut bv = PlainBitVector {
            words,
            len,
            ones: 0,
            config,
            sb_shift: config.superblock_words.trailing_zeros(),
            sb_ranks: Vec::new(),
            word_ranks: Vec::new(),
            samples1: Vec::new(),
            samples0: Vec::new(),
        };
        bv.build_directory();
        Ok(bv)
    }

    fn build_directory(&mut self) {
        let sbw = self.config.superblock_words;
        let rate = self.config.select_sample;
        let mut total = 0u64;
        let mut in_sb = 0u64;
        let mut next1 = 1u64;
        let mut next0 = 1u64;
        self.sb_ranks = Vec::with_capacity(self.words.len() / sbw + 2);
        self.word_ranks = Vec::with_capacity(self.words.len());
        for (w, &word) in self.words.iter().enumerate() {
            if w % sbw == 0 {
                self.sb_ranks.push(total);
                in_sb = 0;
            }
            self.word_ranks.push(in_sb as u16);
            let valid = (self.len - (w * 64).min(self.len)).min(64) as u32;
            let c = word.count_ones() as u64;
            let z = valid as u64 - c;
            while next1 <= total + c {
                let bit = select_in_word(word, (next1 - total - 1) as u32);
                self.samples1.push((w * 64) as u64 + bit as u64);
                next1 += rate as u64;
            }
            let zeros_before = (w * 64) as u64 - total;
            while next0 <= zeros_before + z {
                let bit = select_in_word(!word, (next0 - zeros_before - 1) as u32);
                self.samples0.push((w * 64) as u64 + bit as u64);
                next0 += rate as u64;
            }
            total += c;
            in_sb += c;
        }
        self.sb_ranks.push(total);
        self.ones = total as usize;
    }

    pub fn config(&self) -> PlainConfig {
        self.config
    }

    #[inline]
    fn zeros_before_sb(&self, sb: usize) -> u64 {
        let bits = (sb * self.config.superblock_words * 64).min(self.len) as u64;
        bits - self.sb_ranks[sb]
    }

    /// Superblock range `[lo, hi]` holding the `r`-th sampled occurrence.
    #[inline]
    fn sample_range(&self, samples: &[u64], r: usize) -> (usize, usize) {
        let k = (r - 1) / self.config.select_sample;
        let sb_bits = self.config.superblock_words * 64;
        let lo = samples[k] as usize / sb_bits;
        let hi = match samples.get(k + 1) {
            Some(&p) => p as usize / sb_bits,
            None => self.sb_ranks.len() - 2,
        };
        (lo, hi)
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.len as u64);
        w.u32(self.config.superblock_words as u32);
        w.u32(self.config.select_sample as u32);
        w.u64s(&self.words);
        w.u64s(&self.sb_ranks);
        w.u16s(&self.word_ranks);
        w.u64s(&self.samples1);
        w.u64s(&self.samples0);
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self> {
        let len = r.usize()?;
        let config = PlainConfig {
            superblock_words: r.u32()? as usize,
            select_sample: r.u32()? as usize,
        };
        config.validate().map_err(|e| Error::format(e.to_string()))?;
        let words = r.u64s()?;
        let sb_ranks = r.u64s()?;
        let word_ranks = r.u16s()?;
        let samples1 = r.u64s()?;
        let samples0 = r.u64s()?;
        let nwords = len / 64 + 1;
        let nsb = nwords.div_ceil(config.superblock_words) + 1;
        if words.len() != nwords || word_ranks.len() != nwords || sb_ranks.len() != nsb {
            return Err(Error::format("plain bitvector: directory length mismatch"));
        }
        let ones = *sb_ranks.last().unwrap() as usize;
        if ones > len
            || samples1.len() != ones.div_ceil(config.select_sample)
            || samples0.len() != (len - ones).div_ceil(config.select_sample)
        {
            return Err(Error::format("plain bitvector: select sample count mismatch"));
        }
        let sb_shift = config.superblock_words.trailing_zeros();
        Ok(PlainBitVector { words, len, ones, config, sb_shift, sb_ranks, word_ranks, samples1, samples0 })
    }
}

impl RankSelect for PlainBitVector {
    #[inline]
    fn len(&self) -> usize {
        self.len
    }

    #[inline]
    fn count_ones(&self) -> usize {
        self.ones
    }

    #[inline]
    fn get(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len);
        self.words[idx / 64] >> (idx % 64) & 1 == 1
    }

    #[inline]
    fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        let w = i / 64;
        let sb = w >> self.sb_shift;
        let partial = self.words[w] & ((1u64 << (i % 64)) - 1);
        self.sb_ranks[sb] as usize + self.word_ranks[w] as usize + partial.count_ones() as usize
    }

    fn select1(&self, r: usize) -> Option<usize> {
        if r == 0 || r > self.ones {
            return None;
        }
        let (mut lo, mut hi) = self.sample_range(&self.samples1, r);
        // Last superblock with fewer than r set bits before it.
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if (self.sb_ranks[mid] as usize) < r {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let sbw = self.config.superblock_words;
        let base = self.sb_ranks[lo] as usize;
        let first = lo * sbw;
        let last = (first + sbw).min(self.words.len());
        let mut w = first;
        while w + 1 < last && base + (self.word_ranks[w + 1] as usize) < r {
            w += 1;
        }
        let before = base + self.word_ranks[w] as usize;
        Some(w * 64 + select_in_word(self.words[w], (r - before - 1) as u32) as usize + 1)
    }

    fn select0(&self, r: usize) -> Option<usize> {
        if r == 0 || r > self.len - self.ones {
            return None;
        }
        let (mut lo, mut hi) = self.sample_range(&self.samples0, r);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if (self.zeros_before_sb(mid) as usize) < r {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let sbw = self.config.superblock_words;
        let base = self.zeros_before_sb(lo) as usize;
        let first = lo * sbw;
        let last = (first + sbw).min(self.words.len());
        let zeros_before_word = |w: usize| (w - first) * 64 - self.word_ranks[w] as usize;
        let mut w = first;
        while w + 1 < last && base + zeros_before_word(w + 1) < r {
            w += 1;
        }
        let before = base + zeros_before_word(w);
        Some(w * 64 + select_in_word(!self.words[w], (r - before - 1) as u32) as usize + 1)
    }

    fn size_in_bytes(&self) -> usize {
        8 + 4 + 4
            + 8 * (5 + self.words.len() + self.sb_ranks.len() + self.samples1.len() + self.samples0.len())
            + 2 * self.word_ranks.len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn directory_monotone_and_total() {
        let bits: BitBuf = (0..5000).map(|i| i % 3 == 0 || i % 7 == 0).collect();
        let bv = PlainBitVector::new(&bits);
        assert!(bv.sb_ranks.windows(2).all(|w| w[0] <= w[1]));
        let popcount = bits.iter().filter(|&b| b).count();
        assert_eq!(*bv.sb_ranks.last().unwrap() as usize, popcount);
        assert_eq!(bv.count_ones(), popcount);
    }

    #[test]
    fn select_samples_point_at_sampled_occurrences() {
        let bits: BitBuf = (0..40_000).map(|i| i % 5 != 0).collect();
        let config = PlainConfig { superblock_words: 8, select_sample: 1000 };
        let bv = PlainBitVector::with_config(&bits, config).unwrap();
        for (k, &pos) in bv.samples1.iter().enumerate() {
            assert_eq!(bv.select1(k * 1000 + 1), Some(pos as usize + 1));
        }
        for (k, &pos) in bv.samples0.iter().enumerate() {
            assert_eq!(bv.select0(k * 1000 + 1), Some(pos as usize + 1));
        }
    }

    #[test]
    fn rejects_bad_config() {
        let bits = BitBuf::new();
        let bad = PlainConfig { superblock_words: 3, select_sample: 8192 };
        assert!(PlainBitVector::with_config(&bits, bad).is_err());
        let bad = PlainConfig { superblock_words: 1024, select_sample: 8192 };
        assert!(PlainBitVector::with_config(&bits, bad).is_err());
    }

    #[test]
    fn serialization_roundtrip() {
        let bits: BitBuf = (0..3000).map(|i| (i * 7919) % 13 < 4).collect();
        let bv = PlainBitVector::new(&bits);
        let mut w = Writer::new();
        bv.write(&mut w);
        let bytes = w.into_bytes();
        assert_eq!(bytes.len(), bv.size_in_bytes());
        let back = PlainBitVector::read(&mut Reader::new(&bytes)).unwrap();
        for i in 0..=3000 {
            assert_eq!(back.rank1(i), bv.rank1(i));
        }
        assert!(PlainBitVector::read(&mut Reader::new(&bytes[..bytes.len() - 3])).is_err());
    }
}
