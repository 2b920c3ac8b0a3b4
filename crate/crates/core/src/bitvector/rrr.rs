//! RRR block-compressed bitvector.
//!
//! The sequence is cut into blocks of `t` bits. Each block is stored as its
//! popcount (the class) and its index among all `t`-bit words of that class
//! in the combinatorial number system (the offset). Offsets are variable
//! width, so a directory every [`GROUP_BLOCKS`] blocks stores the rank and
//! the offset-stream position reached so far.

use std::sync::OnceLock;

use crate::bits::{ceil_log2, read_bits_u128, select_in_u128, BitBuf, IntVec};
use crate::error::{Error, Result};
use crate::serial::{Reader, Writer};

use super::RankSelect;

pub const RRR_BLOCK_SIZES: [u32; 4] = [15, 31, 63, 127];

const GROUP_BLOCKS: usize = 32;
const MAX_T: usize = 127;

/// `C(n, k)` for `n <= 127`, indexed `[k][n]` so that decoding walks
/// consecutive entries. `C(127, 63)` needs more than 64 bits.
fn binomials() -> &'static [[u128; MAX_T + 1]; MAX_T + 1] {
    static TABLE: OnceLock<Box<[[u128; MAX_T + 1]; MAX_T + 1]>> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut c = Box::new([[0u128; MAX_T + 1]; MAX_T + 1]);
        for n in 0..=MAX_T {
            c[0][n] = 1;
            for k in 1..=n {
                c[k][n] = c[k - 1][n - 1] + if k < n { c[k][n - 1] } else { 0 };
            }
        }
        c
    })
}

/// `C(n, k)` for `n <= 64`, indexed `[k][n]`, small enough for 64-bit arithmetic.
static BINOMIALS_64: [[u64; 65]; 65] = {
    let mut c = [[0u64; 65]; 65];
    let mut n = 0;
    while n <= 64 {
        c[0][n] = 1;
        let mut k = 1;
        while k <= n {
            c[k][n] = c[k - 1][n - 1] + if k < n { c[k][n - 1] } else { 0 };
            k += 1;
        }
        n += 1;
    }
    c
};

#[inline]
pub(crate) fn binomial(n: u32, k: u32) -> u128 {
    if k > n {
        0
    } else {
        binomials()[k as usize][n as usize]
    }
}

/// Bits needed for an offset of a class-`k` block: `ceil(log2 C(t, k))`.
fn offset_width(t: u32, k: u32) -> u32 {
    let c = binomial(t, k);
    128 - (c - 1).leading_zeros()
}

/// Combinatorial-number-system rank of `block` among `t`-bit words with the same popcount.
pub(crate) fn encode_block(block: u128) -> u128 {
    let mut offset = 0;
    let mut v = block;
    let mut i = 1;
    while v != 0 {
        let p = v.trailing_zeros();
        offset += binomial(p, i);
        v &= v - 1;
        i += 1;
    }
    offset
}

/// Decodes positions `p..t` with 128-bit arithmetic until the rest fits in
/// 64 bits or `p` reaches `stop`. Returns the bits found, the remaining
/// offset, class and position.
#[inline]
fn decode_wide(mut offset: u128, class: u32, t: u32, stop: u32) -> (u128, u64, u32, u32) {
    let table = binomials();
    let mut k = class as usize;
    let mut p = t as usize;
    let mut block = 0u128;
    let stop = stop.max(64) as usize;
    while k > 0 && p > stop {
        p -= 1;
        let c = table[k][p];
        if offset >= c {
            block |= 1u128 << p;
            offset -= c;
            k -= 1;
        }
    }
    (block, offset as u64, k as u32, p as u32)
}

pub(crate) fn decode_block(offset: u128, class: u32, t: u32) -> u128 {
    if class == t {
        return if t == 128 { u128::MAX } else { (1u128 << t) - 1 };
    }
    let (high, offset, k, p) = decode_wide(offset, class, t, 0);
    high | decode_small(offset, k, p) as u128
}

/// Ones below position `within` of the block with the given class and
/// offset, decoding only positions at or above `within`.
fn ones_below(offset: u128, class: u32, t: u32, within: u32) -> u32 {
    let (_, offset, k, p) = decode_wide(offset, class, t, within);
    ones_below_small(offset, k, p, within)
}

/// Bits of a class-`class` block of width `t <= 64`.
fn decode_small(mut offset: u64, class: u32, t: u32) -> u64 {
    let mut k = class as usize;
    let mut block = 0u64;
    let mut p = t as usize;
    while k > 0 {
        if offset == 0 {
            // The remaining ones are the lowest k positions.
            return block | u64::MAX >> (64 - k);
        }
        p -= 1;
        let c = BINOMIALS_64[k][p];
        if offset >= c {
            block |= 1u64 << p;
            offset -= c;
            k -= 1;
        }
    }
    block
}

fn ones_below_small(mut offset: u64, class: u32, t: u32, within: u32) -> u32 {
    let mut k = class as usize;
    let mut p = t as usize;
    while k > 0 && p > within as usize {
        if offset == 0 {
            return (k as u32).min(within);
        }
        p -= 1;
        let c = BINOMIALS_64[k][p];
        if offset >= c {
            offset -= c;
            k -= 1;
        }
    }
    k as u32
}

#[derive(Clone, Debug)]
pub struct RrrBitVector {
    len: usize,
    t: u32,
    ones: usize,
    classes: IntVec,
    offsets: Vec<u64>,
    offsets_len: usize,
    /// Rank before each group of blocks; one trailing entry with the total.
    dir_rank: Vec<u64>,
    /// Offset-stream bit position at the start of each group.
    dir_offset: Vec<u64>,
    widths: [u8; MAX_T + 1],
}

impl RrrBitVector {
    pub fn new(bits: &BitBuf, t: u32) -> Result<Self> {
        if !RRR_BLOCK_SIZES.contains(&t) {
            return Err(Error::param(format!("RRR block size must be one of {RRR_BLOCK_SIZES:?}, got {t}")));
        }
        let len = bits.len();
        let nblocks = len.div_ceil(t as usize);
        let widths = Self::width_table(t);
        let mut classes = IntVec::new(ceil_log2(t as u64 + 1));
        let mut offsets = BitBuf::new();
        let mut dir_rank = Vec::with_capacity(nblocks / GROUP_BLOCKS + 2);
        let mut dir_offset = Vec::with_capacity(nblocks / GROUP_BLOCKS + 2);
        let mut ones = 0usize;
        for b in 0..nblocks {
            if b % GROUP_BLOCKS == 0 {
                dir_rank.push(ones as u64);
                dir_offset.push(offsets.len() as u64);
            }
            let start = b * t as usize;
            let width = (len - start).min(t as usize) as u32;
            let block = read_bits_u128(bits.words(), start, width);
            let class = block.count_ones();
            classes.push(class as u64);
            offsets.push_u128(encode_block(block), widths[class as usize] as u32);
            ones += class as usize;
        }
        dir_rank.push(ones as u64);
        dir_offset.push(offsets.len() as u64);
        let offsets_len = offsets.len();
        let mut offsets = offsets.into_words();
        // Spare word so two-word reads at the tail stay in bounds.
        offsets.push(0);
        Ok(RrrBitVector { len, t, ones, classes, offsets, offsets_len, dir_rank, dir_offset, widths })
    }

    fn width_table(t: u32) -> [u8; MAX_T + 1] {
        let mut widths = [0u8; MAX_T + 1];
        for k in 0..=t {
            widths[k as usize] = offset_width(t, k) as u8;
        }
        widths
    }

    pub fn block_size(&self) -> u32 {
        self.t
    }

    pub fn num_blocks(&self) -> usize {
        self.classes.len()
    }

    /// Class and offset of block `b`, for inspection.
    pub fn block(&self, b: usize) -> (u32, u128) {
        let (class, pos) = self.locate(b);
        (class, read_bits_u128(&self.offsets, pos, self.widths[class as usize] as u32))
    }

    /// Bits used by the offset stream.
    pub fn offset_bits(&self) -> usize {
        self.offsets_len
    }

    /// Reconstructs the original bits.
    pub fn decode(&self) -> BitBuf {
        let mut out = BitBuf::with_capacity(self.len);
        let mut pos = 0;
        for b in 0..self.num_blocks() {
            let class = self.classes.get(b) as u32;
            let w = self.widths[class as usize] as u32;
            let block = decode_block(read_bits_u128(&self.offsets, pos, w), class, self.t);
            pos += w as usize;
            let width = (self.len - b * self.t as usize).min(self.t as usize) as u32;
            out.push_u128(block, width);
        }
        out
    }

    /// Class of block `b` and its offset-stream position.
    #[inline]
    fn locate(&self, b: usize) -> (u32, usize) {
        let (_, pos) = self.before_block(b);
        (self.classes.get(b) as u32, pos)
    }

    /// Rank and offset-stream position at the start of block `b`, scanning
    /// from the nearer directory sample.
    #[inline]
    fn before_block(&self, b: usize) -> (usize, usize) {
        let g = b / GROUP_BLOCKS;
        let group_start = g * GROUP_BLOCKS;
        let group_end = (group_start + GROUP_BLOCKS).min(self.classes.len());
        if b - group_start <= group_end - b {
            let mut rank = self.dir_rank[g] as usize;
            let mut pos = self.dir_offset[g] as usize;
            for j in group_start..b {
                let class = self.classes.get(j) as usize;
                rank += class;
                pos += self.widths[class] as usize;
            }
            (rank, pos)
        } else {
            let mut rank = self.dir_rank[g + 1] as usize;
            let mut pos = self.dir_offset[g + 1] as usize;
            for j in b..group_end {
                let class = self.classes.get(j) as usize;
                rank -= class;
                pos -= self.widths[class] as usize;
            }
            (rank, pos)
        }
    }

    #[inline]
    fn decode_at(&self, class: u32, pos: usize) -> u128 {
        if class == 0 {
            return 0;
        }
        let w = self.widths[class as usize] as u32;
        decode_block(read_bits_u128(&self.offsets, pos, w), class, self.t)
    }

    #[inline]
    fn block_len(&self, b: usize) -> usize {
        (self.len - b * self.t as usize).min(self.t as usize)
    }

    fn group_len(&self) -> usize {
        self.dir_rank.len() - 1
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        w.u64(self.len as u64);
        w.u32(self.t);
        w.u64s(self.classes.words());
        w.u64(self.offsets_len as u64);
        w.u64s(&self.offsets);
        w.u64s(&self.dir_rank);
        w.u64s(&self.dir_offset);
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self> {
        let len = r.usize()?;
        let t = r.u32()?;
        if !RRR_BLOCK_SIZES.contains(&t) {
            return Err(Error::format(format!("RRR block size {t} not supported")));
        }
        let nblocks = len.div_ceil(t as usize);
        let classes = IntVec::from_parts(r.u64s()?, ceil_log2(t as u64 + 1), nblocks)
            .ok_or_else(|| Error::format("RRR classes length mismatch"))?;
        let offsets_len = r.usize()?;
        let offsets = r.u64s()?;
        let dir_rank = r.u64s()?;
        let dir_offset = r.u64s()?;
        let ngroups = nblocks.div_ceil(GROUP_BLOCKS) + 1;
        if offsets.len() != offsets_len.div_ceil(64) + 1
            || dir_rank.len() != ngroups
            || dir_offset.len() != ngroups
            || *dir_offset.last().unwrap() as usize != offsets_len
        {
            return Err(Error::format("RRR directory length mismatch"));
        }
        let ones = *dir_rank.last().unwrap() as usize;
        if ones > len || (0..nblocks).any(|b| classes.get(b) > t as u64) {
            return Err(Error::format("RRR class out of range"));
        }
        let widths = Self::width_table(t);
        Ok(RrrBitVector { len, t, ones, classes, offsets, offsets_len, dir_rank, dir_offset, widths })
    }
}

impl RankSelect for RrrBitVector {
    #[inline]
    fn len(&self) -> usize {
        self.len
    }

    #[inline]
    fn count_ones(&self) -> usize {
        self.ones
    }

    fn get(&self, idx: usize) -> bool {
        debug_assert!(idx < self.len);
        let t = self.t as usize;
        let (class, pos) = self.locate(idx / t);
        self.decode_at(class, pos) >> (idx % t) & 1 == 1
    }

    fn rank1(&self, i: usize) -> usize {
        debug_assert!(i <= self.len);
        if i == self.len {
            return self.ones;
        }
        let t = self.t as usize;
        let b = i / t;
        let (mut rank, pos) = self.before_block(b);
        let within = i % t;
        if within > 0 {
            let class = self.classes.get(b) as u32;
            if class == self.t {
                rank += within;
            } else if class > 0 {
                let w = self.widths[class as usize] as u32;
                let offset = read_bits_u128(&self.offsets, pos, w);
                rank += ones_below(offset, class, self.t, within as u32) as usize;
            }
        }
        rank
    }

    fn select1(&self, r: usize) -> Option<usize> {
        if r == 0 || r > self.ones {
            return None;
        }
        let groups = &self.dir_rank[..self.group_len()];
        let g = groups.partition_point(|&x| (x as usize) < r) - 1;
        let mut rank = self.dir_rank[g] as usize;
        let mut pos = self.dir_offset[g] as usize;
        let mut b = g * GROUP_BLOCKS;
        loop {
            let class = self.classes.get(b) as usize;
            if rank + class >= r {
                let block = self.decode_at(class as u32, pos);
                let bit = select_in_u128(block, (r - rank - 1) as u32) as usize;
                return Some(b * self.t as usize + bit + 1);
            }
            rank += class;
            pos += self.widths[class] as usize;
            b += 1;
        }
    }

    fn select0(&self, r: usize) -> Option<usize> {
        if r == 0 || r > self.len - self.ones {
            return None;
        }
        let t = self.t as usize;
        let zeros_before = |g: usize| g * GROUP_BLOCKS * t - self.dir_rank[g] as usize;
        let (mut lo, mut hi) = (0, self.group_len() - 1);
        while lo < hi {
            let mid = (lo + hi).div_ceil(2);
            if zeros_before(mid) < r {
                lo = mid;
            } else {
                hi = mid - 1;
            }
        }
        let g = lo;
        let mut zeros = zeros_before(g);
        let mut pos = self.dir_offset[g] as usize;
        let mut b = g * GROUP_BLOCKS;
        loop {
            let class = self.classes.get(b) as usize;
            let blen = self.block_len(b);
            if zeros + blen - class >= r {
                let block = self.decode_at(class as u32, pos);
                let inverted = !block & ((1u128 << blen) - 1);
                let bit = select_in_u128(inverted, (r - zeros - 1) as u32) as usize;
                return Some(b * t + bit + 1);
            }
            zeros += blen - class;
            pos += self.widths[class] as usize;
            b += 1;
        }
    }

    fn size_in_bytes(&self) -> usize {
        8 + 4 + 8 + 8 * (4 + self.classes.words().len() + self.offsets.len() + self.dir_rank.len() + self.dir_offset.len())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn binomial_table_spot_checks() {
        assert_eq!(binomial(63, 1), 63);
        assert_eq!(binomial(15, 7), 6435);
        assert_eq!(binomial(127, 0), 1);
        assert_eq!(binomial(127, 127), 1);
        // C(127, 63) = 2^127-ish scale and exceeds u64.
        assert!(binomial(127, 63) > u64::MAX as u128);
        assert_eq!(binomial(127, 63), binomial(127, 64));
        assert_eq!(offset_width(127, 63), 124);
    }

    #[test]
    fn all_zero_block() {
        let bits: BitBuf = std::iter::repeat_n(false, 63).collect();
        let rrr = RrrBitVector::new(&bits, 63).unwrap();
        assert_eq!(rrr.num_blocks(), 1);
        assert_eq!(rrr.block(0), (0, 0));
        assert_eq!(rrr.offset_bits(), 0);
    }

    #[test]
    fn single_one_block_offsets_identify_position() {
        let mut seen = std::collections::HashSet::new();
        for p in 0..63 {
            let bits: BitBuf = (0..63).map(|i| i == p).collect();
            let rrr = RrrBitVector::new(&bits, 63).unwrap();
            let (class, offset) = rrr.block(0);
            assert_eq!(class, 1);
            assert!(offset < 63);
            assert!(seen.insert(offset));
            assert_eq!(rrr.offset_bits(), 6);
            assert_eq!(rrr.decode(), bits);
        }
    }

    #[test]
    fn figure_one_bits_in_one_block() {
        let bits: BitBuf = "0111000".chars().map(|c| c == '1').collect();
        let rrr = RrrBitVector::new(&bits, 15).unwrap();
        assert_eq!(rrr.num_blocks(), 1);
        assert_eq!(rrr.block(0).0, 3);
        assert_eq!(rrr.decode(), bits);
    }

    #[test]
    fn full_blocks_and_short_tail() {
        for t in RRR_BLOCK_SIZES {
            let n = 5 * t as usize + 3;
            let bits: BitBuf = (0..n).map(|i| i < 2 * t as usize || i % 2 == 0).collect();
            let rrr = RrrBitVector::new(&bits, t).unwrap();
            assert_eq!(rrr.block(0).0, t);
            assert_eq!(rrr.decode(), bits);
            assert_eq!(rrr.rank1(n), bits.iter().filter(|&b| b).count());
        }
    }

    #[test]
    fn serialization_roundtrip() {
        let bits: BitBuf = (0..5000).map(|i| (i / 17) % 3 == 0).collect();
        let rrr = RrrBitVector::new(&bits, 31).unwrap();
        let mut w = Writer::new();
        rrr.write(&mut w);
        let bytes = w.into_bytes();
        assert_eq!(bytes.len(), rrr.size_in_bytes());
        let back = RrrBitVector::read(&mut Reader::new(&bytes)).unwrap();
        assert_eq!(back.decode(), bits);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn encode_decode_identity(bits in proptest::collection::vec(any::<bool>(), 0..2000), ti in 0usize..4) {
            let t = RRR_BLOCK_SIZES[ti];
            let buf: BitBuf = bits.iter().copied().collect();
            let rrr = RrrBitVector::new(&buf, t).unwrap();
            prop_assert_eq!(rrr.decode(), buf);
            for b in 0..rrr.num_blocks() {
                let (class, offset) = rrr.block(b);
                prop_assert!(class <= t);
                prop_assert!(offset < binomial(t, class));
            }
            prop_assert!(rrr.dir_rank.windows(2).all(|w| w[0] <= w[1]));
        }

        #[test]
        fn block_codec_is_bijective(block in any::<u128>(), ti in 0usize..4) {
            let t = RRR_BLOCK_SIZES[ti];
            let block = block & ((1u128 << t) - 1);
            let class = block.count_ones();
            let offset = encode_block(block);
            prop_assert!(offset < binomial(t, class));
            prop_assert_eq!(decode_block(offset, class, t), block);
            for within in 0..=t {
                let below = (block & ((1u128 << within) - 1)).count_ones();
                prop_assert_eq!(ones_below(offset, class, t, within), below);
            }
        }
    }
}
