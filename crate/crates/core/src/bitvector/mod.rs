//! Bit sequences with rank and select support.
//!
//! Positions follow the conventions used throughout the crate: `access`
//! takes a 1-based position, `rank1(i)` counts set bits in the prefix of
//! length `i`, and `select1(r)` returns the 1-based position of the `r`-th
//! set bit, or `None` when fewer than `r` set bits exist.

mod plain;
mod rrr;

pub use plain::{PlainBitVector, PlainConfig};
pub use rrr::{RrrBitVector, RRR_BLOCK_SIZES};

use crate::bits::BitBuf;
use crate::error::{check_range, Error, Result};
use crate::serial::{Reader, Writer};

/// Rank/select over a static bit sequence.
///
/// The unchecked methods are the hot path used by the wavelet structures;
/// the `try_` and `access` methods validate arguments.
pub trait RankSelect {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn count_ones(&self) -> usize;

    fn count_zeros(&self) -> usize {
        self.len() - self.count_ones()
    }

    /// Bit at 0-based index `idx`.
    fn get(&self, idx: usize) -> bool;

    /// Set bits among the first `i` bits, `i <= len`.
    fn rank1(&self, i: usize) -> usize;

    #[inline]
    fn rank0(&self, i: usize) -> usize {
        i - self.rank1(i)
    }

    /// 1-based position of the `r`-th set bit (`r >= 1`).
    fn select1(&self, r: usize) -> Option<usize>;

    /// 1-based position of the `r`-th unset bit (`r >= 1`).
    fn select0(&self, r: usize) -> Option<usize>;

    /// Bytes taken by the serialized form.
    fn size_in_bytes(&self) -> usize;

    fn access(&self, i: usize) -> Result<bool> {
        check_range(i, 1, self.len())?;
        Ok(self.get(i - 1))
    }

    fn try_rank1(&self, i: usize) -> Result<usize> {
        check_range(i, 0, self.len())?;
        Ok(self.rank1(i))
    }

    fn try_rank0(&self, i: usize) -> Result<usize> {
        check_range(i, 0, self.len())?;
        Ok(self.rank0(i))
    }

    fn try_select1(&self, r: usize) -> Result<Option<usize>> {
        if r == 0 {
            return Err(Error::param("select argument must be at least 1"));
        }
        Ok(self.select1(r))
    }

    fn try_select0(&self, r: usize) -> Result<Option<usize>> {
        if r == 0 {
            return Err(Error::param("select argument must be at least 1"));
        }
        Ok(self.select0(r))
    }
}

/// Storage backend selector for the wavelet structures.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Backend {
    Plain,
    /// RRR with block size `t` bits.
    Rrr(u32),
}

impl Backend {
    pub const DEFAULT_RRR: Backend = Backend::Rrr(63);

    pub fn validate(self) -> Result<()> {
        match self {
            Backend::Plain => Ok(()),
            Backend::Rrr(t) if RRR_BLOCK_SIZES.contains(&t) => Ok(()),
            Backend::Rrr(t) => Err(Error::param(format!(
                "RRR block size must be one of {RRR_BLOCK_SIZES:?}, got {t}"
            ))),
        }
    }

    pub fn build(self, bits: &BitBuf) -> Result<BitVector> {
        Ok(match self {
            Backend::Plain => BitVector::Plain(PlainBitVector::new(bits)),
            Backend::Rrr(t) => BitVector::Rrr(RrrBitVector::new(bits, t)?),
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            Backend::Plain => "plain",
            Backend::Rrr(_) => "rrr",
        }
    }

    /// Block size for RRR, 0 for plain.
    pub fn rrr_block(self) -> u32 {
        match self {
            Backend::Plain => 0,
            Backend::Rrr(t) => t,
        }
    }

    pub(crate) fn tag(self) -> u8 {
        match self {
            Backend::Plain => 0,
            Backend::Rrr(_) => 1,
        }
    }

    pub(crate) fn from_tag(tag: u8, t: u32) -> Result<Self> {
        let backend = match tag {
            0 => Backend::Plain,
            1 => Backend::Rrr(t),
            _ => return Err(Error::format(format!("unknown backend tag {tag}"))),
        };
        backend.validate().map_err(|e| Error::format(e.to_string()))?;
        Ok(backend)
    }
}

impl std::fmt::Display for Backend {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Backend::Plain => f.write_str("plain"),
            Backend::Rrr(t) => write!(f, "rrr{t}"),
        }
    }
}

/// A bitvector with either backend.
#[derive(Clone, Debug)]
pub enum BitVector {
    Plain(PlainBitVector),
    Rrr(RrrBitVector),
}

macro_rules! dispatch {
    ($self:ident, $bv:ident => $e:expr) => {
        match $self {
            BitVector::Plain($bv) => $e,
            BitVector::Rrr($bv) => $e,
        }
    };
}

impl RankSelect for BitVector {
    #[inline]
    fn len(&self) -> usize {
        dispatch!(self, bv => bv.len())
    }
    #[inline]
    fn count_ones(&self) -> usize {
        dispatch!(self, bv => bv.count_ones())
    }
    #[inline]
    fn get(&self, idx: usize) -> bool {
        dispatch!(self, bv => bv.get(idx))
    }
    #[inline]
    fn rank1(&self, i: usize) -> usize {
        dispatch!(self, bv => bv.rank1(i))
    }
    #[inline]
    fn select1(&self, r: usize) -> Option<usize> {
        dispatch!(self, bv => bv.select1(r))
    }
    #[inline]
    fn select0(&self, r: usize) -> Option<usize> {
        dispatch!(self, bv => bv.select0(r))
    }
    fn size_in_bytes(&self) -> usize {
        dispatch!(self, bv => bv.size_in_bytes())
    }
}

impl BitVector {
    pub fn backend(&self) -> Backend {
        match self {
            BitVector::Plain(_) => Backend::Plain,
            BitVector::Rrr(bv) => Backend::Rrr(bv.block_size()),
        }
    }

    pub(crate) fn write(&self, w: &mut Writer) {
        match self {
            BitVector::Plain(bv) => {
                w.u8(Backend::Plain.tag());
                bv.write(w);
            }
            BitVector::Rrr(bv) => {
                w.u8(Backend::Rrr(0).tag());
                bv.write(w);
            }
        }
    }

    pub(crate) fn read(r: &mut Reader<'_>) -> Result<Self> {
        match r.u8()? {
            0 => Ok(BitVector::Plain(PlainBitVector::read(r)?)),
            1 => Ok(BitVector::Rrr(RrrBitVector::read(r)?)),
            tag => Err(Error::format(format!("unknown bitvector tag {tag}"))),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn fig1() -> BitBuf {
        "0111000".chars().map(|c| c == '1').collect()
    }

    fn all_variants(bits: &BitBuf) -> Vec<BitVector> {
        let mut out = vec![Backend::Plain.build(bits).unwrap()];
        for t in RRR_BLOCK_SIZES {
            out.push(Backend::Rrr(t).build(bits).unwrap());
        }
        out
    }

    #[test]
    fn figure_one_root_bitvector() {
        for bv in all_variants(&fig1()) {
            assert_eq!(bv.count_ones(), 3);
            assert!(!bv.access(1).unwrap());
            assert!(bv.access(2).unwrap());
            assert!(matches!(bv.access(8), Err(Error::Bounds { .. })));
            assert!(matches!(bv.access(0), Err(Error::Bounds { .. })));
            assert_eq!(bv.try_rank1(0).unwrap(), 0);
            assert_eq!(bv.try_rank1(4).unwrap(), 3);
            assert_eq!(bv.try_rank1(7).unwrap(), 3);
            assert!(bv.try_rank1(8).is_err());
            assert_eq!(bv.try_select1(2).unwrap(), Some(3));
            assert_eq!(bv.try_select1(4).unwrap(), None);
            assert_eq!(bv.try_select0(1).unwrap(), Some(1));
            assert_eq!(bv.try_select0(2).unwrap(), Some(5));
            assert_eq!(bv.try_select0(5).unwrap(), None);
            assert!(matches!(bv.try_select1(0), Err(Error::Param(_))));
        }
    }

    #[test]
    fn empty_sequence() {
        for bv in all_variants(&BitBuf::new()) {
            assert_eq!(bv.len(), 0);
            assert_eq!(bv.count_ones(), 0);
            assert_eq!(bv.rank1(0), 0);
            assert_eq!(bv.select1(1), None);
            assert_eq!(bv.select0(1), None);
        }
    }

    #[test]
    fn invalid_rrr_block_size() {
        assert!(matches!(Backend::Rrr(16).build(&fig1()), Err(Error::Param(_))));
        assert!(Backend::Rrr(64).validate().is_err());
    }

    /// Linear-scan oracle over `bits`.
    fn check_against_scan(bits: &[bool], bv: &BitVector) {
        let mut ones = Vec::new();
        let mut zeros = Vec::new();
        let mut rank = 0;
        for (i, &b) in bits.iter().enumerate() {
            assert_eq!(bv.rank1(i), rank, "rank1({i})");
            assert_eq!(bv.get(i), b, "get({i})");
            if b {
                rank += 1;
                ones.push(i + 1);
            } else {
                zeros.push(i + 1);
            }
        }
        assert_eq!(bv.rank1(bits.len()), rank);
        assert_eq!(bv.count_ones(), ones.len());
        for (r, &p) in ones.iter().enumerate() {
            assert_eq!(bv.select1(r + 1), Some(p), "select1({})", r + 1);
        }
        for (r, &p) in zeros.iter().enumerate() {
            assert_eq!(bv.select0(r + 1), Some(p), "select0({})", r + 1);
        }
        assert_eq!(bv.select1(ones.len() + 1), None);
        assert_eq!(bv.select0(zeros.len() + 1), None);
    }

    #[test]
    fn random_bits_match_linear_scan() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        for density in [0.5, 0.02, 0.98] {
            let bits: Vec<bool> = (0..100_000).map(|_| rng.gen_bool(density)).collect();
            let buf: BitBuf = bits.iter().copied().collect();
            for bv in all_variants(&buf) {
                check_against_scan(&bits, &bv);
            }
        }
    }

    #[test]
    fn small_select_stride_is_exercised() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        let bits: Vec<bool> = (0..20_000).map(|_| rng.gen_bool(0.3)).collect();
        let buf: BitBuf = bits.iter().copied().collect();
        let config = PlainConfig { superblock_words: 2, select_sample: 16 };
        let bv = BitVector::Plain(PlainBitVector::with_config(&buf, config).unwrap());
        check_against_scan(&bits, &bv);
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn plain_and_rrr_agree(bits in proptest::collection::vec(any::<bool>(), 0..3000)) {
            let buf: BitBuf = bits.iter().copied().collect();
            let variants = all_variants(&buf);
            let plain = &variants[0];
            for bv in &variants[1..] {
                prop_assert_eq!(bv.count_ones(), plain.count_ones());
                for i in 0..=bits.len() {
                    prop_assert_eq!(bv.rank1(i), plain.rank1(i));
                }
                for r in 1..=bits.len() + 1 {
                    prop_assert_eq!(bv.select1(r), plain.select1(r));
                    prop_assert_eq!(bv.select0(r), plain.select0(r));
                }
            }
        }

        #[test]
        fn rank_select_inverse(bits in proptest::collection::vec(any::<bool>(), 1..2000)) {
            let buf: BitBuf = bits.iter().copied().collect();
            for bv in all_variants(&buf) {
                for i in 0..=bits.len() {
                    prop_assert_eq!(bv.rank0(i) + bv.rank1(i), i);
                    let r = bv.rank1(i);
                    if r > 0 {
                        prop_assert!(bv.select1(r).unwrap() <= i);
                    }
                }
                for r in 1..=bv.count_ones() {
                    prop_assert_eq!(bv.rank1(bv.select1(r).unwrap()), r);
                }
            }
        }
    }
}
