//! Whole-text Huffman-shaped wavelet tree, stored level by level.
//!
//! All nodes of one depth share a single bitvector; each node owns a
//! contiguous segment of it. Node segments are ordered left to right,
//! which for a canonical code means by codeword prefix.

use std::collections::{BTreeMap, HashMap};

use crate::bits::BitBuf;
use crate::bitvector::{Backend, BitVector, RankSelect};
use crate::error::{check_range, Error, Result};
use crate::huffman::CanonicalHuffmanCode;
use crate::serial::{Reader, Writer};
use crate::SymbolIndex;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Child {
    Leaf(u8),
    Node(u32),
}

#[derive(Clone, Debug)]
struct Node {
    level: u32,
    start: usize,
    len: usize,
    /// rank1 of the level bitvector at `start`.
    ones_before: usize,
    children: [Child; 2],
}

#[derive(Clone, Debug)]
pub struct HuffmanWaveletTree {
    n: usize,
    backend: Backend,
    code: CanonicalHuffmanCode,
    counts: Box<[u64; 256]>,
    levels: Vec<BitVector>,
    nodes: Vec<Node>,
    /// Internal nodes on the root-to-leaf path of each symbol.
    paths: Vec<Vec<u32>>,
    codes: Box<[(u64, u32); 256]>,
}

impl HuffmanWaveletTree {
    pub fn new(text: &[u8], backend: Backend) -> Result<Self> {
        if text.is_empty() {
            return Err(Error::param("wavelet tree needs a non-empty text"));
        }
        backend.validate()?;
        let mut counts = Box::new([0u64; 256]);
        for &c in text {
            counts[c as usize] += 1;
        }
        let code = CanonicalHuffmanCode::build((0..256u32).map(|c| (c, counts[c as usize])))?;
        let mut tree = Self::skeleton(text.len(), backend, code, counts);

        let height = tree.code.height();
        let mut level_bits: Vec<Vec<u64>> =
            (0..height).map(|d| vec![0u64; tree.level_len(d).div_ceil(64)]).collect();
        let mut cursor: Vec<usize> = tree.nodes.iter().map(|v| v.start).collect();
        for &c in text {
            let (bits, len) = tree.codes[c as usize];
            for (d, &v) in tree.paths[c as usize].iter().enumerate() {
                let pos = cursor[v as usize];
                cursor[v as usize] += 1;
                if bits >> (len - 1 - d as u32) & 1 == 1 {
                    level_bits[d][pos / 64] |= 1 << (pos % 64);
                }
            }
        }
        tree.levels = level_bits
            .into_iter()
            .enumerate()
            .map(|(d, words)| backend.build(&BitBuf::from_words(words, tree.level_len(d as u32))))
            .collect::<Result<_>>()?;
        tree.fill_ones_before();
        Ok(tree)
    }

    /// Node layout from the code and symbol counts; bitvectors left empty.
    fn skeleton(n: usize, backend: Backend, code: CanonicalHuffmanCode, counts: Box<[u64; 256]>) -> Self {
        let mut codes = Box::new([(0u64, 0u32); 256]);
        for &s in code.symbols() {
            codes[s as usize] = code.code_of(s).unwrap();
        }
        // Internal nodes per depth keyed by prefix, with their segment lengths.
        let mut per_level: Vec<BTreeMap<u64, usize>> = vec![BTreeMap::new(); code.height() as usize];
        for &s in code.symbols() {
            let (bits, len) = codes[s as usize];
            for d in 0..len {
                *per_level[d as usize].entry(bits >> (len - d)).or_default() += counts[s as usize] as usize;
            }
        }
        let mut keys = Vec::new();
        let mut index = HashMap::new();
        let mut nodes = Vec::new();
        for (d, level) in per_level.iter().enumerate() {
            let mut start = 0;
            for (&prefix, &len) in level {
                index.insert((d as u32, prefix), nodes.len() as u32);
                keys.push((d as u32, prefix));
                nodes.push(Node { level: d as u32, start, len, ones_before: 0, children: [Child::Leaf(0); 2] });
                start += len;
            }
        }
        let leaf_at: HashMap<(u32, u64), u8> = code
            .symbols()
            .iter()
            .map(|&s| {
                let (bits, len) = codes[s as usize];
                ((len, bits), s as u8)
            })
            .collect();
        for (v, &(d, prefix)) in keys.iter().enumerate() {
            for b in 0..2u64 {
                let q = prefix << 1 | b;
                nodes[v].children[b as usize] = match leaf_at.get(&(d + 1, q)) {
                    Some(&s) => Child::Leaf(s),
                    None => Child::Node(index[&(d + 1, q)]),
                };
            }
        }
        let mut paths = vec![Vec::new(); 256];
        for &s in code.symbols() {
            let (bits, len) = codes[s as usize];
            paths[s as usize] = (0..len).map(|d| index[&(d, bits >> (len - d))]).collect();
        }
        HuffmanWaveletTree { n, backend, code, counts, levels: Vec::new(), nodes, paths, codes }
    }

    fn fill_ones_before(&mut self) {
        for v in self.nodes.iter_mut() {
            v.ones_before = self.levels[v.level as usize].rank1(v.start);
        }
    }

    fn level_len(&self, d: u32) -> usize {
        self.nodes.iter().filter(|v| v.level == d).map(|v| v.len).sum()
    }

    pub fn backend(&self) -> Backend {
        self.backend
    }

    pub fn code(&self) -> &CanonicalHuffmanCode {
        &self.code
    }

    pub fn height(&self) -> u32 {
        self.code.height()
    }

    /// Bits stored across all levels.
    pub fn stored_bits(&self) -> usize {
        self.levels.iter().map(|bv| bv.len()).sum()
    }

    /// Bits of the root bitvector, for inspection.
    pub fn level_bits(&self, d: usize) -> Option<BitBuf> {
        let bv = self.levels.get(d)?;
        Some((0..bv.len()).map(|i| bv.get(i)).collect())
    }

    /// Start offset of every node segment on level `d`, left to right.
    pub fn node_bounds(&self, d: u32) -> Vec<(usize, usize)> {
        self.nodes.iter().filter(|v| v.level == d).map(|v| (v.start, v.start + v.len)).collect()
    }

    pub(crate) fn write_body(&self, w: &mut Writer) {
        w.section(|w| {
            for c in 0..256 {
                w.u8(self.codes[c].1 as u8);
            }
            w.u64s(&self.counts[..]);
        });
        w.section(|w| {
            w.u64(self.levels.len() as u64);
            for bv in &self.levels {
                bv.write(w);
            }
        });
    }

    pub(crate) fn read_body(r: &mut Reader<'_>, n: usize, backend: Backend) -> Result<Self> {
        let (lengths, counts) = r.section("code", |r| {
            let lengths: Vec<u8> = r.take(256)?.to_vec();
            let counts = r.u64s()?;
            Ok((lengths, counts))
        })?;
        let counts: Box<[u64; 256]> = counts
            .into_boxed_slice()
            .try_into()
            .map_err(|_| Error::format("wavelet tree: expected 256 symbol counts"))?;
        if counts.iter().sum::<u64>() != n as u64 {
            return Err(Error::format("wavelet tree: symbol counts do not sum to n"));
        }
        let present = (0..256u32).filter(|&c| counts[c as usize] > 0);
        let code = CanonicalHuffmanCode::from_lengths(present.clone().map(|c| (c, lengths[c as usize] as u32)))
            .map_err(|e| Error::format(format!("wavelet tree code: {e}")))?;
        let mut tree = Self::skeleton(n, backend, code, counts);
        tree.levels = r.section("levels", |r| {
            let count = r.usize()?;
            (0..count).map(|_| BitVector::read(r)).collect::<Result<Vec<_>>>()
        })?;
        if tree.levels.len() != tree.code.height() as usize
            || (0..tree.levels.len()).any(|d| tree.levels[d].len() != tree.level_len(d as u32))
            || tree.levels.iter().any(|bv| bv.backend() != backend)
        {
            return Err(Error::format("wavelet tree: level sizes do not match the code"));
        }
        tree.fill_ones_before();
        Ok(tree)
    }
}

impl SymbolIndex for HuffmanWaveletTree {
    fn len(&self) -> usize {
        self.n
    }

    fn rank(&self, i: usize, c: u8) -> Result<usize> {
        check_range(i, 0, self.n)?;
        if self.counts[c as usize] == 0 {
            return Ok(0);
        }
        let (bits, len) = self.codes[c as usize];
        let mut pos = i;
        for (d, &v) in self.paths[c as usize].iter().enumerate() {
            let node = &self.nodes[v as usize];
            let ones = self.levels[d].rank1(node.start + pos) - node.ones_before;
            pos = if bits >> (len - 1 - d as u32) & 1 == 1 { ones } else { pos - ones };
        }
        Ok(pos)
    }

    fn select(&self, j: usize, c: u8) -> Result<Option<usize>> {
        if j == 0 {
            return Err(Error::param("select argument must be at least 1"));
        }
        if j as u64 > self.counts[c as usize] {
            return Ok(None);
        }
        let (bits, len) = self.codes[c as usize];
        let mut pos = j;
        for (d, &v) in self.paths[c as usize].iter().enumerate().rev() {
            let node = &self.nodes[v as usize];
            let bv = &self.levels[d];
            let global = if bits >> (len - 1 - d as u32) & 1 == 1 {
                bv.select1(node.ones_before + pos)
            } else {
                bv.select0(node.start - node.ones_before + pos)
            };
            pos = global.expect("occurrence inside node segment") - node.start;
        }
        Ok(Some(pos))
    }

    fn access(&self, i: usize) -> Result<u8> {
        check_range(i, 1, self.n)?;
        if self.code.height() == 0 {
            return Ok(self.code.symbols()[0] as u8);
        }
        let mut v = 0usize;
        let mut pos = i - 1;
        loop {
            let node = &self.nodes[v];
            let bv = &self.levels[node.level as usize];
            let bit = bv.get(node.start + pos);
            let ones = bv.rank1(node.start + pos) - node.ones_before;
            pos = if bit { ones } else { pos - ones };
            match node.children[bit as usize] {
                Child::Leaf(s) => return Ok(s),
                Child::Node(u) => v = u as usize,
            }
        }
    }

    fn counts(&self) -> [u64; 256] {
        *self.counts
    }

    fn size_in_bytes(&self) -> usize {
        crate::index::body_len(|w| self.write_body(w))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ScanOracle;

    const EXAMPLE: &[u8] = b"ANNB$AA";

    fn both(text: &[u8]) -> [HuffmanWaveletTree; 2] {
        [
            HuffmanWaveletTree::new(text, Backend::Plain).unwrap(),
            HuffmanWaveletTree::new(text, Backend::DEFAULT_RRR).unwrap(),
        ]
    }

    #[test]
    fn bwt_example_layout() {
        for wt in both(EXAMPLE) {
            // A=0, N=10, $=110, B=111.
            let root: String = wt.level_bits(0).unwrap().iter().map(|b| if b { '1' } else { '0' }).collect();
            assert_eq!(root, "0111100");
            assert_eq!(wt.height(), 3);
            assert_eq!(wt.stored_bits(), 3 + 2 * 2 + 3 + 3);
            assert_eq!(wt.node_bounds(0), vec![(0, 7)]);
            assert_eq!(wt.node_bounds(1), vec![(0, 4)]);
            assert_eq!(wt.node_bounds(2), vec![(0, 2)]);
        }
    }

    #[test]
    fn bwt_example_queries() {
        for wt in both(EXAMPLE) {
            assert_eq!(wt.rank(7, b'A').unwrap(), 3);
            assert_eq!(wt.rank(0, b'N').unwrap(), 0);
            assert_eq!(wt.rank(4, b'N').unwrap(), 2);
            assert_eq!(wt.rank(7, b'Z').unwrap(), 0);
            assert!(matches!(wt.rank(8, b'A'), Err(Error::Bounds { .. })));
            assert_eq!(wt.select(2, b'A').unwrap(), Some(6));
            assert_eq!(wt.select(1, b'$').unwrap(), Some(5));
            assert_eq!(wt.select(4, b'A').unwrap(), None);
            assert!(matches!(wt.select(0, b'A'), Err(Error::Param(_))));
            assert_eq!(wt.access(5).unwrap(), b'$');
            assert_eq!(wt.access(1).unwrap(), b'A');
            assert!(matches!(wt.access(8), Err(Error::Bounds { .. })));
        }
    }

    #[test]
    fn unary_text() {
        for wt in both(b"AAAA") {
            assert_eq!(wt.stored_bits(), 0);
            assert_eq!(wt.rank(3, b'A').unwrap(), 3);
            assert_eq!(wt.select(4, b'A').unwrap(), Some(4));
            assert_eq!(wt.select(5, b'A').unwrap(), None);
            assert_eq!(wt.access(2).unwrap(), b'A');
        }
    }

    #[test]
    fn empty_text_rejected() {
        assert!(matches!(HuffmanWaveletTree::new(b"", Backend::Plain), Err(Error::Param(_))));
    }

    #[test]
    fn random_text_matches_oracle() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(3);
        let text: Vec<u8> = (0..10_000).map(|_| rng.gen_range(0..64u8) * 3 + 1).collect();
        let oracle = ScanOracle::new(&text);
        let trees = both(&text);
        assert_eq!(trees[0].stored_bits(), trees[0].code.cost((0..256).map(|c| (c, trees[0].counts[c as usize]))).unwrap() as usize);
        for wt in &trees {
            for c in oracle.symbols() {
                for i in (0..=text.len()).step_by(7) {
                    assert_eq!(wt.rank(i, c).unwrap(), oracle.rank(i, c));
                }
                for j in 1..=oracle.count(c) + 1 {
                    assert_eq!(wt.select(j, c).unwrap(), oracle.select(j, c));
                }
            }
            for i in 1..=text.len() {
                assert_eq!(wt.access(i).unwrap(), text[i - 1]);
            }
        }
    }
}
