//! Wavelet forest: one canonical Huffman-shaped wavelet tree per block, all
//! stored in a single merged bitvector, plus three levels of rank directories.
//!
//! The text is cut into blocks of `b` symbols, superblocks of `b_s` and
//! hyperblocks of `b_h`. For symbol `c`:
//!
//! * `A_h[c, i_h]` counts `c` before hyperblock `i_h` (64-bit);
//! * `A_s[c, i_s]` counts `c` before superblock `i_s`, relative to its hyperblock;
//! * `A_b[c, i_b]` counts `c` before block `i_b`, relative to its superblock,
//!   and is stored only when `c` occurs in block `i_b`.
//!
//! Each block header is bit-packed as
//!
//! ```text
//! local alphabet bitmap (one bit per superblock symbol)
//! A_b entries, ceil(log2 b_s) bits per local symbol
//! code lengths, 5 bits per local symbol
//! tree height, 5 bits                                    \
//! leaves at depths 1..=height, ceil(log2(L+1)) bits each  | two or more
//! positions at depths 1..height, ceil(log2(b+1)) bits each | local symbols
//! zero count of every internal node, 16 bits each in BFS order (nav only)
//! ```
//!
//! where `L` is the number of local symbols. The leaf counts and level sizes
//! follow from the code lengths and the text, but storing them lets a query
//! set up its path in time proportional to the tree height.
//!
//! Tree bits are block-major, then level-major, then left to right by node.

mod local;

use crate::bits::{ceil_log2, count_ones_range, read_bits, BitBuf, IntVec};
use crate::bitvector::{Backend, BitVector, RankSelect};
use crate::error::{check_range, Error, Result};
use crate::huffman::{code_lengths, MAX_BLOCK_HEIGHT};
use crate::serial::{Reader, Writer};
use crate::SymbolIndex;

use local::{canonical_codes, select_up, BlockShape, LocalNav, MAX_DEPTH, NAV_WIDTH};
pub use local::{Frame, NodeStack};

const LENGTH_WIDTH: u32 = 5;
const HEIGHT_WIDTH: u32 = 5;
const ABSENT: u16 = u16::MAX;
pub const MAX_BLOCK: usize = 1 << 16;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ForestParams {
    pub block: usize,
    pub superblock: usize,
    pub hyperblock: usize,
    /// Store per-node zero counts in block headers.
    pub nav: bool,
    pub backend: Backend,
}

impl Default for ForestParams {
    fn default() -> Self {
        ForestParams { block: 1 << 13, superblock: 1 << 20, hyperblock: 1 << 32, nav: true, backend: Backend::Plain }
    }
}

impl ForestParams {
    pub fn new(block: usize, superblock: usize, hyperblock: usize) -> Self {
        ForestParams { block, superblock, hyperblock, ..Self::default() }
    }

    pub fn with_nav(self, nav: bool) -> Self {
        ForestParams { nav, ..self }
    }

    pub fn with_backend(self, backend: Backend) -> Self {
        ForestParams { backend, ..self }
    }

    pub fn validate(&self) -> Result<()> {
        if self.block == 0 || self.block > MAX_BLOCK {
            return Err(Error::param(format!("block size {} outside 1..={MAX_BLOCK}", self.block)));
        }
        if self.superblock == 0 || self.superblock % self.block != 0 {
            return Err(Error::param(format!(
                "superblock size {} is not a multiple of block size {}",
                self.superblock, self.block
            )));
        }
        if self.hyperblock == 0 || self.hyperblock % self.superblock != 0 {
            return Err(Error::param(format!(
                "hyperblock size {} is not a multiple of superblock size {}",
                self.hyperblock, self.superblock
            )));
        }
        self.backend.validate()
    }

    fn blocks_per_superblock(&self) -> usize {
        self.superblock / self.block
    }

    fn superblocks_per_hyperblock(&self) -> usize {
        self.hyperblock / self.superblock
    }
}

/// Alphabet of one superblock: global symbol ids mapped to a dense local range.
#[derive(Clone, Debug, PartialEq, Eq)]
struct SuperblockHeader {
    /// Local code per global id, `ABSENT` when the symbol does not occur.
    local_code: Vec<u16>,
    /// Global id per local code.
    symbols: Vec<u8>,
}

impl SuperblockHeader {
    fn new(sigma: usize, symbols: Vec<u8>) -> Self {
        let mut local_code = vec![ABSENT; sigma];
        for (l, &g) in symbols.iter().enumerate() {
            local_code[g as usize] = l as u16;
        }
        SuperblockHeader { local_code, symbols }
    }
}

/// Decoded view of one block header.
struct BlockHeader<'a> {
    words: &'a [u64],
    /// Bit offset of the bitmap.
    at: usize,
    sb_sigma: usize,
    rank_width: u32,
    size_width: u32,
    /// Positions in the block.
    block_len: usize,
}

/// Tree layout of a block with two or more symbols.
struct BlockTree {
    shape: BlockShape,
    size: [u32; MAX_DEPTH + 1],
    /// Bit offset of the zero counts.
    nav_at: usize,
}

impl<'a> BlockHeader<'a> {
    /// Local index of superblock symbol `lc`, if the block stores it.
    fn find(&self, lc: usize) -> Option<usize> {
        if read_bits(self.words, self.at + lc, 1) == 0 {
            return None;
        }
        Some(count_ones_range(self.words, self.at, lc))
    }

    fn local_sigma(&self) -> usize {
        count_ones_range(self.words, self.at, self.sb_sigma)
    }

    fn rel_rank(&self, li: usize) -> usize {
        let at = self.at + self.sb_sigma + li * self.rank_width as usize;
        read_bits(self.words, at, self.rank_width) as usize
    }

    fn lengths_at(&self, local_sigma: usize) -> usize {
        self.at + self.sb_sigma + local_sigma * self.rank_width as usize
    }

    fn length(&self, local_sigma: usize, li: usize) -> u32 {
        let at = self.lengths_at(local_sigma) + li * LENGTH_WIDTH as usize;
        read_bits(self.words, at, LENGTH_WIDTH) as u32
    }

    /// Shape and level sizes; the block must store at least two symbols.
    fn tree(&self, local_sigma: usize) -> BlockTree {
        let mut at = self.lengths_at(local_sigma) + local_sigma * LENGTH_WIDTH as usize;
        let height = read_bits(self.words, at, HEIGHT_WIDTH) as usize;
        at += HEIGHT_WIDTH as usize;
        let leaf_width = ceil_log2(local_sigma as u64 + 1);
        let mut leaves = [0u16; MAX_DEPTH + 1];
        for l in &mut leaves[1..=height] {
            *l = read_bits(self.words, at, leaf_width) as u16;
            at += leaf_width as usize;
        }
        let mut size = [0u32; MAX_DEPTH + 1];
        size[0] = self.block_len as u32;
        for s in &mut size[1..height] {
            *s = read_bits(self.words, at, self.size_width) as u32;
            at += self.size_width as usize;
        }
        BlockTree { shape: BlockShape::from_leaves(height as u32, leaves), size, nav_at: at }
    }

    /// Codeword and length of local symbol `li`: canonical within a length,
    /// ordered by local index.
    fn code_of(&self, tree: &BlockTree, local_sigma: usize, li: usize) -> (u32, u32) {
        let len = self.length(local_sigma, li);
        let before = count_equal(self.words, self.lengths_at(local_sigma), li, len);
        (tree.shape.first[len as usize] + before as u32, len)
    }

    /// Local index of the `nth` symbol (0-based) whose code has length `len`.
    fn nth_of_length(&self, local_sigma: usize, len: u32, nth: u32) -> usize {
        let mut seen = 0;
        for li in 0..local_sigma {
            if self.length(local_sigma, li) == len {
                if seen == nth {
                    return li;
                }
                seen += 1;
            }
        }
        unreachable!("leaf {nth} beyond code class {len}")
    }

    /// Superblock-local code of the `li`-th local symbol.
    fn superblock_code(&self, li: usize) -> usize {
        let mut seen = 0;
        for lc in 0..self.sb_sigma {
            if read_bits(self.words, self.at + lc, 1) == 1 {
                if seen == li {
                    return lc;
                }
                seen += 1;
            }
        }
        unreachable!("local symbol {li} beyond block alphabet")
    }
}

/// Number of the first `count` code length fields at bit `at` equal to
/// `value`, twelve fields per word.
fn count_equal(words: &[u64], at: usize, count: usize, value: u32) -> usize {
    const PER_WORD: usize = 12;
    const LOW: u64 = {
        let mut m = 0u64;
        let mut k = 0;
        while k < PER_WORD {
            m |= 1 << (LENGTH_WIDTH as usize * k);
            k += 1;
        }
        m
    };
    const HIGH: u64 = LOW << (LENGTH_WIDTH - 1);
    const REST: u64 = LOW * 0xf;
    let pattern = LOW * value as u64;
    let mut total = 0;
    let mut done = 0;
    while done < count {
        let k = (count - done).min(PER_WORD);
        let width = k as u32 * LENGTH_WIDTH;
        let y = read_bits(words, at + done * LENGTH_WIDTH as usize, width) ^ pattern;
        let nonzero = ((y & REST) + REST) | y;
        let fields = if k == PER_WORD { HIGH } else { HIGH & ((1 << width) - 1) };
        total += (!nonzero & fields).count_ones() as usize;
        done += k;
    }
    total
}

/// Intermediate values of one select, all positions and indices 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SelectTrace {
    pub hyperblock: usize,
    pub superblock: usize,
    pub block: usize,
    /// Occurrence number within the block.
    pub local_rank: usize,
    /// Position within the block.
    pub local_position: usize,
    pub position: usize,
    /// Depth of the descent inside the block tree.
    pub depth: usize,
}

/// Serialized size of each component, in bytes.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct SpaceBreakdown {
    pub alphabet: usize,
    pub hyperblock_ranks: usize,
    pub superblock_ranks: usize,
    pub superblock_headers: usize,
    pub block_headers: usize,
    pub block_offsets: usize,
    pub merged: usize,
}

impl SpaceBreakdown {
    pub fn total(&self) -> usize {
        self.alphabet
            + self.hyperblock_ranks
            + self.superblock_ranks
            + self.superblock_headers
            + self.block_headers
            + self.block_offsets
            + self.merged
    }
}

#[derive(Clone, Debug)]
pub struct WaveletForest {
    params: ForestParams,
    n: usize,
    alphabet: Vec<u8>,
    gid: Box<[u16; 256]>,
    totals: Vec<u64>,
    /// `A_h`, indexed `gid * hyperblocks + i_h`.
    hyper_ranks: Vec<u64>,
    /// `A_s`, indexed `gid * superblocks + i_s`.
    super_ranks: IntVec,
    superblocks: Vec<SuperblockHeader>,
    headers: BitBuf,
    header_offsets: Vec<u64>,
    tree_offsets: Vec<u64>,
    merged: BitVector,
}

impl WaveletForest {
    pub fn new(text: &[u8], params: ForestParams) -> Result<Self> {
        params.validate()?;
        if text.is_empty() {
            return Err(Error::param("cannot index an empty text"));
        }
        let n = text.len();
        let mut counts = [0u64; 256];
        for &c in text {
            counts[c as usize] += 1;
        }
        let alphabet: Vec<u8> = (0..=255u8).filter(|&c| counts[c as usize] > 0).collect();
        let sigma = alphabet.len();
        let mut gid = Box::new([ABSENT; 256]);
        for (g, &c) in alphabet.iter().enumerate() {
            gid[c as usize] = g as u16;
        }
        let totals: Vec<u64> = alphabet.iter().map(|&c| counts[c as usize]).collect();

        let nb = n.div_ceil(params.block);
        let ns = n.div_ceil(params.superblock);
        let nh = n.div_ceil(params.hyperblock);
        let rank_width = ceil_log2(params.superblock as u64);
        let mut hyper_ranks = vec![0u64; sigma * nh];
        let mut super_table = vec![0u64; sigma * ns];
        let mut superblocks = Vec::with_capacity(ns);
        let mut headers = BitBuf::new();
        let mut header_offsets = Vec::with_capacity(nb + 1);
        let mut tree_offsets = Vec::with_capacity(nb + 1);
        let mut merged = BitBuf::new();

        let mut running = vec![0u64; sigma];
        let mut in_hyper = vec![0u64; sigma];
        let mut in_super = vec![0u64; sigma];
        let mut local = vec![0u64; sigma];
        let text_gid: Vec<u8> = text.iter().map(|&c| gid[c as usize] as u8).collect();
        for is in 0..ns {
            let sb_start = is * params.superblock;
            let sb_end = (sb_start + params.superblock).min(n);
            if sb_start % params.hyperblock == 0 {
                let ih = sb_start / params.hyperblock;
                for g in 0..sigma {
                    hyper_ranks[g * nh + ih] = running[g];
                }
                in_hyper.fill(0);
            }
            for g in 0..sigma {
                super_table[g * ns + is] = in_hyper[g];
            }
            let mut present = vec![false; sigma];
            for &g in &text_gid[sb_start..sb_end] {
                present[g as usize] = true;
            }
            let sb = SuperblockHeader::new(sigma, (0..sigma).filter(|&g| present[g]).map(|g| g as u8).collect());
            in_super.fill(0);
            for start in (sb_start..sb_end).step_by(params.block) {
                let block = &text_gid[start..(start + params.block).min(sb_end)];
                header_offsets.push(headers.len() as u64);
                tree_offsets.push(merged.len() as u64);
                local.fill(0);
                for &g in block {
                    local[g as usize] += 1;
                }
                write_block(block, &local, &sb, &in_super, rank_width, params.block, params.nav, &mut headers, &mut merged);
                for g in 0..sigma {
                    in_super[g] += local[g];
                }
            }
            for g in 0..sigma {
                in_hyper[g] += in_super[g];
                running[g] += in_super[g];
            }
            superblocks.push(sb);
        }
        header_offsets.push(headers.len() as u64);
        tree_offsets.push(merged.len() as u64);

        let mut super_ranks = IntVec::new(ceil_log2(params.hyperblock as u64));
        for v in super_table {
            super_ranks.push(v);
        }
        let merged = params.backend.build(&merged)?;
        Ok(WaveletForest {
            params,
            n,
            alphabet,
            gid,
            totals,
            hyper_ranks,
            super_ranks,
            superblocks,
            headers,
            header_offsets,
            tree_offsets,
            merged,
        })
    }

    pub fn params(&self) -> &ForestParams {
        &self.params
    }

    /// Number of distinct symbols.
    pub fn sigma(&self) -> usize {
        self.alphabet.len()
    }

    pub fn alphabet(&self) -> &[u8] {
        &self.alphabet
    }

    pub fn block_count(&self) -> usize {
        self.header_offsets.len() - 1
    }

    pub fn superblock_count(&self) -> usize {
        self.superblocks.len()
    }

    pub fn hyperblock_count(&self) -> usize {
        self.n.div_ceil(self.params.hyperblock)
    }

    /// Tree bits of all blocks.
    pub fn merged(&self) -> &BitVector {
        &self.merged
    }

    pub fn stored_bits(&self) -> usize {
        self.merged.len()
    }

    /// Length of block `ib` (1-based).
    pub fn block_len(&self, ib: usize) -> usize {
        let start = (ib - 1) * self.params.block;
        (start + self.params.block).min(self.n) - start
    }

    /// Symbols stored in block `ib` (1-based), ascending.
    pub fn block_alphabet(&self, ib: usize) -> Vec<u8> {
        let sb = &self.superblocks[(ib - 1) / self.params.blocks_per_superblock()];
        let h = self.header(ib - 1);
        (0..h.local_sigma()).map(|li| self.alphabet[sb.symbols[h.superblock_code(li)] as usize]).collect()
    }

    /// Code length of `c` in block `ib` (1-based), if the block stores `c`.
    pub fn block_code_length(&self, ib: usize, c: u8) -> Option<u32> {
        let (h, li) = self.block_symbol(ib - 1, c)?;
        Some(h.length(h.local_sigma(), li))
    }

    /// `A_h[c, i_h]`.
    pub fn hyperblock_rank(&self, c: u8, ih: usize) -> Option<u64> {
        let g = self.gid(c)?;
        Some(self.hyper_ranks[g * self.hyperblock_count() + ih - 1])
    }

    /// `A_s[c, i_s]`, relative to the enclosing hyperblock.
    pub fn superblock_rank(&self, c: u8, is: usize) -> Option<u64> {
        let g = self.gid(c)?;
        Some(self.super_ranks.get(g * self.superblock_count() + is - 1))
    }

    /// `A_b[c, i_b]`, relative to the enclosing superblock; `None` when block
    /// `i_b` does not store `c`.
    pub fn block_rank(&self, c: u8, ib: usize) -> Option<usize> {
        let (h, li) = self.block_symbol(ib - 1, c)?;
        Some(h.rel_rank(li))
    }

    pub fn space(&self) -> SpaceBreakdown {
        let mut w = Writer::new();
        self.write_body(&mut w);
        let sections = section_sizes(&w.into_bytes());
        SpaceBreakdown {
            alphabet: sections[0],
            hyperblock_ranks: sections[1],
            superblock_ranks: sections[2],
            superblock_headers: sections[3],
            block_headers: sections[4],
            block_offsets: sections[5],
            merged: sections[6],
        }
    }

    #[inline]
    fn gid(&self, c: u8) -> Option<usize> {
        match self.gid[c as usize] {
            ABSENT => None,
            g => Some(g as usize),
        }
    }

    fn header(&self, b: usize) -> BlockHeader<'_> {
        let sb = &self.superblocks[b / self.params.blocks_per_superblock()];
        let start = b * self.params.block;
        BlockHeader {
            words: self.headers.words(),
            at: self.header_offsets[b] as usize,
            sb_sigma: sb.symbols.len(),
            rank_width: ceil_log2(self.params.superblock as u64),
            size_width: size_width(self.params.block),
            block_len: (start + self.params.block).min(self.n) - start,
        }
    }

    /// Header of 0-based block `b` and the local index of `c` in it.
    fn block_symbol(&self, b: usize, c: u8) -> Option<(BlockHeader<'_>, usize)> {
        let g = self.gid(c)?;
        let lc = self.superblocks[b / self.params.blocks_per_superblock()].local_code[g];
        if lc == ABSENT {
            return None;
        }
        let h = self.header(b);
        let li = h.find(lc as usize)?;
        Some((h, li))
    }

    fn nav<'s>(&'s self, b: usize, tree: &'s BlockTree) -> LocalNav<'s> {
        let nav = self.params.nav.then(|| (self.headers.words(), tree.nav_at));
        LocalNav::new(&tree.shape, &self.merged, self.tree_offsets[b] as usize, &tree.size, nav)
    }

    /// Occurrences of local symbol `li` among the first `pos` positions of block `b`.
    fn block_rank_of(&self, b: usize, h: &BlockHeader<'_>, li: usize, pos: usize) -> usize {
        let local_sigma = h.local_sigma();
        if local_sigma == 1 {
            return pos;
        }
        let tree = h.tree(local_sigma);
        let (code, len) = h.code_of(&tree, local_sigma, li);
        self.nav(b, &tree).rank(code, len, pos)
    }

    /// Step 1: largest `i_h` with `A_h[c, i_h] < j`. `None` when `c` has
    /// fewer than `j` occurrences.
    pub fn locate_hyperblock(&self, j: usize, c: u8) -> Option<usize> {
        let g = self.gid(c)?;
        if j == 0 || self.totals[g] < j as u64 {
            return None;
        }
        let nh = self.hyperblock_count();
        Some(last_below(&self.hyper_ranks[g * nh..(g + 1) * nh], j as u64))
    }

    /// Step 2: largest superblock `i_s` of hyperblock `i_h` with
    /// `A_h[c, i_h] + A_s[c, i_s] < j`.
    pub fn locate_superblock(&self, j: usize, c: u8, ih: usize) -> usize {
        let g = self.gid(c).expect("symbol occurs");
        let ns = self.superblock_count();
        let target = j as u64 - self.hyper_ranks[g * self.hyperblock_count() + ih - 1];
        let per = self.params.superblocks_per_hyperblock();
        let lo = (ih - 1) * per;
        let hi = (ih * per).min(ns);
        // Invariant: entry at lo is 0 < target.
        let (mut a, mut b) = (lo, hi);
        while b - a > 1 {
            let mid = a + (b - a) / 2;
            if self.super_ranks.get(g * ns + mid) < target {
                a = mid;
            } else {
                b = mid;
            }
        }
        a + 1
    }

    /// Step 3: scan the blocks of superblock `i_s` right to left for the first
    /// one storing `c` with a rank below `j`. Returns the block and the
    /// occurrence number inside it.
    pub fn locate_block(&self, j: usize, c: u8, is: usize) -> (usize, usize) {
        let g = self.gid(c).expect("symbol occurs");
        let ih = (is - 1) / self.params.superblocks_per_hyperblock();
        let before = self.hyper_ranks[g * self.hyperblock_count() + ih]
            + self.super_ranks.get(g * self.superblock_count() + is - 1);
        let target = j - before as usize;
        let per = self.params.blocks_per_superblock();
        let first = (is - 1) * per;
        let last = (is * per).min(self.block_count());
        let sb = &self.superblocks[is - 1];
        let lc = sb.local_code[g] as usize;
        let words = self.headers.words();
        let rank_width = ceil_log2(self.params.superblock as u64) as usize;
        for b in (first..last).rev() {
            let at = self.header_offsets[b] as usize;
            if read_bits(words, at + lc, 1) == 1 {
                let li = count_ones_range(words, at, lc);
                let r = read_bits(words, at + sb.symbols.len() + li * rank_width, rank_width as u32) as usize;
                if r < target {
                    return (b + 1, target - r);
                }
            }
        }
        unreachable!("superblock {is} holds fewer than {target} occurrences of {c}")
    }

    /// Step 4: root-to-leaf path of `c` in the tree of block `i_b`.
    pub fn descend_to_leaf(&self, ib: usize, c: u8) -> Result<NodeStack> {
        check_range(ib, 1, self.block_count())?;
        let b = ib - 1;
        let (h, li) = self.block_symbol(b, c).ok_or(Error::UnknownSymbol(c as u32))?;
        let local_sigma = h.local_sigma();
        if local_sigma == 1 {
            return Ok(NodeStack::default());
        }
        let tree = h.tree(local_sigma);
        let (code, len) = h.code_of(&tree, local_sigma, li);
        Ok(self.nav(b, &tree).descend(code, len))
    }

    /// Step 5: position within the block of the `j`-th occurrence, walking
    /// the stack of [`descend_to_leaf`](Self::descend_to_leaf) upwards.
    pub fn local_select_up(&self, stack: &NodeStack, j: usize) -> usize {
        select_up(&self.merged, stack, j)
    }

    /// Select with all intermediate values.
    pub fn select_traced(&self, j: usize, c: u8) -> Result<Option<SelectTrace>> {
        if j == 0 {
            return Err(Error::param("select needs j >= 1"));
        }
        let Some(ih) = self.locate_hyperblock(j, c) else {
            return Ok(None);
        };
        let is = self.locate_superblock(j, c, ih);
        let (ib, local_rank) = self.locate_block(j, c, is);
        let stack = self.descend_to_leaf(ib, c)?;
        let k = self.local_select_up(&stack, local_rank);
        Ok(Some(SelectTrace {
            hyperblock: ih,
            superblock: is,
            block: ib,
            local_rank,
            local_position: k,
            position: (ib - 1) * self.params.block + k,
            depth: stack.len(),
        }))
    }

    pub(crate) fn write_body(&self, w: &mut Writer) {
        w.section(|w| {
            w.u8s(&self.alphabet);
            w.u64s(&self.totals);
        });
        w.section(|w| w.u64s(&self.hyper_ranks));
        w.section(|w| {
            w.u64(self.super_ranks.len() as u64);
            w.u64s(self.super_ranks.words());
        });
        w.section(|w| {
            w.u64(self.superblocks.len() as u64);
            for sb in &self.superblocks {
                w.u8s(&sb.symbols);
            }
        });
        w.section(|w| {
            w.u64(self.headers.len() as u64);
            w.u64s(self.headers.words());
        });
        w.section(|w| {
            w.u64s(&self.header_offsets);
            w.u64s(&self.tree_offsets);
        });
        w.section(|w| self.merged.write(w));
    }

    pub(crate) fn read_body(r: &mut Reader<'_>, params: ForestParams, n: usize, sigma: usize) -> Result<Self> {
        let bad = |what: &str| Error::format(format!("forest: {what}"));
        if n == 0 {
            return Err(bad("empty text"));
        }
        let (alphabet, totals) = r.section("alphabet", |r| Ok((r.u8s()?, r.u64s()?)))?;
        if alphabet.len() != sigma || totals.len() != sigma || !alphabet.windows(2).all(|p| p[0] < p[1]) {
            return Err(bad("alphabet inconsistent with header"));
        }
        if totals.iter().sum::<u64>() != n as u64 || totals.contains(&0) {
            return Err(bad("symbol totals do not sum to n"));
        }
        let nb = n.div_ceil(params.block);
        let ns = n.div_ceil(params.superblock);
        let nh = n.div_ceil(params.hyperblock);
        let hyper_ranks = r.section("hyperblock ranks", |r| r.u64s())?;
        if hyper_ranks.len() != sigma * nh {
            return Err(bad("hyperblock rank table has wrong size"));
        }
        let super_ranks = r.section("superblock ranks", |r| {
            let len = r.usize()?;
            let words = r.u64s()?;
            IntVec::from_parts(words, ceil_log2(params.hyperblock as u64), len)
                .filter(|v| v.len() == sigma * ns)
                .ok_or_else(|| bad("superblock rank table has wrong size"))
        })?;
        let superblocks = r.section("superblock headers", |r| {
            let count = r.usize()?;
            if count != ns {
                return Err(bad("superblock count mismatch"));
            }
            (0..count)
                .map(|_| {
                    let symbols = r.u8s()?;
                    if !symbols.windows(2).all(|p| p[0] < p[1]) || symbols.last().is_some_and(|&g| g as usize >= sigma) {
                        return Err(bad("superblock alphabet out of range"));
                    }
                    Ok(SuperblockHeader::new(sigma, symbols))
                })
                .collect::<Result<Vec<_>>>()
        })?;
        let headers = r.section("block headers", |r| {
            let len = r.usize()?;
            let words = r.u64s()?;
            if words.len() != len.div_ceil(64) {
                return Err(bad("block header bits have wrong size"));
            }
            Ok(BitBuf::from_words(words, len))
        })?;
        let (header_offsets, tree_offsets) = r.section("block offsets", |r| Ok((r.u64s()?, r.u64s()?)))?;
        let merged = r.section("merged bitvector", BitVector::read)?;
        if merged.backend() != params.backend {
            return Err(bad("bitvector backend differs from header"));
        }
        let monotone = |v: &[u64], end: usize| {
            v.len() == nb + 1 && v[0] == 0 && v.windows(2).all(|p| p[0] <= p[1]) && v[nb] as usize == end
        };
        if !monotone(&header_offsets, headers.len()) || !monotone(&tree_offsets, merged.len()) {
            return Err(bad("block offsets inconsistent"));
        }
        let mut gid = Box::new([ABSENT; 256]);
        for (g, &c) in alphabet.iter().enumerate() {
            gid[c as usize] = g as u16;
        }
        Ok(WaveletForest {
            params,
            n,
            alphabet,
            gid,
            totals,
            hyper_ranks,
            super_ranks,
            superblocks,
            headers,
            header_offsets,
            tree_offsets,
            merged,
        })
    }
}

/// Serializes one block: header fields to `headers`, tree levels to `merged`.
#[allow(clippy::too_many_arguments)]
fn write_block(
    block: &[u8],
    local: &[u64],
    sb: &SuperblockHeader,
    in_super: &[u64],
    rank_width: u32,
    block_size: usize,
    nav: bool,
    headers: &mut BitBuf,
    merged: &mut BitBuf,
) {
    let members: Vec<usize> = sb.symbols.iter().map(|&g| g as usize).filter(|&g| local[g] > 0).collect();
    for &g in &sb.symbols {
        headers.push(local[g as usize] > 0);
    }
    for &g in &members {
        headers.push_bits(in_super[g], rank_width);
    }
    let weights: Vec<u64> = members.iter().map(|&g| local[g]).collect();
    let lengths: Vec<u8> = code_lengths(&weights).into_iter().map(|l| l as u8).collect();
    debug_assert!(lengths.iter().all(|&l| l as u32 <= MAX_BLOCK_HEIGHT));
    for &l in &lengths {
        headers.push_bits(l as u64, LENGTH_WIDTH);
    }
    if members.len() < 2 {
        return;
    }

    let shape = BlockShape::from_lengths(&lengths);
    let height = shape.height as usize;
    headers.push_bits(height as u64, HEIGHT_WIDTH);
    let leaf_width = ceil_log2(members.len() as u64 + 1);
    for &l in &shape.leaves[1..=height] {
        headers.push_bits(l as u64, leaf_width);
    }
    let mut size = vec![0u64; height + 1];
    for (li, &g) in members.iter().enumerate() {
        for s in &mut size[..lengths[li] as usize] {
            *s += local[g];
        }
    }
    for &s in &size[1..height] {
        headers.push_bits(s, size_width(block_size));
    }
    let mut codes = vec![0u32; members.len()];
    canonical_codes(&shape, &lengths, &mut codes);
    let internal = shape.internal_nodes();
    let mut node_len = vec![0u32; internal];
    let mut node_zeros = vec![0u32; internal];
    for (li, &g) in members.iter().enumerate() {
        let (code, len) = (codes[li], lengths[li] as usize);
        for d in 0..len {
            let v = shape.node_base[d] as usize + shape.node_index(d, code >> (len - d));
            node_len[v] += local[g] as u32;
            if code >> (len - 1 - d) & 1 == 0 {
                node_zeros[v] += local[g] as u32;
            }
        }
    }
    if nav {
        for &z in &node_zeros {
            headers.push_bits(z as u64, NAV_WIDTH);
        }
    }

    // Write cursor of every node, relative to the block's first tree bit.
    let mut cursor = vec![0usize; internal];
    let mut at = 0usize;
    for (v, c) in cursor.iter_mut().enumerate() {
        *c = at;
        at += node_len[v] as usize;
    }
    let total = at;
    let mut words = vec![0u64; total.div_ceil(64)];
    let mut local_of = [0u16; 256];
    for (li, &g) in members.iter().enumerate() {
        local_of[g] = li as u16;
    }
    for &g in block {
        let li = local_of[g as usize] as usize;
        let (code, len) = (codes[li], lengths[li] as usize);
        for d in 0..len {
            let v = shape.node_base[d] as usize + shape.node_index(d, code >> (len - d));
            if code >> (len - 1 - d) & 1 == 1 {
                words[cursor[v] / 64] |= 1 << (cursor[v] % 64);
            }
            cursor[v] += 1;
        }
    }
    let mut left = total;
    for w in words {
        let width = left.min(64);
        merged.push_bits(w, width as u32);
        left -= width;
    }
}

/// Width of a level size field for blocks of `block` symbols.
fn size_width(block: usize) -> u32 {
    ceil_log2(block as u64 + 1)
}

/// Byte length of each top-level section of a forest body.
fn section_sizes(body: &[u8]) -> Vec<usize> {
    let mut out = Vec::new();
    let mut at = 0;
    while at < body.len() {
        let len = u64::from_le_bytes(body[at..at + 8].try_into().unwrap()) as usize;
        out.push(8 + len);
        at += 8 + len;
    }
    out
}

/// 1-based index of the last entry below `j` in a non-decreasing table whose
/// first entry is below `j`.
pub fn last_below(ranks: &[u64], j: u64) -> usize {
    ranks.partition_point(|&r| r < j)
}

impl SymbolIndex for WaveletForest {
    fn len(&self) -> usize {
        self.n
    }

    fn rank(&self, i: usize, c: u8) -> Result<usize> {
        check_range(i, 0, self.n)?;
        let Some(g) = self.gid(c) else {
            return Ok(0);
        };
        if i == 0 {
            return Ok(0);
        }
        let b = (i - 1) / self.params.block;
        let pos = i - b * self.params.block;
        let is = b / self.params.blocks_per_superblock();
        let ih = is / self.params.superblocks_per_hyperblock();
        let base = self.hyper_ranks[g * self.hyperblock_count() + ih] as usize
            + self.super_ranks.get(g * self.superblock_count() + is) as usize;
        let lc = self.superblocks[is].local_code[g];
        if lc == ABSENT {
            return Ok(base);
        }
        let h = self.header(b);
        if let Some(li) = h.find(lc as usize) {
            return Ok(base + h.rel_rank(li) + self.block_rank_of(b, &h, li, pos));
        }
        let first = is * self.params.blocks_per_superblock();
        for prev in (first..b).rev() {
            let h = self.header(prev);
            if let Some(li) = h.find(lc as usize) {
                let whole = self.params.block;
                return Ok(base + h.rel_rank(li) + self.block_rank_of(prev, &h, li, whole));
            }
        }
        Ok(base)
    }

    fn select(&self, j: usize, c: u8) -> Result<Option<usize>> {
        Ok(self.select_traced(j, c)?.map(|t| t.position))
    }

    fn access(&self, i: usize) -> Result<u8> {
        check_range(i, 1, self.n)?;
        let b = (i - 1) / self.params.block;
        let pos = i - b * self.params.block;
        let h = self.header(b);
        let local_sigma = h.local_sigma();
        let li = if local_sigma == 1 {
            0
        } else {
            let tree = h.tree(local_sigma);
            let (len, nth) = self.nav(b, &tree).access(pos);
            h.nth_of_length(local_sigma, len, nth)
        };
        let sb = &self.superblocks[b / self.params.blocks_per_superblock()];
        Ok(self.alphabet[sb.symbols[h.superblock_code(li)] as usize])
    }

    fn counts(&self) -> [u64; 256] {
        let mut out = [0u64; 256];
        for (&c, &t) in self.alphabet.iter().zip(&self.totals) {
            out[c as usize] = t;
        }
        out
    }

    fn size_in_bytes(&self) -> usize {
        crate::index::body_len(|w| self.write_body(w))
    }
}

#[cfg(test)]
mod tests;
