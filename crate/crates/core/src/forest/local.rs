//! Pointerless navigation inside one block's canonical Huffman-shaped tree.
//!
//! A block's tree is stored level by level in the merged bitvector. At depth
//! `d` the canonical code places the `leaves[d]` leaves leftmost and the
//! internal nodes (numbered `0..internal[d]` left to right) rightmost, so the
//! children of all depth-`d` internal nodes, enumerated left to right, start
//! with the depth-`d+1` leaves. That gives, for internal node `i` at depth
//! `d+1` with child slot `s = leaves[d+1] + i` below parent `s / 2`:
//!
//! ```text
//! start(d+1, i) = start(d, s/2) + (s odd ? zeros(d, s/2) : 0) - leafcount(d+1)
//! ```
//!
//! where `leafcount(d+1)` is the number of positions whose code has length
//! `d+1`, the difference of two stored level sizes. Walking down a path
//! therefore needs only the zero count of each node on it. Those come from
//! the navigational header when present and from rank calls on the merged
//! bitvector otherwise.

use crate::bits::read_bits;
use crate::bitvector::{BitVector, RankSelect};
use crate::huffman::MAX_BLOCK_HEIGHT;

pub(crate) const MAX_DEPTH: usize = MAX_BLOCK_HEIGHT as usize + 1;
pub(crate) const NAV_WIDTH: u32 = 16;

/// Shape of a canonical tree, derived from the code lengths alone.
#[derive(Clone, Debug)]
pub(crate) struct BlockShape {
    pub height: u32,
    pub leaves: [u16; MAX_DEPTH + 1],
    pub first: [u32; MAX_DEPTH + 1],
    pub internal: [u16; MAX_DEPTH + 1],
    /// BFS number of the first internal node at each depth.
    pub node_base: [u16; MAX_DEPTH + 1],
}

impl BlockShape {
    pub fn from_lengths(lengths: &[u8]) -> Self {
        let mut leaves = [0u16; MAX_DEPTH + 1];
        let mut height = 0;
        for &l in lengths {
            leaves[l as usize] += 1;
            height = height.max(l as u32);
        }
        Self::from_leaves(height, leaves)
    }

    /// Shape from the number of leaves at each depth.
    pub fn from_leaves(height: u32, leaves: [u16; MAX_DEPTH + 1]) -> Self {
        let mut shape = BlockShape {
            height,
            leaves,
            first: [0; MAX_DEPTH + 1],
            internal: [0; MAX_DEPTH + 1],
            node_base: [0; MAX_DEPTH + 1],
        };
        let mut bfs = 0u16;
        for d in 0..=height as usize {
            if d > 0 {
                shape.first[d] = (shape.first[d - 1] + shape.leaves[d - 1] as u32) << 1;
            }
            shape.internal[d] = ((1u32 << d) - shape.first[d] - shape.leaves[d] as u32) as u16;
            shape.node_base[d] = bfs;
            bfs += shape.internal[d];
        }
        shape
    }

    pub fn internal_nodes(&self) -> usize {
        (0..=self.height as usize).map(|d| self.internal[d] as usize).sum()
    }

    /// Internal-node index at depth `d` of the node with the given `d`-bit prefix.
    #[inline]
    pub fn node_index(&self, d: usize, prefix: u32) -> usize {
        (prefix - self.first[d] - self.leaves[d] as u32) as usize
    }

    #[inline]
    pub fn is_leaf(&self, d: usize, prefix: u32) -> bool {
        prefix < self.first[d] + self.leaves[d] as u32
    }
}

/// Canonical codeword of every symbol, given lengths in symbol order.
pub(crate) fn canonical_codes(shape: &BlockShape, lengths: &[u8], out: &mut [u32]) {
    let mut next = shape.first;
    for (code, &l) in out.iter_mut().zip(lengths) {
        *code = next[l as usize];
        next[l as usize] += 1;
    }
}

/// Root-to-leaf path through one block tree.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Frame {
    /// Segment start in the merged bitvector (0-based, inclusive).
    pub start: usize,
    /// Segment end in the merged bitvector (exclusive).
    pub end: usize,
    /// Branch taken below this node: `false` left, `true` right.
    pub bit: bool,
}

/// Fixed-capacity stack of frames; depth never exceeds the block height bound.
#[derive(Clone, Debug, Default)]
pub struct NodeStack {
    frames: [Frame; MAX_DEPTH],
    len: usize,
}

impl NodeStack {
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn frames(&self) -> &[Frame] {
        &self.frames[..self.len]
    }

    pub(crate) fn push(&mut self, f: Frame) {
        assert!(self.len < MAX_DEPTH, "block tree deeper than {MAX_BLOCK_HEIGHT}");
        self.frames[self.len] = f;
        self.len += 1;
    }
}

pub(crate) struct LocalNav<'a> {
    shape: &'a BlockShape,
    merged: &'a BitVector,
    /// Positions stored at each depth.
    size: &'a [u32; MAX_DEPTH + 1],
    /// First merged bit of each depth.
    level: [usize; MAX_DEPTH + 1],
    /// Header words and the bit offset of the zero counts, when stored.
    nav: Option<(&'a [u64], usize)>,
}

/// Segment of one internal node in the merged bitvector.
#[derive(Clone, Copy)]
struct Node {
    start: usize,
    len: usize,
}

impl<'a> LocalNav<'a> {
    pub fn new(
        shape: &'a BlockShape,
        merged: &'a BitVector,
        tree_base: usize,
        size: &'a [u32; MAX_DEPTH + 1],
        nav: Option<(&'a [u64], usize)>,
    ) -> Self {
        let mut level = [0usize; MAX_DEPTH + 1];
        let mut at = tree_base;
        for d in 0..=shape.height as usize {
            level[d] = at;
            at += size[d] as usize;
        }
        LocalNav { shape, merged, size, level, nav }
    }

    fn root(&self) -> Node {
        Node { start: self.level[0], len: self.size[0] as usize }
    }

    /// Zero count of internal node `i` at depth `d`; `ones_before` is
    /// `rank1(node.start)` when the caller already has it.
    #[inline]
    fn zeros(&self, d: usize, i: usize, node: Node, ones_before: Option<usize>) -> usize {
        match self.nav {
            Some((words, off)) => {
                let bfs = self.shape.node_base[d] as usize + i;
                read_bits(words, off + bfs * NAV_WIDTH as usize, NAV_WIDTH) as usize
            }
            None => {
                let before = ones_before.unwrap_or_else(|| self.merged.rank1(node.start));
                node.len - (self.merged.rank1(node.start + node.len) - before)
            }
        }
    }

    /// Internal child of `node` (depth `d`) along `bit`, given its zero count.
    #[inline]
    fn child(&self, d: usize, node: Node, bit: bool, zeros: usize) -> Node {
        let leaf_positions = (self.size[d] - self.size[d + 1]) as usize;
        let offset = node.start - self.level[d] + if bit { zeros } else { 0 };
        Node {
            start: self.level[d + 1] + offset - leaf_positions,
            len: if bit { node.len - zeros } else { zeros },
        }
    }

    /// Occurrences of the symbol with codeword `code` of length `len` among
    /// the first `pos` positions of the block.
    pub fn rank(&self, code: u32, len: u32, pos: usize) -> usize {
        let len = len as usize;
        let mut pos = pos;
        let mut node = self.root();
        for d in 0..len {
            if pos == 0 {
                break;
            }
            let bit = code >> (len - 1 - d) & 1 == 1;
            let before = self.merged.rank1(node.start);
            let ones = self.merged.rank1(node.start + pos) - before;
            pos = if bit { ones } else { pos - ones };
            if d + 1 < len {
                let i = self.shape.node_index(d, code >> (len - d));
                let z = self.zeros(d, i, node, Some(before));
                node = self.child(d, node, bit, z);
            }
        }
        pos
    }

    /// Root-to-leaf path for codeword `code` of length `len`.
    pub fn descend(&self, code: u32, len: u32) -> NodeStack {
        let len = len as usize;
        let mut stack = NodeStack::default();
        let mut node = self.root();
        for d in 0..len {
            let bit = code >> (len - 1 - d) & 1 == 1;
            stack.push(Frame { start: node.start, end: node.start + node.len, bit });
            if d + 1 < len {
                let i = self.shape.node_index(d, code >> (len - d));
                let z = self.zeros(d, i, node, None);
                node = self.child(d, node, bit, z);
            }
        }
        stack
    }

    /// Code length and index within its length class of the symbol at
    /// 1-based block position `pos`.
    pub fn access(&self, pos: usize) -> (u32, u32) {
        let mut pos = pos;
        let mut prefix = 0u32;
        let mut node = self.root();
        let mut d = 0usize;
        loop {
            let i = self.shape.node_index(d, prefix);
            let bit = self.merged.get(node.start + pos - 1);
            let before = self.merged.rank1(node.start);
            let ones = self.merged.rank1(node.start + pos) - before;
            pos = if bit { ones } else { pos - ones };
            prefix = prefix << 1 | bit as u32;
            if self.shape.is_leaf(d + 1, prefix) {
                return (d as u32 + 1, prefix - self.shape.first[d + 1]);
            }
            let z = self.zeros(d, i, node, Some(before));
            node = self.child(d, node, bit, z);
            d += 1;
        }
    }
}

/// Maps the `j`-th occurrence in the leaf back to a block position by
/// walking the stack upwards.
pub(crate) fn select_up(merged: &BitVector, stack: &NodeStack, j: usize) -> usize {
    let mut pos = j;
    for f in stack.frames().iter().rev() {
        let ones_before = merged.rank1(f.start);
        let global = if f.bit {
            merged.select1(ones_before + pos)
        } else {
            merged.select0(f.start - ones_before + pos)
        };
        pos = global.expect("occurrence inside node segment") - f.start;
        debug_assert!(pos <= f.end - f.start);
    }
    pos
}
