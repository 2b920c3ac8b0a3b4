//! Canonical Huffman codes.
//!
//! Code lengths come from the classical merge procedure with ties broken by
//! (weight, creation order), leaves being created in ascending symbol order.
//! Codewords are then assigned canonically in (length, symbol) order, so
//! the tree shape is fully described by the list of code lengths. At every
//! depth the leaves therefore occupy the leftmost positions and the internal
//! nodes the rightmost ones.

use std::cmp::Reverse;
use std::collections::{BTreeMap, BinaryHeap};

use crate::error::{Error, Result};

/// Height bound for inputs of length at most 2^16.
pub const MAX_BLOCK_HEIGHT: u32 = 22;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CanonicalHuffmanCode {
    /// Symbols in canonical order: code length ascending, then symbol.
    symbols: Vec<u32>,
    lengths: Vec<u32>,
    codes: Vec<u64>,
    /// `(symbol, canonical index)` sorted by symbol.
    lookup: Vec<(u32, u32)>,
    height: u32,
}

impl CanonicalHuffmanCode {
    /// Builds an optimal code. Symbols with zero count are ignored.
    pub fn build<I>(freqs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u64)>,
    {
        let mut merged: BTreeMap<u32, u64> = BTreeMap::new();
        for (sym, f) in freqs {
            if f > 0 {
                *merged.entry(sym).or_default() += f;
            }
        }
        if merged.is_empty() {
            return Err(Error::param("Huffman code needs at least one symbol with positive count"));
        }
        let weights: Vec<u64> = merged.values().copied().collect();
        let lengths = code_lengths(&weights);
        Self::from_lengths(merged.keys().copied().zip(lengths))
    }

    /// Rebuilds the canonical code from `(symbol, length)` pairs.
    pub fn from_lengths<I>(pairs: I) -> Result<Self>
    where
        I: IntoIterator<Item = (u32, u32)>,
    {
        let mut entries: Vec<(u32, u32)> = pairs.into_iter().map(|(s, l)| (l, s)).collect();
        entries.sort_unstable();
        if entries.is_empty() {
            return Err(Error::param("empty code"));
        }
        if entries.windows(2).any(|w| w[0].1 == w[1].1) {
            return Err(Error::param("duplicate symbol in code"));
        }
        let height = entries.last().unwrap().0;
        if height > 63 {
            return Err(Error::param(format!("code length {height} exceeds 63")));
        }
        if entries.len() == 1 {
            if height != 0 {
                return Err(Error::param("single-symbol code must have length 0"));
            }
        } else {
            // Kraft equality, in units of 2^-height.
            let kraft: u128 = entries.iter().map(|&(l, _)| 1u128 << (height - l)).sum();
            if entries[0].0 == 0 || kraft != 1u128 << height {
                return Err(Error::param("code lengths violate Kraft equality"));
            }
        }
        let mut codes = Vec::with_capacity(entries.len());
        let mut code = 0u64;
        let mut prev_len = entries[0].0;
        for (i, &(len, _)) in entries.iter().enumerate() {
            if i > 0 {
                code = (code + 1) << (len - prev_len);
            }
            codes.push(code);
            prev_len = len;
        }
        let symbols: Vec<u32> = entries.iter().map(|e| e.1).collect();
        let lengths: Vec<u32> = entries.iter().map(|e| e.0).collect();
        let mut lookup: Vec<(u32, u32)> = symbols.iter().enumerate().map(|(i, &s)| (s, i as u32)).collect();
        lookup.sort_unstable();
        Ok(CanonicalHuffmanCode { symbols, lengths, codes, lookup, height })
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }

    /// Symbols in canonical order.
    pub fn symbols(&self) -> &[u32] {
        &self.symbols
    }

    /// Code lengths parallel to [`symbols`](Self::symbols).
    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    fn index_of(&self, symbol: u32) -> Option<usize> {
        self.lookup
            .binary_search_by_key(&symbol, |&(s, _)| s)
            .ok()
            .map(|i| self.lookup[i].1 as usize)
    }

    pub fn length_of(&self, symbol: u32) -> Option<u32> {
        self.index_of(symbol).map(|i| self.lengths[i])
    }

    /// Codeword and length; the most significant of the `length` bits is
    /// the branch taken at the root (0 = left, 1 = right).
    pub fn code_of(&self, symbol: u32) -> Result<(u64, u32)> {
        let i = self.index_of(symbol).ok_or(Error::UnknownSymbol(symbol))?;
        Ok((self.codes[i], self.lengths[i]))
    }

    /// `Σ freq(s) · length(s)`.
    pub fn cost<I: IntoIterator<Item = (u32, u64)>>(&self, freqs: I) -> Result<u64> {
        freqs
            .into_iter()
            .filter(|&(_, f)| f > 0)
            .map(|(s, f)| Ok(f * self.length_of(s).ok_or(Error::UnknownSymbol(s))? as u64))
            .sum()
    }
}

/// Optimal code lengths for `weights` (all positive), parallel to the input.
pub(crate) fn code_lengths(weights: &[u64]) -> Vec<u32> {
    let n = weights.len();
    if n == 1 {
        return vec![0];
    }
    // Node ids are creation order: leaves 0..n, merged nodes afterwards.
    let mut parent = vec![usize::MAX; 2 * n - 1];
    let mut heap: BinaryHeap<Reverse<(u64, usize)>> =
        weights.iter().enumerate().map(|(i, &w)| Reverse((w, i))).collect();
    let mut next = n;
    while heap.len() > 1 {
        let Reverse((w1, a)) = heap.pop().unwrap();
        let Reverse((w2, b)) = heap.pop().unwrap();
        parent[a] = next;
        parent[b] = next;
        heap.push(Reverse((w1 + w2, next)));
        next += 1;
    }
    // Parents are created after their children, so walk ids downwards.
    let mut depth = vec![0u32; 2 * n - 1];
    for id in (0..2 * n - 2).rev() {
        depth[id] = depth[parent[id]] + 1;
    }
    depth.truncate(n);
    depth
}

/// Smallest block length that can induce a Huffman tree of height `h`:
/// the Fibonacci number `F(h+2)` with `F(1) = F(2) = 1`.
pub fn min_length_for_height(h: u32) -> u64 {
    fibonacci(h + 2)
}

pub(crate) fn fibonacci(i: u32) -> u64 {
    let (mut a, mut b) = (0u64, 1u64);
    for _ in 0..i {
        (a, b) = (b, a + b);
    }
    a
}
