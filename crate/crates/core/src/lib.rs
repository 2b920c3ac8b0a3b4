//! Rank and select over byte sequences with wavelet forests.
//!
//! The main structure is [`WaveletForest`]: the text is split into fixed-size
//! blocks, each block gets its own canonical Huffman-shaped wavelet tree, and
//! all trees share one bitvector. [`HuffmanWaveletTree`] is the single-tree
//! baseline. Both implement [`SymbolIndex`] and serialize through [`Index`].

pub mod bits;
pub mod bitvector;
pub mod bwt;
mod error;
pub mod forest;
pub mod harness;
pub mod huffman;
mod index;
pub mod oracle;
mod serial;
pub mod synth;
pub mod wavelet_tree;
pub mod verify;
pub mod workload;

pub use bits::BitBuf;
pub use bitvector::{Backend, BitVector, PlainBitVector, PlainConfig, RankSelect, RrrBitVector, RRR_BLOCK_SIZES};
pub use error::{Error, Result};
pub use forest::{ForestParams, SelectTrace, SpaceBreakdown, WaveletForest};
pub use index::{Index, Structure, SymbolIndex, MAGIC, VERSION};
pub use wavelet_tree::HuffmanWaveletTree;
