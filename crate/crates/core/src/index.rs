//! Common query interface and the index file envelope.
//!
//! File layout, all integers little-endian:
//!
//! ```text
//! magic "WFSEL1" | version u8 | variant u8 (0 forest, 1 tree)
//! block u64 | superblock u64 | hyperblock u64 | nav u8 | backend u8 | rrr_t u32
//! n u64 | sigma u32
//! sections, each prefixed by its byte length (u64)
//! ```

use std::fs;
use std::path::Path;

use crate::bitvector::Backend;
use crate::error::{Error, Result};
use crate::forest::{ForestParams, WaveletForest};
use crate::serial::{Reader, Writer};
use crate::wavelet_tree::HuffmanWaveletTree;

pub const MAGIC: &[u8; 6] = b"WFSEL1";
pub const VERSION: u8 = 1;
pub(crate) const HEADER_BYTES: usize = 6 + 1 + 1 + 8 + 8 + 8 + 1 + 1 + 4 + 8 + 4;

/// Rank, select and access over a byte sequence.
///
/// `rank(i, c)` counts `c` in the first `i` symbols (`0 <= i <= n`);
/// `select(j, c)` is the 1-based position of the `j`-th `c`, `None` when
/// there are fewer than `j`; `access(i)` takes a 1-based position.
pub trait SymbolIndex {
    fn len(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    fn rank(&self, i: usize, c: u8) -> Result<usize>;

    fn select(&self, j: usize, c: u8) -> Result<Option<usize>>;

    fn access(&self, i: usize) -> Result<u8>;

    /// Occurrence count of every byte value.
    fn counts(&self) -> [u64; 256];

    /// Serialized size in bytes.
    fn size_in_bytes(&self) -> usize;
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Structure {
    Forest,
    Tree,
}

impl Structure {
    pub fn name(self) -> &'static str {
        match self {
            Structure::Forest => "wf",
            Structure::Tree => "wt",
        }
    }
}

#[derive(Clone, Debug)]
pub enum Index {
    Forest(WaveletForest),
    Tree(HuffmanWaveletTree),
}

impl Index {
    pub fn structure(&self) -> Structure {
        match self {
            Index::Forest(_) => Structure::Forest,
            Index::Tree(_) => Structure::Tree,
        }
    }

    pub fn backend(&self) -> Backend {
        match self {
            Index::Forest(f) => f.params().backend,
            Index::Tree(t) => t.backend(),
        }
    }

    pub fn to_bytes(&self) -> Vec<u8> {
        let mut w = Writer::new();
        match self {
            Index::Forest(f) => {
                write_header(&mut w, 0, f.params(), f.len(), f.sigma());
                f.write_body(&mut w);
            }
            Index::Tree(t) => {
                let params = ForestParams { block: 0, superblock: 0, hyperblock: 0, nav: false, backend: t.backend() };
                let sigma = t.counts().iter().filter(|&&c| c > 0).count();
                write_header(&mut w, 1, &params, t.len(), sigma);
                t.write_body(&mut w);
            }
        }
        w.into_bytes()
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut r = Reader::new(bytes);
        if r.take(MAGIC.len()).ok() != Some(&MAGIC[..]) {
            return Err(Error::format("not an index file (bad magic)"));
        }
        let version = r.u8()?;
        if version != VERSION {
            return Err(Error::format(format!("unsupported index version {version}")));
        }
        let variant = r.u8()?;
        let block = r.usize()?;
        let superblock = r.usize()?;
        let hyperblock = r.usize()?;
        let nav = match r.u8()? {
            0 => false,
            1 => true,
            v => return Err(Error::format(format!("bad nav flag {v}"))),
        };
        let backend_tag = r.u8()?;
        let t = r.u32()?;
        let backend = Backend::from_tag(backend_tag, t)?;
        let n = r.usize()?;
        let sigma = r.u32()? as usize;
        let index = match variant {
            0 => {
                let params = ForestParams { block, superblock, hyperblock, nav, backend };
                params.validate().map_err(|e| Error::format(e.to_string()))?;
                Index::Forest(WaveletForest::read_body(&mut r, params, n, sigma)?)
            }
            1 => {
                let tree = HuffmanWaveletTree::read_body(&mut r, n, backend)?;
                if tree.counts().iter().filter(|&&c| c > 0).count() != sigma {
                    return Err(Error::format("alphabet size mismatch"));
                }
                Index::Tree(tree)
            }
            v => return Err(Error::format(format!("unknown structure variant {v}"))),
        };
        if !r.is_empty() {
            return Err(Error::format("trailing bytes after last section"));
        }
        Ok(index)
    }

    pub fn save(&self, path: impl AsRef<Path>) -> Result<()> {
        fs::write(path, self.to_bytes())?;
        Ok(())
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_bytes(&fs::read(path)?)
    }
}

fn write_header(w: &mut Writer, variant: u8, params: &ForestParams, n: usize, sigma: usize) {
    w.bytes(MAGIC);
    w.u8(VERSION);
    w.u8(variant);
    w.u64(params.block as u64);
    w.u64(params.superblock as u64);
    w.u64(params.hyperblock as u64);
    w.u8(params.nav as u8);
    w.u8(params.backend.tag());
    w.u32(params.backend.rrr_block());
    w.u64(n as u64);
    w.u32(sigma as u32);
}

impl SymbolIndex for Index {
    fn len(&self) -> usize {
        match self {
            Index::Forest(f) => f.len(),
            Index::Tree(t) => t.len(),
        }
    }

    #[inline]
    fn rank(&self, i: usize, c: u8) -> Result<usize> {
        match self {
            Index::Forest(f) => f.rank(i, c),
            Index::Tree(t) => t.rank(i, c),
        }
    }

    #[inline]
    fn select(&self, j: usize, c: u8) -> Result<Option<usize>> {
        match self {
            Index::Forest(f) => f.select(j, c),
            Index::Tree(t) => t.select(j, c),
        }
    }

    fn access(&self, i: usize) -> Result<u8> {
        match self {
            Index::Forest(f) => f.access(i),
            Index::Tree(t) => t.access(i),
        }
    }

    fn counts(&self) -> [u64; 256] {
        match self {
            Index::Forest(f) => f.counts(),
            Index::Tree(t) => t.counts(),
        }
    }

    fn size_in_bytes(&self) -> usize {
        match self {
            Index::Forest(f) => f.size_in_bytes(),
            Index::Tree(t) => t.size_in_bytes(),
        }
    }
}

/// Serialized size of a structure body plus the file header.
pub(crate) fn body_len(f: impl FnOnce(&mut Writer)) -> usize {
    let mut w = Writer::new();
    f(&mut w);
    HEADER_BYTES + w.into_bytes().len()
}
