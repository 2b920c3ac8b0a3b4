//! Seeded random query workloads and answer checksums.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};
use crate::SymbolIndex;

pub const DEFAULT_SEED: u64 = 0x5eed_f0e5;
pub const DEFAULT_COUNT: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum QueryKind {
    Rank,
    Select,
}

impl QueryKind {
    pub fn name(self) -> &'static str {
        match self {
            QueryKind::Rank => "rank",
            QueryKind::Select => "select",
        }
    }
}

impl fmt::Display for QueryKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for QueryKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "rank" => Ok(QueryKind::Rank),
            "select" => Ok(QueryKind::Select),
            _ => Err(Error::param(format!("unknown query kind {s:?}"))),
        }
    }
}

/// `arg` is the prefix length for rank and the occurrence number for select.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Query {
    pub arg: usize,
    pub symbol: u8,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QueryWorkload {
    pub seed: u64,
    pub kind: QueryKind,
    pub queries: Vec<Query>,
}

impl QueryWorkload {
    /// Workload over a text.
    pub fn for_text(text: &[u8], kind: QueryKind, count: usize, seed: u64) -> Result<Self> {
        let mut counts = [0u64; 256];
        for &c in text {
            counts[c as usize] += 1;
        }
        Self::from_counts(&counts, kind, count, seed)
    }

    /// Workload over any text with the given symbol histogram. Select picks
    /// the symbol with probability proportional to its frequency and the
    /// occurrence uniformly; rank picks the prefix length uniformly in
    /// `0..=n` and the symbol uniformly among those occurring.
    pub fn from_counts(counts: &[u64; 256], kind: QueryKind, count: usize, seed: u64) -> Result<Self> {
        if count == 0 {
            return Err(Error::param("query count must be at least 1"));
        }
        let n: u64 = counts.iter().sum();
        if n == 0 {
            return Err(Error::Input("cannot generate queries for an empty text".into()));
        }
        let symbols: Vec<u8> = (0..=255u8).filter(|&c| counts[c as usize] > 0).collect();
        let mut cumulative = Vec::with_capacity(symbols.len());
        let mut sum = 0u64;
        for &c in &symbols {
            sum += counts[c as usize];
            cumulative.push(sum);
        }
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let queries = (0..count)
            .map(|_| match kind {
                QueryKind::Select => {
                    let u = rng.gen_range(0..n);
                    let c = symbols[cumulative.partition_point(|&s| s <= u)];
                    Query { arg: rng.gen_range(1..=counts[c as usize]) as usize, symbol: c }
                }
                QueryKind::Rank => {
                    let arg = rng.gen_range(0..=n) as usize;
                    Query { arg, symbol: symbols[rng.gen_range(0..symbols.len())] }
                }
            })
            .collect();
        Ok(QueryWorkload { seed, kind, queries })
    }

    pub fn len(&self) -> usize {
        self.queries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.queries.is_empty()
    }

    /// Runs every query and folds the answers into a checksum.
    pub fn run<I: SymbolIndex + ?Sized>(&self, index: &I) -> Result<u64> {
        let mut sum = Checksum::default();
        match self.kind {
            QueryKind::Rank => {
                for q in &self.queries {
                    sum.add(index.rank(q.arg, q.symbol)? as u64);
                }
            }
            QueryKind::Select => {
                for q in &self.queries {
                    sum.add_option(index.select(q.arg, q.symbol)?);
                }
            }
        }
        Ok(sum.value())
    }
}

/// Order-sensitive 64-bit FNV-1a style fold of query answers.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Checksum(u64);

impl Default for Checksum {
    fn default() -> Self {
        Checksum(0xcbf2_9ce4_8422_2325)
    }
}

impl Checksum {
    pub fn add(&mut self, answer: u64) {
        for byte in answer.to_le_bytes() {
            self.0 = (self.0 ^ byte as u64).wrapping_mul(0x0100_0000_01b3);
        }
    }

    /// Absent answers count as `u64::MAX`.
    pub fn add_option(&mut self, answer: Option<usize>) {
        self.add(answer.map_or(u64::MAX, |a| a as u64));
    }

    pub fn value(self) -> u64 {
        self.0
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::ScanOracle;

    #[test]
    fn deterministic() {
        let text = b"ABRACADABRA";
        for kind in [QueryKind::Rank, QueryKind::Select] {
            let a = QueryWorkload::for_text(text, kind, 500, 9).unwrap();
            let b = QueryWorkload::for_text(text, kind, 500, 9).unwrap();
            assert_eq!(a, b);
            assert_ne!(a, QueryWorkload::for_text(text, kind, 500, 10).unwrap());
        }
    }

    #[test]
    fn unary_text_targets_single_symbol() {
        let w = QueryWorkload::for_text(&[b'z'; 30], QueryKind::Select, 200, 1).unwrap();
        assert!(w.queries.iter().all(|q| q.symbol == b'z' && (1..=30).contains(&q.arg)));
    }

    #[test]
    fn queries_are_valid() {
        let mut rng = ChaCha8Rng::seed_from_u64(4);
        let text: Vec<u8> = (0..10_000).map(|_| rng.gen_range(1..60u8)).collect();
        let oracle = ScanOracle::new(&text);
        let w = QueryWorkload::for_text(&text, QueryKind::Select, 100_000, 2).unwrap();
        assert_eq!(w.len(), 100_000);
        assert!(w.queries.iter().all(|q| q.arg >= 1 && q.arg <= oracle.count(q.symbol)));
        let w = QueryWorkload::for_text(&text, QueryKind::Rank, 10_000, 2).unwrap();
        assert!(w.queries.iter().all(|q| q.arg <= text.len() && oracle.count(q.symbol) > 0));
    }

    #[test]
    fn select_symbols_follow_frequency() {
        let mut text = vec![b'a'; 9000];
        text.extend([b'b'; 1000]);
        let w = QueryWorkload::for_text(&text, QueryKind::Select, 20_000, 3).unwrap();
        let bs = w.queries.iter().filter(|q| q.symbol == b'b').count();
        assert!((1600..2400).contains(&bs), "{bs}");
    }

    #[test]
    fn errors() {
        assert!(matches!(QueryWorkload::for_text(b"ab", QueryKind::Rank, 0, 1), Err(Error::Param(_))));
        assert!(matches!(QueryWorkload::for_text(b"", QueryKind::Rank, 5, 1), Err(Error::Input(_))));
        assert!("median".parse::<QueryKind>().is_err());
        assert_eq!("select".parse::<QueryKind>().unwrap(), QueryKind::Select);
    }

    #[test]
    fn checksum_distinguishes_absent() {
        let mut a = Checksum::default();
        a.add_option(None);
        let mut b = Checksum::default();
        b.add(u64::MAX);
        assert_eq!(a, b);
        let mut c = Checksum::default();
        c.add(0);
        assert_ne!(a, c);
    }
}
