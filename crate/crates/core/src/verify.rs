//! Checks an index against [`ScanOracle`] answers for the same text.

use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::oracle::ScanOracle;
use crate::SymbolIndex;

/// Texts up to this length are checked exhaustively by [`verify`].
pub const EXHAUSTIVE_LIMIT: usize = 10_000;
pub const SAMPLED_QUERIES: usize = 100_000;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Check {
    Len,
    Count(u8),
    Rank(usize, u8),
    Select(usize, u8),
    Access(usize),
}

impl fmt::Display for Check {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Check::Len => write!(f, "len"),
            Check::Count(c) => write!(f, "count({})", show(c)),
            Check::Rank(i, c) => write!(f, "rank({i}, {})", show(c)),
            Check::Select(j, c) => write!(f, "select({j}, {})", show(c)),
            Check::Access(i) => write!(f, "access({i})"),
        }
    }
}

fn show(c: u8) -> String {
    if c.is_ascii_graphic() {
        format!("'{}'", c as char)
    } else {
        format!("0x{c:02x}")
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Mismatch {
    pub check: Check,
    pub expected: String,
    pub got: String,
}

impl fmt::Display for Mismatch {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: expected {}, got {}", self.check, self.expected, self.got)
    }
}

impl std::error::Error for Mismatch {}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Mode {
    Exhaustive,
    Sampled { queries: usize, seed: u64 },
}

/// Exhaustive for short texts, otherwise [`SAMPLED_QUERIES`] random checks.
pub fn auto_mode(n: usize, seed: u64) -> Mode {
    if n <= EXHAUSTIVE_LIMIT {
        Mode::Exhaustive
    } else {
        Mode::Sampled { queries: SAMPLED_QUERIES, seed }
    }
}

fn fmt_select(v: Option<usize>) -> String {
    v.map_or_else(|| "inf".to_string(), |p| p.to_string())
}

struct Checker<'a, I: ?Sized> {
    index: &'a I,
    oracle: &'a ScanOracle,
    checks: usize,
}

impl<I: SymbolIndex + ?Sized> Checker<'_, I> {
    fn rank(&mut self, i: usize, c: u8) -> Result<(), Mismatch> {
        self.checks += 1;
        let expected = self.oracle.rank(i, c);
        match self.index.rank(i, c) {
            Ok(got) if got == expected => Ok(()),
            got => Err(Mismatch { check: Check::Rank(i, c), expected: expected.to_string(), got: format!("{got:?}") }),
        }
    }

    fn select(&mut self, j: usize, c: u8) -> Result<(), Mismatch> {
        self.checks += 1;
        let expected = self.oracle.select(j, c);
        match self.index.select(j, c) {
            Ok(got) if got == expected => Ok(()),
            Ok(got) => Err(Mismatch { check: Check::Select(j, c), expected: fmt_select(expected), got: fmt_select(got) }),
            Err(e) => Err(Mismatch { check: Check::Select(j, c), expected: fmt_select(expected), got: e.to_string() }),
        }
    }

    fn access(&mut self, i: usize, text: &[u8]) -> Result<(), Mismatch> {
        self.checks += 1;
        match self.index.access(i) {
            Ok(got) if got == text[i - 1] => Ok(()),
            got => Err(Mismatch { check: Check::Access(i), expected: show(text[i - 1]), got: format!("{got:?}") }),
        }
    }
}

/// Compares `index` with the oracle for `text`; returns the number of checks.
pub fn verify<I: SymbolIndex + ?Sized>(index: &I, text: &[u8], mode: Mode) -> Result<usize, Mismatch> {
    if index.len() != text.len() {
        return Err(Mismatch { check: Check::Len, expected: text.len().to_string(), got: index.len().to_string() });
    }
    let oracle = ScanOracle::new(text);
    let counts = index.counts();
    for c in 0..=255u8 {
        if counts[c as usize] != oracle.count(c) as u64 {
            return Err(Mismatch {
                check: Check::Count(c),
                expected: oracle.count(c).to_string(),
                got: counts[c as usize].to_string(),
            });
        }
    }
    let n = text.len();
    let symbols: Vec<u8> = oracle.symbols().collect();
    let mut ck = Checker { index, oracle: &oracle, checks: 256 };
    match mode {
        Mode::Exhaustive => {
            for c in 0..=255u8 {
                if oracle.count(c) == 0 {
                    ck.rank(n, c)?;
                    ck.select(1, c)?;
                    continue;
                }
                for i in 0..=n {
                    ck.rank(i, c)?;
                }
                for j in 1..=oracle.count(c) + 1 {
                    ck.select(j, c)?;
                }
            }
            for i in 1..=n {
                ck.access(i, text)?;
            }
        }
        Mode::Sampled { queries, seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            for _ in 0..queries {
                // Mostly occurring symbols; one in sixteen is any byte value.
                let c = if rng.gen_range(0..16) == 0 { rng.gen() } else { symbols[rng.gen_range(0..symbols.len())] };
                match rng.gen_range(0..3) {
                    0 => ck.rank(rng.gen_range(0..=n), c)?,
                    1 => ck.select(rng.gen_range(1..=oracle.count(c) + 1), c)?,
                    _ => ck.access(rng.gen_range(1..=n), text)?,
                }
            }
        }
    }
    Ok(ck.checks)
}
