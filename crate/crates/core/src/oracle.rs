//! Reference answers computed from the raw text, independent of any index.

/// Occurrence lists per byte value; rank and select by binary search.
#[derive(Clone, Debug)]
pub struct ScanOracle {
    n: usize,
    positions: Vec<Vec<usize>>,
}

impl ScanOracle {
    pub fn new(text: &[u8]) -> Self {
        let mut positions = vec![Vec::new(); 256];
        for (i, &c) in text.iter().enumerate() {
            positions[c as usize].push(i + 1);
        }
        ScanOracle { n: text.len(), positions }
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    /// Occurrences of `c` among the first `i` symbols.
    pub fn rank(&self, i: usize, c: u8) -> usize {
        self.positions[c as usize].partition_point(|&p| p <= i)
    }

    /// 1-based position of the `j`-th `c`.
    pub fn select(&self, j: usize, c: u8) -> Option<usize> {
        j.checked_sub(1).and_then(|k| self.positions[c as usize].get(k).copied())
    }

    pub fn count(&self, c: u8) -> usize {
        self.positions[c as usize].len()
    }

    /// Byte values occurring in the text, ascending.
    pub fn symbols(&self) -> impl Iterator<Item = u8> + '_ {
        (0..=255u8).filter(move |&c| !self.positions[c as usize].is_empty())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn direct_counts() {
        let o = ScanOracle::new(b"ANNB$AA");
        assert_eq!(o.rank(7, b'A'), 3);
        assert_eq!(o.rank(4, b'N'), 2);
        assert_eq!(o.select(2, b'A'), Some(6));
        assert_eq!(o.select(0, b'A'), None);
        assert_eq!(o.select(4, b'A'), None);
        assert_eq!(o.symbols().collect::<Vec<_>>(), b"$ABN".to_vec());
    }
}
