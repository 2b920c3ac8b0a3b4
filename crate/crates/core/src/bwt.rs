//! Suffix arrays by induced sorting, the Burrows-Wheeler transform and its run
//! statistics.
//!
//! Inputs must end with a sentinel: a final symbol that occurs nowhere else
//! and is smaller than every other symbol. [`with_sentinel`] appends byte 0.

use crate::error::{Error, Result};

pub const SENTINEL: u8 = 0;
const EMPTY: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BwtResult {
    pub bwt: Vec<u8>,
    pub sentinel: u8,
    /// Maximal runs of equal symbols in `bwt`.
    pub runs: usize,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct TextStats {
    pub sigma: usize,
    pub n: usize,
    pub runs: usize,
}

impl TextStats {
    /// Average BWT run length.
    pub fn avg_run(&self) -> f64 {
        self.n as f64 / self.runs as f64
    }

    pub fn mebibytes(&self) -> f64 {
        self.n as f64 / (1u64 << 20) as f64
    }
}

/// Appends [`SENTINEL`] unless `text` already ends with it. Fails if the
/// sentinel byte occurs anywhere else.
pub fn with_sentinel(text: &[u8]) -> Result<Vec<u8>> {
    let body = text.strip_suffix(&[SENTINEL]).unwrap_or(text);
    if let Some(p) = body.iter().position(|&c| c == SENTINEL) {
        return Err(Error::Input(format!("byte 0 at position {} is reserved for the sentinel", p + 1)));
    }
    let mut out = Vec::with_capacity(body.len() + 1);
    out.extend_from_slice(body);
    out.push(SENTINEL);
    Ok(out)
}

fn check_sentinel(text: &[u8]) -> std::result::Result<(), String> {
    let Some((&last, body)) = text.split_last() else {
        return Err("text is empty".into());
    };
    if let Some(p) = body.iter().position(|&c| c <= last) {
        return Err(format!("position {} is not larger than the final sentinel", p + 1));
    }
    if text.len() >= EMPTY as usize {
        return Err("text too long for 32-bit suffix array".into());
    }
    Ok(())
}

/// 1-based suffix array of a sentinel-terminated text.
pub fn suffix_array(text: &[u8]) -> Result<Vec<usize>> {
    check_sentinel(text).map_err(Error::param)?;
    Ok(sa_u32(text).into_iter().map(|p| p as usize + 1).collect())
}

fn sa_u32(text: &[u8]) -> Vec<u32> {
    let s: Vec<u32> = text.iter().map(|&c| c as u32).collect();
    let mut sa = vec![0u32; s.len()];
    sais(&s, 256, &mut sa);
    sa
}

pub fn bwt(text: &[u8]) -> Result<BwtResult> {
    check_sentinel(text).map_err(Error::Input)?;
    let n = text.len();
    let sa = sa_u32(text);
    let out: Vec<u8> = sa.iter().map(|&p| text[(p as usize + n - 1) % n]).collect();
    let runs = runs(&out);
    Ok(BwtResult { bwt: out, sentinel: text[n - 1], runs })
}

pub fn runs(s: &[u8]) -> usize {
    if s.is_empty() {
        return 0;
    }
    1 + s.windows(2).filter(|w| w[0] != w[1]).count()
}

/// Alphabet size, length and BWT run count of a sentinel-terminated text.
pub fn text_stats(text: &[u8]) -> Result<TextStats> {
    Ok(text_stats_of(text, &bwt(text)?))
}

/// [`text_stats`] when the BWT is already at hand.
pub fn text_stats_of(text: &[u8], transformed: &BwtResult) -> TextStats {
    let mut seen = [false; 256];
    for &c in text {
        seen[c as usize] = true;
    }
    TextStats { sigma: seen.iter().filter(|&&s| s).count(), n: text.len(), runs: transformed.runs }
}

fn buckets(s: &[u32], k: usize) -> Vec<u32> {
    let mut b = vec![0u32; k];
    for &c in s {
        b[c as usize] += 1;
    }
    b
}

fn bucket_heads(sizes: &[u32]) -> Vec<u32> {
    let mut sum = 0;
    sizes
        .iter()
        .map(|&b| {
            sum += b;
            sum - b
        })
        .collect()
}

fn bucket_tails(sizes: &[u32]) -> Vec<u32> {
    let mut sum = 0;
    sizes
        .iter()
        .map(|&b| {
            sum += b;
            sum
        })
        .collect()
}

/// SA-IS over integer alphabet `0..k`; `s` ends with a unique minimum.
fn sais(s: &[u32], k: usize, sa: &mut [u32]) {
    let n = s.len();
    if n == 1 {
        sa[0] = 0;
        return;
    }
    // true marks S-type suffixes.
    let mut stype = vec![false; n];
    stype[n - 1] = true;
    for i in (0..n - 1).rev() {
        stype[i] = s[i] < s[i + 1] || (s[i] == s[i + 1] && stype[i + 1]);
    }
    let is_lms = |i: usize| i > 0 && stype[i] && !stype[i - 1];
    let sizes = buckets(s, k);

    sa.fill(EMPTY);
    let mut tails = bucket_tails(&sizes);
    for i in 1..n {
        if is_lms(i) {
            let c = s[i] as usize;
            tails[c] -= 1;
            sa[tails[c] as usize] = i as u32;
        }
    }
    induce(s, sa, &stype, &sizes);

    let mut m = 0;
    for i in 0..n {
        let p = sa[i] as usize;
        if is_lms(p) {
            sa[m] = p as u32;
            m += 1;
        }
    }
    sa[m..].fill(EMPTY);
    let lms_equal = |a: usize, b: usize| {
        if a == n - 1 || b == n - 1 {
            return a == b;
        }
        let mut i = 0;
        loop {
            let (x, y) = (a + i, b + i);
            if s[x] != s[y] || stype[x] != stype[y] {
                return false;
            }
            if i > 0 && (is_lms(x) || is_lms(y)) {
                return is_lms(x) && is_lms(y);
            }
            i += 1;
        }
    };
    let mut names = 0u32;
    let mut prev = usize::MAX;
    for i in 0..m {
        let p = sa[i] as usize;
        if prev == usize::MAX || !lms_equal(p, prev) {
            names += 1;
            prev = p;
        }
        sa[m + p / 2] = names - 1;
    }
    let reduced: Vec<u32> = sa[m..].iter().copied().filter(|&v| v != EMPTY).collect();
    debug_assert_eq!(reduced.len(), m);

    let mut sa1 = vec![0u32; m];
    if (names as usize) < m {
        sais(&reduced, names as usize, &mut sa1);
    } else {
        for (i, &name) in reduced.iter().enumerate() {
            sa1[name as usize] = i as u32;
        }
    }
    let positions: Vec<u32> = (1..n).filter(|&i| is_lms(i)).map(|i| i as u32).collect();

    sa.fill(EMPTY);
    let mut tails = bucket_tails(&sizes);
    for &r in sa1.iter().rev() {
        let p = positions[r as usize];
        let c = s[p as usize] as usize;
        tails[c] -= 1;
        sa[tails[c] as usize] = p;
    }
    induce(s, sa, &stype, &sizes);
}

fn induce(s: &[u32], sa: &mut [u32], stype: &[bool], sizes: &[u32]) {
    let n = s.len();
    let mut heads = bucket_heads(sizes);
    for i in 0..n {
        let p = sa[i];
        if p != EMPTY && p > 0 {
            let j = p as usize - 1;
            if !stype[j] {
                let c = s[j] as usize;
                sa[heads[c] as usize] = j as u32;
                heads[c] += 1;
            }
        }
    }
    let mut tails = bucket_tails(sizes);
    for i in (0..n).rev() {
        let p = sa[i];
        if p != EMPTY && p > 0 {
            let j = p as usize - 1;
            if stype[j] {
                let c = s[j] as usize;
                tails[c] -= 1;
                sa[tails[c] as usize] = j as u32;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    /// Last column of the sorted rotation matrix.
    fn rotation_bwt(text: &[u8]) -> Vec<u8> {
        let n = text.len();
        let mut rot: Vec<usize> = (0..n).collect();
        rot.sort_by(|&a, &b| (0..n).map(|k| text[(a + k) % n]).cmp((0..n).map(|k| text[(b + k) % n])));
        rot.iter().map(|&r| text[(r + n - 1) % n]).collect()
    }

    fn naive_sa(text: &[u8]) -> Vec<usize> {
        let mut sa: Vec<usize> = (0..text.len()).collect();
        sa.sort_by(|&a, &b| text[a..].cmp(&text[b..]));
        sa.into_iter().map(|p| p + 1).collect()
    }

    #[test]
    fn banana() {
        assert_eq!(suffix_array(b"BANANA$").unwrap(), [7, 6, 4, 2, 1, 5, 3]);
        let r = bwt(b"BANANA$").unwrap();
        assert_eq!(r.bwt, b"ANNB$AA");
        assert_eq!(r.sentinel, b'$');
        assert_eq!(r.runs, 5);
        let stats = text_stats(b"BANANA$").unwrap();
        assert_eq!((stats.sigma, stats.n), (4, 7));
        assert!((stats.avg_run() - 1.4).abs() < 1e-12);
    }

    #[test]
    fn tiny_inputs() {
        assert_eq!(suffix_array(b"A$").unwrap(), [2, 1]);
        assert_eq!(suffix_array(b"$").unwrap(), [1]);
        assert_eq!(bwt(b"$").unwrap().bwt, b"$");
        let r = bwt(b"AAAA$").unwrap();
        assert_eq!(r.bwt, rotation_bwt(b"AAAA$"));
        assert!(r.runs <= 3);
    }

    #[test]
    fn unary_has_fewest_runs() {
        let text = with_sentinel(&[7u8; 40]).unwrap();
        let r = bwt(&text).unwrap();
        assert_eq!(r.runs, 2);
        assert_eq!(r.bwt[0], 7);
    }

    #[test]
    fn sentinel_violations() {
        assert!(matches!(suffix_array(b"BANANA"), Err(Error::Param(_))));
        assert!(matches!(suffix_array(b"$A$"), Err(Error::Param(_))));
        assert!(matches!(suffix_array(b""), Err(Error::Param(_))));
        assert!(matches!(bwt(b"AB"), Err(Error::Input(_))));
        assert!(matches!(with_sentinel(b"A\0B"), Err(Error::Input(_))));
        assert_eq!(with_sentinel(b"AB").unwrap(), b"AB\0");
        assert_eq!(with_sentinel(b"AB\0").unwrap(), b"AB\0");
    }

    #[test]
    fn repetitive_inputs() {
        // Deep recursion: long periodic texts reduce to many equal LMS names.
        for period in [1usize, 2, 3, 7, 64] {
            let body: Vec<u8> = (0..3000).map(|i| b'a' + (i % period) as u8 % 26).collect();
            let text = with_sentinel(&body).unwrap();
            assert_eq!(suffix_array(&text).unwrap(), naive_sa(&text), "period {period}");
        }
        let fib = {
            let (mut a, mut b) = (b"a".to_vec(), b"ab".to_vec());
            while b.len() < 5000 {
                let next = [b.clone(), a].concat();
                a = b;
                b = next;
            }
            b
        };
        let text = with_sentinel(&fib).unwrap();
        assert_eq!(suffix_array(&text).unwrap(), naive_sa(&text));
    }

    proptest! {
        #[test]
        fn matches_rotation_sort(body in proptest::collection::vec(1u8..6, 0..200)) {
            let text = with_sentinel(&body).unwrap();
            let r = bwt(&text).unwrap();
            prop_assert_eq!(&r.bwt, &rotation_bwt(&text));
            prop_assert_eq!(suffix_array(&text).unwrap(), naive_sa(&text));
            let mut a = r.bwt.clone();
            let mut b = text.clone();
            a.sort_unstable();
            b.sort_unstable();
            prop_assert_eq!(a, b);
        }

        #[test]
        fn wide_alphabet(body in proptest::collection::vec(1u8..=255, 0..300)) {
            let text = with_sentinel(&body).unwrap();
            prop_assert_eq!(suffix_array(&text).unwrap(), naive_sa(&text));
        }
    }
}
