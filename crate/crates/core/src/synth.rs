//! Deterministic synthetic inputs. No generator emits byte 0, so every
//! output can take the BWT sentinel.

use rand::seq::SliceRandom;
use rand::Rng;

/// `n` symbols drawn uniformly from `1..=sigma` (`sigma <= 255`).
pub fn random_text<R: Rng>(rng: &mut R, n: usize, sigma: usize) -> Vec<u8> {
    assert!((1..=255).contains(&sigma));
    (0..n).map(|_| rng.gen_range(1..=sigma as u8)).collect()
}

/// `copies` concatenated copies of a random `seed_len`-byte seed over a
/// small alphabet, each copy with a fraction `mutation` of its bytes
/// replaced at random.
pub fn repetitive<R: Rng>(rng: &mut R, seed_len: usize, copies: usize, mutation: f64) -> Vec<u8> {
    let seed: Vec<u8> = (0..seed_len).map(|_| rng.gen_range(b'a'..=b'z')).collect();
    let per_copy = (seed_len as f64 * mutation).round() as usize;
    let mut out = Vec::with_capacity(seed_len * copies);
    for _ in 0..copies {
        let start = out.len();
        out.extend_from_slice(&seed);
        for _ in 0..per_copy {
            let p = start + rng.gen_range(0..seed_len);
            out[p] = rng.gen_range(b'a'..=b'z');
        }
    }
    out
}

const WORDS: &[&str] = &[
    "the", "of", "and", "to", "in", "a", "is", "that", "for", "it", "as", "was", "with", "be", "by", "on", "not",
    "he", "this", "are", "or", "his", "from", "at", "which", "but", "have", "an", "had", "they", "you", "were",
    "their", "one", "all", "we", "can", "her", "has", "there", "been", "if", "more", "when", "will", "would", "who",
    "so", "no", "time", "people", "into", "only", "some", "could", "them", "other", "then", "its", "about", "over",
    "world", "water", "house", "river", "north", "morning", "letter", "garden", "station", "window", "history",
];

const CODE: &[&str] = &[
    "static int ", "return ", "struct ", "unsigned long ", "if (", "} else {", "for (i = 0; i < n; i++)", "->next",
    "NULL", "spin_lock(&", "kfree(", "#include <linux/", ".h>", "/* */", "goto out;", "case ", "break;",
    "sizeof(", "const char *", "EXPORT_SYMBOL(", "mutex_unlock(&", "->flags", "&= ~", "|= ", "u32 ", "err = ",
];

/// English-like prose, C-like source and DNA segments interleaved in
/// chunks, truncated to exactly `n` bytes.
pub fn mixed_text<R: Rng>(rng: &mut R, n: usize) -> Vec<u8> {
    let mut out = Vec::with_capacity(n + 4096);
    while out.len() < n {
        let chunk = out.len() + rng.gen_range(16_384..65_536);
        match rng.gen_range(0..10) {
            0..=5 => {
                while out.len() < chunk {
                    // Zipf-like: low indices far more likely.
                    let r: f64 = rng.gen();
                    let w = WORDS[((r * r * r) * WORDS.len() as f64) as usize];
                    out.extend_from_slice(w.as_bytes());
                    out.push(match rng.gen_range(0..20) {
                        0 => b',',
                        1 => b'.',
                        2 => b'\n',
                        _ => b' ',
                    });
                }
            }
            6..=8 => {
                let mut indent = 0usize;
                while out.len() < chunk {
                    out.extend(std::iter::repeat_n(b'\t', indent));
                    for _ in 0..rng.gen_range(1..4) {
                        out.extend_from_slice(CODE.choose(rng).unwrap().as_bytes());
                        if rng.gen_bool(0.5) {
                            let ident = WORDS.choose(rng).unwrap();
                            out.extend_from_slice(ident.as_bytes());
                        }
                    }
                    out.extend_from_slice(b";\n");
                    indent = (indent + rng.gen_range(0..3)).saturating_sub(1).min(4);
                }
            }
            _ => {
                while out.len() < chunk {
                    out.push(*b"ACGT".choose(rng).unwrap());
                }
            }
        }
    }
    out.truncate(n);
    out
}
