//! Shared inputs for the criterion benchmarks.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use wavelet_forest::bitvector::Backend;
use wavelet_forest::workload::{QueryKind, QueryWorkload};
use wavelet_forest::{bwt, synth, ForestParams, HuffmanWaveletTree, Index, WaveletForest};

/// Input length for query benchmarks; override with `WF_BENCH_MIB`.
pub fn bench_len() -> usize {
    let mib = std::env::var("WF_BENCH_MIB").ok().and_then(|v| v.parse::<usize>().ok()).unwrap_or(4);
    mib << 20
}

#[derive(Clone, Copy, Debug)]
pub enum Input {
    Mixed,
    Repetitive,
    Random,
}

impl Input {
    pub fn name(self) -> &'static str {
        match self {
            Input::Mixed => "mixed",
            Input::Repetitive => "repetitive",
            Input::Random => "random",
        }
    }
}

/// BWT of a synthetic text of about `n` bytes.
pub fn bwt_input(input: Input, n: usize, seed: u64) -> Vec<u8> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let text = match input {
        Input::Mixed => synth::mixed_text(&mut rng, n),
        Input::Repetitive => {
            let seed_len = (n / 100).max(1);
            synth::repetitive(&mut rng, seed_len, 100, 0.01)
        }
        Input::Random => synth::random_text(&mut rng, n, 255),
    };
    bwt::bwt(&bwt::with_sentinel(&text).expect("synthetic text has no byte 0")).unwrap().bwt
}

/// Named index configurations compared in the benchmarks.
pub fn configurations() -> Vec<(&'static str, Box<dyn Fn(&[u8]) -> Index>)> {
    let forest = |nav: bool, backend: Backend| {
        move |text: &[u8]| {
            Index::Forest(WaveletForest::new(text, ForestParams::default().with_nav(nav).with_backend(backend)).unwrap())
        }
    };
    vec![
        ("wf-plain", Box::new(forest(true, Backend::Plain))),
        ("wf-plain-nonav", Box::new(forest(false, Backend::Plain))),
        ("wf-rrr63", Box::new(forest(true, Backend::Rrr(63)))),
        ("wt-plain", Box::new(|t: &[u8]| Index::Tree(HuffmanWaveletTree::new(t, Backend::Plain).unwrap()))),
        ("wt-rrr63", Box::new(|t: &[u8]| Index::Tree(HuffmanWaveletTree::new(t, Backend::Rrr(63)).unwrap()))),
    ]
}

pub fn workload(text: &[u8], kind: QueryKind, count: usize) -> QueryWorkload {
    QueryWorkload::for_text(text, kind, count, wavelet_forest::workload::DEFAULT_SEED).unwrap()
}

#[cfg(test)]
mod tests {
    use super::*;
    use wavelet_forest::SymbolIndex;

    #[test]
    fn configurations_agree() {
        let text = bwt_input(Input::Mixed, 50_000, 1);
        let w = workload(&text, QueryKind::Select, 2000);
        let sums: Vec<u64> = configurations().iter().map(|(_, build)| w.run(&build(&text)).unwrap()).collect();
        assert!(sums.windows(2).all(|p| p[0] == p[1]));
        assert_eq!(bwt_input(Input::Repetitive, 10_000, 2).len(), 10_001);
        assert_eq!(bwt_input(Input::Random, 1000, 2).len(), 1001);
        assert!(build_is_deterministic());
    }

    fn build_is_deterministic() -> bool {
        let a = bwt_input(Input::Random, 3000, 5);
        let b = bwt_input(Input::Random, 3000, 5);
        let (_, f) = &configurations()[0];
        a == b && f(&a).to_bytes() == f(&b).to_bytes() && f(&a).len() == 3001
    }
}
