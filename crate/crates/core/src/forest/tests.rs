use super::*;
use crate::oracle::ScanOracle;
use crate::Index;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const ABCD: &[u8] = b"ABABABABCDCDCDCD";
const EXAMPLE_BWT: &[u8] = b"ANNB$AA";

fn small(text: &[u8]) -> WaveletForest {
    WaveletForest::new(text, ForestParams::new(4, 8, 16)).unwrap()
}

fn variants() -> Vec<ForestParams> {
    let mut out = Vec::new();
    for (b, bs, bh) in [(4, 8, 16), (8, 32, 64), (64, 256, 1024), (1 << 13, 1 << 20, 1 << 32)] {
        for nav in [true, false] {
            for backend in [Backend::Plain, Backend::Rrr(15), Backend::Rrr(63)] {
                out.push(ForestParams::new(b, bs, bh).with_nav(nav).with_backend(backend));
            }
        }
    }
    out
}

fn check_against_oracle(text: &[u8], forest: &WaveletForest) {
    let oracle = ScanOracle::new(text);
    for c in 0..=255u8 {
        let count = oracle.count(c);
        if count == 0 && c % 37 != 0 {
            continue;
        }
        for i in 0..=text.len() {
            assert_eq!(forest.rank(i, c).unwrap(), oracle.rank(i, c), "rank({i}, {c}) {:?}", forest.params());
        }
        for j in 1..=count + 1 {
            assert_eq!(forest.select(j, c).unwrap(), oracle.select(j, c), "select({j}, {c}) {:?}", forest.params());
        }
    }
    for (i, &c) in text.iter().enumerate() {
        assert_eq!(forest.access(i + 1).unwrap(), c);
    }
}

fn random_text(rng: &mut ChaCha8Rng, n: usize, sigma: usize) -> Vec<u8> {
    (0..n).map(|_| rng.gen_range(0..sigma) as u8 + 1).collect()
}

#[test]
fn hierarchy_of_small_example() {
    let f = small(ABCD);
    assert_eq!(f.block_count(), 4);
    assert_eq!(f.superblock_count(), 2);
    assert_eq!(f.hyperblock_count(), 1);
    assert_eq!(f.superblock_rank(b'A', 2), Some(4));
    assert_eq!(f.block_rank(b'A', 2), Some(2));
    assert_eq!(f.block_rank(b'A', 1), Some(0));
    assert_eq!(f.block_rank(b'A', 3), None);
    assert_eq!(f.block_rank(b'C', 4), Some(2));
    assert_eq!(f.hyperblock_rank(b'D', 1), Some(0));
    assert_eq!(f.block_alphabet(3), b"CD");
}

#[test]
fn short_tail_partitioning() {
    let f = small(b"ABCAB");
    assert_eq!(f.block_count(), 2);
    assert_eq!(f.block_len(1), 4);
    assert_eq!(f.block_len(2), 1);
    assert_eq!(f.superblock_count(), 1);
    check_against_oracle(b"ABCAB", &f);
}

#[test]
fn example_bwt_matches_oracle() {
    for params in variants() {
        let f = WaveletForest::new(EXAMPLE_BWT, params).unwrap();
        check_against_oracle(EXAMPLE_BWT, &f);
    }
}

#[test]
fn rank_examples() {
    let f = small(ABCD);
    assert_eq!(f.rank(8, b'A').unwrap(), 4);
    for c in [b'A', b'B', b'Z'] {
        assert_eq!(f.rank(0, c).unwrap(), 0);
    }
    assert!(matches!(f.rank(17, b'A'), Err(Error::Bounds { .. })));
    let g = small(EXAMPLE_BWT);
    assert_eq!(g.rank(7, b'A').unwrap(), 3);
}

#[test]
fn last_below_examples() {
    assert_eq!(last_below(&[0, 5, 9], 6), 2);
    assert_eq!(last_below(&[0, 5, 9], 5), 1);
    assert_eq!(last_below(&[0, 5, 9], 10), 3);
    assert_eq!(last_below(&[0], 1), 1);
}

#[test]
fn locate_steps() {
    let f = small(ABCD);
    for j in 1..=4 {
        assert_eq!(f.locate_hyperblock(j, b'A'), Some(1));
    }
    assert_eq!(f.locate_hyperblock(5, b'A'), None);
    assert_eq!(f.locate_hyperblock(1, b'Z'), None);
    assert_eq!(f.locate_superblock(3, b'A', 1), 1);
    assert_eq!(f.locate_superblock(1, b'A', 1), 1);
    assert_eq!(f.locate_superblock(1, b'C', 1), 2);
    assert_eq!(f.locate_block(3, b'A', 1), (2, 1));
    assert_eq!(f.locate_block(1, b'C', 2), (3, 1));
    assert_eq!(f.locate_block(4, b'C', 2), (4, 2));
    // Last occurrence lands in the last block storing the symbol.
    assert_eq!(f.locate_block(4, b'A', 1), (2, 2));
}

#[test]
fn locate_superblock_second_example() {
    let text = b"ABABABABABABABAB";
    let f = small(text);
    assert_eq!(f.superblock_rank(b'A', 2), Some(4));
    assert_eq!(f.locate_superblock(5, b'A', 1), 2);
    assert_eq!(f.locate_superblock(4, b'A', 1), 1);
}

#[test]
fn descend_examples() {
    let f = small(b"ABAB");
    let stack = f.descend_to_leaf(1, b'A').unwrap();
    assert_eq!(stack.len(), 1);
    assert_eq!(stack.frames()[0], Frame { start: 0, end: 4, bit: false });
    assert_eq!(f.local_select_up(&stack, 1), 1);
    assert_eq!(f.local_select_up(&stack, 2), 3);

    let g = small(b"CCCC");
    let stack = g.descend_to_leaf(1, b'C').unwrap();
    assert!(stack.is_empty());
    assert_eq!(g.local_select_up(&stack, 3), 3);
    assert!(matches!(g.descend_to_leaf(1, b'A'), Err(Error::UnknownSymbol(65))));

    for nav in [true, false] {
        let h = WaveletForest::new(EXAMPLE_BWT, ForestParams::new(8, 8, 8).with_nav(nav)).unwrap();
        let stack = h.descend_to_leaf(1, b'$').unwrap();
        let bits: Vec<bool> = stack.frames().iter().map(|f| f.bit).collect();
        assert_eq!(bits, [true, true, false]);
        let bounds: Vec<(usize, usize)> = stack.frames().iter().map(|f| (f.start, f.end)).collect();
        assert_eq!(bounds, [(0, 7), (7, 11), (11, 13)]);
        assert_eq!(h.local_select_up(&stack, 1), 5);
        let stack = h.descend_to_leaf(1, b'A').unwrap();
        assert_eq!(h.local_select_up(&stack, 2), 6);
    }
}

#[test]
fn merged_bits_of_example() {
    let f = WaveletForest::new(EXAMPLE_BWT, ForestParams::new(8, 8, 8)).unwrap();
    let bits: String = (0..f.stored_bits()).map(|i| if f.merged().get(i) { '1' } else { '0' }).collect();
    assert_eq!(bits, "0111100001110");
    assert_eq!(f.block_code_length(1, b'A'), Some(1));
    assert_eq!(f.block_code_length(1, b'B'), Some(3));
}

#[test]
fn select_examples() {
    let f = small(ABCD);
    let trace = f.select_traced(3, b'A').unwrap().unwrap();
    assert_eq!(
        trace,
        SelectTrace { hyperblock: 1, superblock: 1, block: 2, local_rank: 1, local_position: 1, position: 5, depth: 1 }
    );
    assert_eq!(f.select(4, b'D').unwrap(), Some(16));
    assert_eq!(f.select(5, b'A').unwrap(), None);
    assert_eq!(f.select(1, b'Z').unwrap(), None);
    assert!(matches!(f.select(0, b'A'), Err(Error::Param(_))));
    let g = small(EXAMPLE_BWT);
    assert_eq!(g.select(1, b'$').unwrap(), Some(5));
    assert_eq!(g.select(4, b'A').unwrap(), None);
}

#[test]
fn access_examples() {
    let f = small(ABCD);
    assert_eq!(f.access(9).unwrap(), b'C');
    assert!(matches!(f.access(0), Err(Error::Bounds { .. })));
    assert!(matches!(f.access(17), Err(Error::Bounds { .. })));
    assert_eq!(small(EXAMPLE_BWT).access(4).unwrap(), b'B');
}

#[test]
fn invalid_params() {
    let bad = [
        ForestParams::new(0, 8, 16),
        ForestParams::new(3, 8, 16),
        ForestParams::new(4, 8, 12),
        ForestParams::new(1 << 17, 1 << 17, 1 << 17),
        ForestParams::new(4, 8, 16).with_backend(Backend::Rrr(20)),
    ];
    for p in bad {
        assert!(matches!(WaveletForest::new(b"AB", p), Err(Error::Param(_))), "{p:?}");
    }
    assert!(ForestParams::new(1 << 16, 1 << 16, 1 << 16).validate().is_ok());
    assert!(matches!(WaveletForest::new(b"", ForestParams::default()), Err(Error::Param(_))));
}

#[test]
fn random_texts_all_configurations() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for sigma in [2, 4, 16, 64, 200] {
        let text = random_text(&mut rng, 1500, sigma);
        for params in variants() {
            check_against_oracle(&text, &WaveletForest::new(&text, params).unwrap());
        }
    }
}

#[test]
fn skewed_blocks_and_absent_symbols() {
    // Long runs leave most symbols out of most blocks, exercising the left scan.
    let mut text = Vec::new();
    for round in 0..6u8 {
        text.extend(std::iter::repeat_n(b'a' + round, 50));
        text.extend(std::iter::repeat_n(b'z', 7));
        text.push(b'a');
    }
    for params in variants() {
        check_against_oracle(&text, &WaveletForest::new(&text, params).unwrap());
    }
}

#[test]
fn deep_block_respects_height_bound() {
    // Fibonacci frequencies produce the deepest trees a block can hold.
    let h = MAX_BLOCK_HEIGHT;
    let mut weights: Vec<u64> = vec![1];
    weights.extend((1..=h).map(crate::huffman::fibonacci));
    let mut text = Vec::new();
    for (s, &w) in weights.iter().enumerate() {
        text.extend(std::iter::repeat_n(s as u8, w as usize));
    }
    assert!(text.len() <= MAX_BLOCK);
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    for i in (1..text.len()).rev() {
        text.swap(i, rng.gen_range(0..=i));
    }
    let f = WaveletForest::new(&text, ForestParams::new(MAX_BLOCK, MAX_BLOCK, MAX_BLOCK)).unwrap();
    let oracle = ScanOracle::new(&text);
    for s in 0..weights.len() as u8 {
        let stack = f.descend_to_leaf(1, s).unwrap();
        assert!(stack.len() <= MAX_BLOCK_HEIGHT as usize);
        let count = oracle.count(s);
        for j in [1, count.div_ceil(2), count] {
            assert_eq!(f.select(j, s).unwrap(), oracle.select(j, s));
        }
        assert_eq!(f.rank(text.len() / 3, s).unwrap(), oracle.rank(text.len() / 3, s));
    }
}

#[test]
fn nav_headers_do_not_change_tree_bits() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let text = random_text(&mut rng, 5000, 30);
    let on = WaveletForest::new(&text, ForestParams::new(256, 1024, 4096)).unwrap();
    let off = WaveletForest::new(&text, ForestParams::new(256, 1024, 4096).with_nav(false)).unwrap();
    assert_eq!(on.stored_bits(), off.stored_bits());
    assert!((0..on.stored_bits()).all(|i| on.merged().get(i) == off.merged().get(i)));
    assert!(on.space().block_headers > off.space().block_headers);
    assert_eq!(on.space().merged, off.space().merged);
}

#[test]
fn stored_bits_equal_local_code_cost() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let text = random_text(&mut rng, 3000, 12);
    let f = WaveletForest::new(&text, ForestParams::new(128, 512, 1024)).unwrap();
    let mut expected = 0usize;
    for ib in 1..=f.block_count() {
        let block = &text[(ib - 1) * 128..(ib * 128).min(text.len())];
        for c in f.block_alphabet(ib) {
            let count = block.iter().filter(|&&x| x == c).count();
            expected += count * f.block_code_length(ib, c).unwrap() as usize;
        }
    }
    assert_eq!(f.stored_bits(), expected);
}

#[test]
fn directory_composition_at_block_boundaries() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let text = random_text(&mut rng, 4000, 40);
    let params = ForestParams::new(16, 64, 512);
    let f = WaveletForest::new(&text, params).unwrap();
    let oracle = ScanOracle::new(&text);
    for ih in 1..=f.hyperblock_count() {
        for c in f.alphabet().to_vec() {
            let v: Vec<u64> = (1..=f.hyperblock_count()).map(|i| f.hyperblock_rank(c, i).unwrap()).collect();
            assert!(v.windows(2).all(|p| p[0] <= p[1]));
            assert_eq!(v[ih - 1] as usize, oracle.rank((ih - 1) * 512, c));
        }
    }
    for ib in 1..=f.block_count() {
        let p = (ib - 1) * 16;
        let is = (ib - 1) / 4 + 1;
        let ih = (is - 1) / 8 + 1;
        for c in f.alphabet().to_vec() {
            let mut total = (f.hyperblock_rank(c, ih).unwrap() + f.superblock_rank(c, is).unwrap()) as usize;
            if (is - 1) % 8 == 0 {
                assert_eq!(f.superblock_rank(c, is), Some(0));
            }
            // Stored A_b, or the nearest stored entry to the left plus that block's count.
            let first = (is - 1) * 4 + 1;
            if let Some(r) = f.block_rank(c, ib) {
                total += r;
            } else if let Some(prev) = (first..ib).rev().find(|&q| f.block_rank(c, q).is_some()) {
                let block = &text[(prev - 1) * 16..prev * 16];
                total += f.block_rank(c, prev).unwrap() + block.iter().filter(|&&x| x == c).count();
            }
            assert_eq!(total, oracle.rank(p, c), "block {ib} symbol {c}");
        }
    }
}

#[test]
fn serialization_round_trip() {
    let mut rng = ChaCha8Rng::seed_from_u64(13);
    let text = random_text(&mut rng, 2000, 20);
    for params in variants() {
        let f = WaveletForest::new(&text, params).unwrap();
        let bytes = Index::Forest(f.clone()).to_bytes();
        assert_eq!(bytes.len(), f.size_in_bytes());
        assert_eq!(f.space().total() + crate::index::HEADER_BYTES, bytes.len());
        let Index::Forest(g) = Index::from_bytes(&bytes).unwrap() else { panic!("wrong variant") };
        assert_eq!(g.params(), f.params());
        for i in (0..=text.len()).step_by(37) {
            for c in [1u8, 5, 20] {
                assert_eq!(g.rank(i, c).unwrap(), f.rank(i, c).unwrap());
            }
        }
        for j in 1..60 {
            assert_eq!(g.select(j, 3).unwrap(), f.select(j, 3).unwrap());
        }
    }
}

#[test]
fn corrupted_files_are_rejected() {
    let f = small(ABCD);
    let bytes = Index::Forest(f).to_bytes();
    assert!(matches!(Index::from_bytes(&bytes[..bytes.len() - 1]), Err(Error::Format(_))));
    let mut extra = bytes.clone();
    extra.push(0);
    assert!(matches!(Index::from_bytes(&extra), Err(Error::Format(_))));
    let mut magic = bytes.clone();
    magic[0] = b'X';
    assert!(matches!(Index::from_bytes(&magic), Err(Error::Format(_))));
    let mut version = bytes.clone();
    version[6] = 9;
    assert!(matches!(Index::from_bytes(&version), Err(Error::Format(_))));
}

fn text_strategy() -> impl Strategy<Value = Vec<u8>> {
    prop_oneof![Just(2u8), Just(4u8), Just(16u8), Just(64u8), Just(200u8)]
        .prop_flat_map(|sigma| proptest::collection::vec(0..sigma, 1..600))
}

fn params_strategy() -> impl Strategy<Value = ForestParams> {
    (0u32..4, 0u32..3, 0u32..3, any::<bool>(), prop_oneof![Just(Backend::Plain), Just(Backend::Rrr(15)), Just(Backend::Rrr(127))])
        .prop_map(|(b, s, h, nav, backend)| {
            let block = 1usize << (b + 1);
            ForestParams::new(block, block << s, block << (s + h)).with_nav(nav).with_backend(backend)
        })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn matches_oracle(text in text_strategy(), params in params_strategy()) {
        let f = WaveletForest::new(&text, params).unwrap();
        let oracle = ScanOracle::new(&text);
        for c in oracle.symbols().collect::<Vec<_>>() {
            for i in 0..=text.len() {
                prop_assert_eq!(f.rank(i, c).unwrap(), oracle.rank(i, c));
            }
            let mut prev = 0;
            for j in 1..=oracle.count(c) {
                let p = f.select(j, c).unwrap().unwrap();
                prop_assert_eq!(Some(p), oracle.select(j, c));
                prop_assert!(p > prev);
                prev = p;
            }
            prop_assert_eq!(f.select(oracle.count(c) + 1, c).unwrap(), None);
        }
        for (i, &c) in text.iter().enumerate() {
            prop_assert_eq!(f.access(i + 1).unwrap(), c);
            prop_assert_eq!(f.select(f.rank(i + 1, c).unwrap(), c).unwrap(), Some(i + 1));
        }
    }

    #[test]
    fn nav_is_transparent(text in text_strategy(), params in params_strategy()) {
        let on = WaveletForest::new(&text, params.with_nav(true)).unwrap();
        let off = WaveletForest::new(&text, params.with_nav(false)).unwrap();
        prop_assert_eq!(on.stored_bits(), off.stored_bits());
        for i in 0..on.stored_bits() {
            prop_assert_eq!(on.merged().get(i), off.merged().get(i));
        }
        for c in on.alphabet().to_vec() {
            for ib in 1..=on.block_count() {
                if on.block_rank(c, ib).is_some() {
                    let (a, b) = (on.descend_to_leaf(ib, c).unwrap(), off.descend_to_leaf(ib, c).unwrap());
                    prop_assert_eq!(a.frames(), b.frames());
                }
            }
        }
    }
}

proptest! {
    #[test]
    fn count_equal_matches_scan(lengths in proptest::collection::vec(0u8..23, 0..60), lead in 0u32..64, value in 0u32..23) {
        let mut buf = BitBuf::new();
        buf.push_bits(0, lead);
        for &l in &lengths {
            buf.push_bits(l as u64, LENGTH_WIDTH);
        }
        buf.push_bits(u64::MAX, 64);
        for count in 0..=lengths.len() {
            let expected = lengths[..count].iter().filter(|&&l| l as u32 == value).count();
            prop_assert_eq!(count_equal(buf.words(), lead as usize, count, value), expected);
        }
    }
}
