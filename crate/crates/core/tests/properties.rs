use std::collections::BTreeSet;
use std::path::PathBuf;

use definnet::baselines::head_baseline;
use definnet::defparse::{parse_ptb, semantic_head, HeadRuleTable, ParseTree};
use definnet::embed_store::{cosine, EmbeddingTable, NgramComposer};
use definnet::wordnet::{load_wordnet, IcTable, Pos, WordNetGraph};
use proptest::prelude::*;

fn mini() -> WordNetGraph {
    let dir = PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures/mini/wordnet");
    load_wordnet(dir).unwrap()
}

fn finite() -> impl Strategy<Value = f32> {
    use prop::num::f32::{NEGATIVE, NORMAL, POSITIVE, SUBNORMAL, ZERO};
    NORMAL | SUBNORMAL | ZERO | POSITIVE | NEGATIVE
}

fn table_strategy() -> impl Strategy<Value = EmbeddingTable> {
    (1usize..6).prop_flat_map(|dim| {
        prop::collection::btree_map(
            "[a-z][a-z0-9_'-]{0,8}",
            prop::collection::vec(finite(), dim),
            0..12,
        )
        .prop_map(move |rows| {
            let mut t = EmbeddingTable::new("p", dim).unwrap();
            for (k, v) in rows {
                t.insert(k, &v).unwrap();
            }
            t
        })
    })
}

fn bits(v: &[f32]) -> Vec<u32> {
    v.iter().map(|x| x.to_bits()).collect()
}

fn same_bits(a: &EmbeddingTable, b: &EmbeddingTable) -> bool {
    a.dim() == b.dim()
        && a.tokens() == b.tokens()
        && a.iter().zip(b.iter()).all(|((_, x), (_, y))| bits(x) == bits(y))
}

proptest! {
    #[test]
    fn text_and_binary_round_trip_bit_exact(t in table_strategy()) {
        let mut text = Vec::new();
        t.write_text(&mut text).unwrap();
        let back = EmbeddingTable::read_text(&mut text.as_slice()).unwrap();
        prop_assert!(same_bits(&t, &back));
        let mut bin = Vec::new();
        t.write_binary(&mut bin).unwrap();
        let back = EmbeddingTable::read_binary(&mut bin.as_slice()).unwrap();
        prop_assert!(same_bits(&t, &back));
        let mut again = Vec::new();
        back.write_binary(&mut again).unwrap();
        prop_assert_eq!(bin, again);
    }

    #[test]
    fn cosine_is_symmetric_and_scale_free(
        pair in (1usize..20).prop_flat_map(|n| (
            prop::collection::vec(-100.0f64..100.0, n),
            prop::collection::vec(-100.0f64..100.0, n),
        )),
        alpha in 1e-3f64..1e3,
        beta in 1e-3f64..1e3,
    ) {
        let (a, b) = pair;
        let Ok(c) = cosine(&a, &b) else { return Ok(()); };
        prop_assert_eq!(cosine(&b, &a).unwrap(), c);
        let sa: Vec<f64> = a.iter().map(|x| alpha * x).collect();
        let sb: Vec<f64> = b.iter().map(|x| beta * x).collect();
        let scaled = cosine(&sa, &sb).unwrap();
        prop_assert!((scaled - c).abs() <= 1e-12 * c.abs().max(1e-300) || (scaled - c).abs() < 1e-15);
    }

    #[test]
    fn ngram_sum_matches_substrings_in_any_order(
        word in "[a-z]{3,12}",
        n in 1usize..5,
        markers in any::<bool>(),
        seed in any::<u64>(),
    ) {
        let wrapped = if markers { format!("<{word}>") } else { word.clone() };
        prop_assume!(wrapped.len() >= n);
        let grams: BTreeSet<&str> = (0..=wrapped.len() - n).map(|i| &wrapped[i..i + n]).collect();
        let vector = |g: &str| -> Vec<f32> {
            let h = g.bytes().fold(seed, |h, b| h.wrapping_mul(31).wrapping_add(u64::from(b)));
            (0..3).map(|k| ((h >> (8 * k)) % 17) as f32 - 8.0).collect()
        };
        let mut forward = EmbeddingTable::new("f", 3).unwrap();
        let mut reverse = EmbeddingTable::new("r", 3).unwrap();
        for g in &grams {
            forward.insert(*g, &vector(g)).unwrap();
        }
        for g in grams.iter().rev() {
            reverse.insert(*g, &vector(g)).unwrap();
        }
        let mut want = [0f32; 3];
        for i in 0..=wrapped.len() - n {
            for (w, x) in want.iter_mut().zip(vector(&wrapped[i..i + n])) {
                *w += x;
            }
        }
        let c = NgramComposer { n, boundary_markers: markers };
        prop_assert_eq!(c.compose(&forward, &word).unwrap(), want.to_vec());
        prop_assert_eq!(c.compose(&reverse, &word).unwrap(), want.to_vec());
    }
}

#[test]
fn measures_are_symmetric_and_reflexive() {
    let g = mini();
    let ic = IcTable::intrinsic(&g);
    for pos in [Pos::Noun, Pos::Verb] {
        let ids: Vec<_> = g.synsets().filter(|s| s.pos() == pos).map(|s| s.id).collect();
        for a in &ids {
            assert_eq!(g.path_sim(a, a).unwrap(), 1.0);
            assert_eq!(g.wup_sim(a, a).unwrap(), 1.0);
            assert_eq!(g.res_sim(&ic, a, a).unwrap(), ic.get(a).unwrap());
            for b in &ids {
                assert_eq!(g.path_sim(a, b).unwrap(), g.path_sim(b, a).unwrap());
                assert_eq!(g.wup_sim(a, b).unwrap(), g.wup_sim(b, a).unwrap());
                assert_eq!(g.res_sim(&ic, a, b).unwrap(), g.res_sim(&ic, b, a).unwrap());
            }
        }
    }
}

#[test]
fn no_synset_is_its_own_sister() {
    let g = mini();
    for s in g.synsets() {
        assert!(!g.sister_synsets(&s.id).unwrap().contains(&s.id), "{}", s.id);
    }
}

proptest! {
    #[test]
    fn head_baseline_copies_a_table_row(
        known in prop::collection::vec(any::<bool>(), 64),
        values in prop::collection::vec(-4.0f32..4.0, 64 * 3),
    ) {
        let g = mini();
        let lemmas: Vec<(&str, Pos)> = g.lemmas();
        let mut t = EmbeddingTable::new("t", 3).unwrap();
        let mut seen = BTreeSet::new();
        for (i, (w, _)) in lemmas.iter().enumerate() {
            if known[i % known.len()] && seen.insert(*w) {
                let k = 3 * (i % 64);
                t.insert(*w, &values[k..k + 3]).unwrap();
            }
        }
        for (w, pos) in &lemmas {
            if let Ok(v) = head_baseline(&g, &t, w, *pos) {
                prop_assert!(t.iter().any(|(_, row)| bits(row) == bits(&v)));
            }
        }
    }
}

fn tree_strategy() -> impl Strategy<Value = ParseTree> {
    let leaf = (
        prop::sample::select(vec![
            "NN", "NNS", "JJ", "DT", "IN", "VB", "VBZ", "CC", "RB", "PRP", ",",
        ]),
        "[a-z]{1,6}|\\(|\\)",
    )
        .prop_map(|(tag, tok)| ParseTree::leaf(tag, tok));
    leaf.prop_recursive(4, 40, 4, |inner| {
        (
            prop::sample::select(vec!["NP", "VP", "PP", "ADJP", "S", "SBAR", "NP-SBJ"]),
            prop::collection::vec(inner, 1..4),
        )
            .prop_map(|(label, children)| ParseTree::node(label, children))
    })
    .prop_map(|t| ParseTree::node("ROOT", vec![t]))
}

proptest! {
    #[test]
    fn trees_round_trip_and_heads_are_leaves(t in tree_strategy()) {
        let text = t.serialize();
        prop_assert_eq!(&parse_ptb(&text).unwrap(), &t);
        let rules = HeadRuleTable::semantic();
        let h = semantic_head(&t, &rules);
        prop_assert!(t.leaves().contains(&(h.token, h.tag)));
        let again = parse_ptb(&text).unwrap();
        prop_assert_eq!(semantic_head(&again, &rules), h);
    }
}
