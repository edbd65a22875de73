use std::collections::{BTreeSet, HashMap};
use std::path::PathBuf;

use definnet::embed_store::EmbeddingTable;
use definnet::wordnet::{load_wordnet, IcTable, Measure, Pos, SynsetId, WordNetError, WordNetGraph};

fn fixtures() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../fixtures")
}

fn mini() -> WordNetGraph {
    load_wordnet(fixtures().join("mini/wordnet")).unwrap()
}

fn first(g: &WordNetGraph, word: &str, pos: Pos) -> SynsetId {
    g.first_synset(word, pos).unwrap()
}

#[test]
fn mini_counts() {
    let g = mini();
    assert_eq!(g.count(Pos::Noun), 36);
    assert_eq!(g.count(Pos::Verb), 10);
    assert_eq!(g.count(Pos::Adj), 3);
    assert_eq!(g.count(Pos::Adv), 1);
    assert_eq!(g.roots(Pos::Noun).len(), 1);
    assert_eq!(g.roots(Pos::Verb).len(), 2);
    assert_eq!(g.roots(Pos::Noun)[0].to_string(), "00001681-n");
}

#[test]
fn mini_glosses_and_lemmas() {
    let g = mini();
    let car = g.synset(&first(&g, "automobile", Pos::Noun)).unwrap();
    assert_eq!(car.lemmas, vec!["car", "auto", "automobile"]);
    assert_eq!(car.definition, "a motor vehicle with four wheels");
    assert_eq!(car.examples, vec!["he needs a car to get to work"]);
    let cheer = g.synset(&first(&g, "cheerlessness", Pos::Noun)).unwrap();
    assert_eq!(cheer.definition, "a feeling of dreary or pessimistic sadness");
    let happy = g.synset(&first(&g, "happy", Pos::Adj)).unwrap();
    assert_eq!(happy.lemmas, vec!["happy"]);
    assert!(g.synsets_of("glad", Pos::Adj).len() == 1);
}

#[test]
fn sense_order_follows_index() {
    let g = mini();
    let senses = g.synsets_of("dog", Pos::Noun);
    assert_eq!(senses.len(), 2);
    assert_eq!(g.synset(&senses[0]).unwrap().lemmas[0], "dog");
    assert_eq!(g.synset(&senses[1]).unwrap().lemmas[0], "frump");
}

#[test]
fn instance_hypernyms_are_edges() {
    let g = mini();
    let rex = first(&g, "rex", Pos::Noun);
    let dog = first(&g, "dog", Pos::Noun);
    assert_eq!(g.synset(&rex).unwrap().hypernyms, vec![dog]);
    assert!(g.synset(&dog).unwrap().hyponyms.contains(&rex));
}

#[test]
fn edges_are_mutual() {
    let g = mini();
    for s in g.synsets() {
        for h in &s.hypernyms {
            assert!(g.synset(h).unwrap().hyponyms.contains(&s.id));
        }
        for h in &s.hyponyms {
            assert!(g.synset(h).unwrap().hypernyms.contains(&s.id));
        }
    }
}

#[test]
fn sisters_of_double_parent() {
    let g = mini();
    let chauffeur = first(&g, "chauffeur", Pos::Noun);
    let sisters: BTreeSet<String> = g
        .sister_synsets(&chauffeur)
        .unwrap()
        .iter()
        .map(|s| g.synset(s).unwrap().lemmas[0].clone())
        .collect();
    // children of driver and of worker, minus chauffeur itself
    assert_eq!(sisters, BTreeSet::from(["taxi_driver".to_owned()]));
    let kitten = first(&g, "kitten", Pos::Noun);
    assert!(g.sister_synsets(&kitten).unwrap().is_empty());
}

#[test]
fn missing_index_file_is_named() {
    let dir = tempfile::tempdir().unwrap();
    for f in std::fs::read_dir(fixtures().join("mini/wordnet")).unwrap() {
        let f = f.unwrap();
        if f.file_name() != "index.verb" {
            std::fs::copy(f.path(), dir.path().join(f.file_name())).unwrap();
        }
    }
    match load_wordnet(dir.path()) {
        Err(WordNetError::MissingFile(name)) => assert_eq!(name, "index.verb"),
        other => panic!("unexpected {other:?}"),
    }
}

#[test]
fn shifted_offsets_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    for f in std::fs::read_dir(fixtures().join("mini/wordnet")).unwrap() {
        let f = f.unwrap();
        std::fs::copy(f.path(), dir.path().join(f.file_name())).unwrap();
    }
    let noun = dir.path().join("data.noun");
    let text = std::fs::read_to_string(&noun).unwrap();
    std::fs::write(&noun, format!(" {text}")).unwrap();
    assert!(matches!(
        load_wordnet(dir.path()),
        Err(WordNetError::MalformedOffset { .. })
    ));
}

#[test]
fn verbs_join_under_virtual_root() {
    let mut g = mini();
    let remove = first(&g, "remove", Pos::Verb);
    let walk = first(&g, "walk", Pos::Verb);
    // remove(2) .. change(1) | move(1) .. go(2) .. walk(3), plus the top node
    assert_eq!(g.path_distance(&remove, &walk).unwrap(), 2 + 3);
    assert_eq!(g.wup_sim(&remove, &walk).unwrap(), 2.0 / (3.0 + 4.0));
    let ic = IcTable::intrinsic(&g);
    assert_eq!(g.res_sim(&ic, &remove, &walk).unwrap(), 0.0);
    assert_eq!(g.lcs(&remove, &walk).unwrap(), None);
    g.set_virtual_root(Pos::Verb, false);
    assert!(matches!(
        g.path_sim(&remove, &walk),
        Err(WordNetError::NoCommonAncestor(..))
    ));
}

#[test]
fn word_similarity_takes_best_sense() {
    let g = mini();
    // "dog" has an animal sense and a person sense
    let ic = IcTable::intrinsic(&g);
    let to_driver = g
        .word_similarity(Measure::Path, Some(&ic), "dog", "driver", Pos::Noun)
        .unwrap();
    assert_eq!(to_driver, 1.0 / 3.0);
    let to_puppy = g
        .word_similarity(Measure::Path, Some(&ic), "dog", "puppy", Pos::Noun)
        .unwrap();
    assert_eq!(to_puppy, 0.5);
}

#[test]
fn intrinsic_ic_monotone_and_rooted() {
    let g = mini();
    let ic = IcTable::intrinsic(&g);
    assert_eq!(ic.get(&g.roots(Pos::Noun)[0]), Some(0.0));
    for s in g.synsets() {
        for h in &s.hypernyms {
            assert!(ic.get(h).unwrap() <= ic.get(&s.id).unwrap());
        }
    }
}

#[test]
fn corpus_ic_file_drives_res() {
    let g = mini();
    let entity = first(&g, "entity", Pos::Noun);
    let animal = first(&g, "animal", Pos::Noun);
    let text = format!(
        "wnver::test\n{}n 100 ROOT\n{}n 25\n",
        entity.offset, animal.offset
    );
    let ic = IcTable::from_counts(&text).unwrap();
    let dog = first(&g, "dog", Pos::Noun);
    let cat = first(&g, "cat", Pos::Noun);
    assert!((g.res_sim(&ic, &dog, &cat).unwrap() - 4f64.ln()).abs() < 1e-15);
    let oak = first(&g, "oak", Pos::Noun);
    assert!(matches!(
        g.res_sim(&ic, &oak, &oak),
        Err(WordNetError::MissingIc(_))
    ));
}

#[test]
fn kitten_skips_oov_parent() {
    let g = mini();
    let table = EmbeddingTable::load(
        fixtures().join("mini/embeddings.txt"),
        definnet::embed_store::Format::Text,
    )
    .unwrap();
    assert!(table.lookup("cat").is_none());
    let (lemma, v) = g.first_iv_hypernym("kitten", Pos::Noun, &table).unwrap();
    assert_eq!(lemma, "animal");
    assert_eq!(v, table.lookup("animal").unwrap());
    let (lemma, _) = g.first_iv_hypernym("puppy", Pos::Noun, &table).unwrap();
    assert_eq!(lemma, "dog");
}

/// Counts noun synsets of a complete WordNet 3.0 database when
/// `WORDNET_DIR` points at one.
#[test]
fn full_wordnet_noun_count() {
    let Ok(dir) = std::env::var("WORDNET_DIR") else {
        eprintln!("WORDNET_DIR not set, skipping");
        return;
    };
    let g = load_wordnet(dir).unwrap();
    assert_eq!(g.count(Pos::Noun), 82_115);
    assert_eq!(g.count(Pos::Verb), 13_767);
    let mut by_root: HashMap<SynsetId, usize> = HashMap::new();
    for r in g.roots(Pos::Noun) {
        *by_root.entry(r).or_default() += 1;
    }
    assert_eq!(by_root.len(), 1);
}
