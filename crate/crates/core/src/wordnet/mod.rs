//! The WordNet 3.0 lexical database: synsets, lemma index, hypernym graph,
//! and the path, Wu-Palmer and Resnik similarity measures.

mod ic;
mod loader;
mod measures;

use std::collections::{HashMap, HashSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use thiserror::Error;

use crate::embed_store::EmbeddingTable;

pub use ic::{IcMethod, IcTable};
pub use loader::load_wordnet;
pub use measures::{Measure, Subsumer};

#[derive(Debug, Error)]
pub enum WordNetError {
    #[error("missing WordNet file {0}")]
    MissingFile(String),
    #[error("i/o error reading {file}: {source}")]
    Io { file: String, source: std::io::Error },
    #[error("{file}:{line}: malformed offsets: {message}")]
    MalformedOffset {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{file}:{line}: malformed record: {message}")]
    Malformed {
        file: String,
        line: usize,
        message: String,
    },
    #[error("{from} points at missing synset {to}")]
    DanglingEdge { from: SynsetId, to: SynsetId },
    #[error("{a} lists {b} as {relation} but not the reverse")]
    InconsistentEdge {
        a: SynsetId,
        b: SynsetId,
        relation: &'static str,
    },
    #[error("hypernym cycle through {0}")]
    Cycle(SynsetId),
    #[error("unknown synset {0}")]
    UnknownSynset(SynsetId),
    #[error("part-of-speech mismatch: {0} vs {1}")]
    PosMismatch(SynsetId, SynsetId),
    #[error("{0} and {1} share no ancestor")]
    NoCommonAncestor(SynsetId, SynsetId),
    #[error("no information content for {0}")]
    MissingIc(SynsetId),
    #[error("{word:?} ({pos}) is not in WordNet")]
    NotInWordNet { word: String, pos: Pos },
    #[error("no in-vocabulary hypernym lemma above {word:?} ({pos})")]
    NoIvHypernym { word: String, pos: Pos },
    #[error("no comparable synset pair for {0:?} and {1:?}")]
    NoComparablePair(String, String),
    #[error("IC file line {line}: {message}")]
    IcFormat { line: usize, message: String },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Pos {
    Noun,
    Verb,
    Adj,
    Adv,
}

impl Pos {
    pub const ALL: [Pos; 4] = [Pos::Noun, Pos::Verb, Pos::Adj, Pos::Adv];

    pub fn letter(self) -> char {
        match self {
            Pos::Noun => 'n',
            Pos::Verb => 'v',
            Pos::Adj => 'a',
            Pos::Adv => 'r',
        }
    }

    /// Accepts the data-file letters, including `s` for adjective satellites.
    pub fn from_letter(c: char) -> Option<Pos> {
        match c {
            'n' => Some(Pos::Noun),
            'v' => Some(Pos::Verb),
            'a' | 's' => Some(Pos::Adj),
            'r' => Some(Pos::Adv),
            _ => None,
        }
    }

    pub fn file_stem(self) -> &'static str {
        match self {
            Pos::Noun => "noun",
            Pos::Verb => "verb",
            Pos::Adj => "adj",
            Pos::Adv => "adv",
        }
    }

    /// Coarse POS of a Penn Treebank tag.
    pub fn from_penn(tag: &str) -> Option<Pos> {
        if tag.starts_with("NN") {
            Some(Pos::Noun)
        } else if tag.starts_with("VB") || tag == "MD" {
            Some(Pos::Verb)
        } else if tag.starts_with("JJ") {
            Some(Pos::Adj)
        } else if tag.starts_with("RB") {
            Some(Pos::Adv)
        } else {
            None
        }
    }
}

impl fmt::Display for Pos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.letter())
    }
}

impl FromStr for Pos {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "n" | "noun" => Ok(Pos::Noun),
            "v" | "verb" => Ok(Pos::Verb),
            "a" | "s" | "adj" => Ok(Pos::Adj),
            "r" | "adv" => Ok(Pos::Adv),
            other => Err(format!("unknown part of speech {other:?}")),
        }
    }
}

/// Byte offset in the POS data file plus the POS, printed as `00001681-n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SynsetId {
    pub offset: u32,
    pub pos: Pos,
}

impl SynsetId {
    pub fn new(offset: u32, pos: Pos) -> Self {
        SynsetId { offset, pos }
    }
}

impl fmt::Display for SynsetId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:08}-{}", self.offset, self.pos)
    }
}

impl FromStr for SynsetId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (off, pos) = s
            .split_once('-')
            .ok_or_else(|| format!("synset id {s:?} is not <offset>-<pos>"))?;
        let offset = off.parse::<u32>().map_err(|e| format!("synset id {s:?}: {e}"))?;
        Ok(SynsetId::new(offset, pos.parse()?))
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Synset {
    pub id: SynsetId,
    pub lemmas: Vec<String>,
    pub definition: String,
    pub examples: Vec<String>,
    /// `@` and `@i` targets, in file order.
    pub hypernyms: Vec<SynsetId>,
    /// `~` and `~i` targets, in file order.
    pub hyponyms: Vec<SynsetId>,
}

impl Synset {
    pub fn pos(&self) -> Pos {
        self.id.pos
    }
}

/// Splits a raw gloss into the definition and its quoted usage examples.
pub fn split_gloss(gloss: &str) -> (String, Vec<String>) {
    let mut definition = Vec::new();
    let mut examples = Vec::new();
    for part in gloss.split(';').map(str::trim) {
        if part.starts_with('"') {
            examples.push(part.trim_matches('"').trim().to_owned());
        } else if examples.is_empty() && !part.is_empty() {
            definition.push(part);
        }
    }
    (definition.join("; "), examples)
}

#[derive(Debug, Clone)]
pub struct WordNetGraph {
    synsets: Vec<Synset>,
    by_id: HashMap<SynsetId, usize>,
    lemma_index: HashMap<(String, Pos), Vec<SynsetId>>,
    /// Minimum edges to a real root, plus one.
    depth: Vec<u32>,
    virtual_root: [bool; 4],
}

impl WordNetGraph {
    /// Builds a graph from synsets and a lemma index, validating edges.
    ///
    /// Lemma index entries default to every synset carrying the lemma, in
    /// id order, for lemmas that `lemma_index` leaves out.
    pub fn from_parts(
        mut synsets: Vec<Synset>,
        lemma_index: HashMap<(String, Pos), Vec<SynsetId>>,
    ) -> Result<Self, WordNetError> {
        synsets.sort_by_key(|s| s.id);
        let by_id: HashMap<SynsetId, usize> = synsets.iter().enumerate().map(|(i, s)| (s.id, i)).collect();
        for s in &synsets {
            for (targets, back, relation) in
                [(&s.hypernyms, false, "hypernym"), (&s.hyponyms, true, "hyponym")]
            {
                for t in targets {
                    let Some(&j) = by_id.get(t) else {
                        return Err(WordNetError::DanglingEdge { from: s.id, to: *t });
                    };
                    let other = &synsets[j];
                    let reverse = if back { &other.hypernyms } else { &other.hyponyms };
                    if !reverse.contains(&s.id) {
                        return Err(WordNetError::InconsistentEdge {
                            a: s.id,
                            b: *t,
                            relation,
                        });
                    }
                }
            }
        }
        let mut index = lemma_index;
        for ids in index.values() {
            for id in ids {
                if !by_id.contains_key(id) {
                    return Err(WordNetError::UnknownSynset(*id));
                }
            }
        }
        let mut implied: HashMap<(String, Pos), Vec<SynsetId>> = HashMap::new();
        for s in &synsets {
            for l in &s.lemmas {
                let key = (l.to_lowercase(), s.id.pos);
                if !index.contains_key(&key) {
                    implied.entry(key).or_default().push(s.id);
                }
            }
        }
        for (k, mut v) in implied {
            v.dedup();
            index.insert(k, v);
        }
        let mut g = WordNetGraph {
            synsets,
            by_id,
            lemma_index: index,
            depth: Vec::new(),
            virtual_root: [false, true, false, false],
        };
        g.depth = g.compute_depths()?;
        Ok(g)
    }

    fn compute_depths(&self) -> Result<Vec<u32>, WordNetError> {
        // Kahn's algorithm from the roots doubles as the cycle check.
        let n = self.synsets.len();
        let mut indegree: Vec<usize> = self.synsets.iter().map(|s| s.hypernyms.len()).collect();
        let mut depth = vec![u32::MAX; n];
        let mut queue: VecDeque<usize> = VecDeque::new();
        for (i, d) in indegree.iter().enumerate() {
            if *d == 0 {
                depth[i] = 1;
                queue.push_back(i);
            }
        }
        let mut seen = 0;
        while let Some(i) = queue.pop_front() {
            seen += 1;
            for h in &self.synsets[i].hyponyms {
                let j = self.by_id[h];
                depth[j] = depth[j].min(depth[i] + 1);
                indegree[j] -= 1;
                if indegree[j] == 0 {
                    queue.push_back(j);
                }
            }
        }
        if seen != n {
            let stuck = indegree.iter().position(|&d| d > 0).unwrap_or(0);
            return Err(WordNetError::Cycle(self.synsets[stuck].id));
        }
        Ok(depth)
    }

    pub fn len(&self) -> usize {
        self.synsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.synsets.is_empty()
    }

    pub fn count(&self, pos: Pos) -> usize {
        self.synsets.iter().filter(|s| s.id.pos == pos).count()
    }

    /// All synsets in id order.
    pub fn synsets(&self) -> impl Iterator<Item = &Synset> {
        self.synsets.iter()
    }

    pub fn synset(&self, id: &SynsetId) -> Option<&Synset> {
        self.by_id.get(id).map(|&i| &self.synsets[i])
    }

    fn get(&self, id: &SynsetId) -> Result<usize, WordNetError> {
        self.by_id
            .get(id)
            .copied()
            .ok_or(WordNetError::UnknownSynset(*id))
    }

    pub fn roots(&self, pos: Pos) -> Vec<SynsetId> {
        self.synsets
            .iter()
            .filter(|s| s.id.pos == pos && s.hypernyms.is_empty())
            .map(|s| s.id)
            .collect()
    }

    /// Synsets of `word` in sense order. Spaces map to underscores and the
    /// lookup ignores case, like the index files.
    pub fn synsets_of(&self, word: &str, pos: Pos) -> &[SynsetId] {
        let key = (word.trim().to_lowercase().replace(' ', "_"), pos);
        self.lemma_index.get(&key).map(Vec::as_slice).unwrap_or(&[])
    }

    pub fn first_synset(&self, word: &str, pos: Pos) -> Result<SynsetId, WordNetError> {
        self.synsets_of(word, pos)
            .first()
            .copied()
            .ok_or_else(|| WordNetError::NotInWordNet {
                word: word.to_owned(),
                pos,
            })
    }

    /// Every (lemma, pos) key of the index, sorted.
    pub fn lemmas(&self) -> Vec<(&str, Pos)> {
        let mut v: Vec<(&str, Pos)> = self.lemma_index.keys().map(|(l, p)| (l.as_str(), *p)).collect();
        v.sort();
        v
    }

    pub fn virtual_root(&self, pos: Pos) -> bool {
        self.virtual_root[pos as usize]
    }

    /// Joins all roots of `pos` under one artificial top node for the
    /// path and Wu-Palmer measures. On for verbs by default.
    pub fn set_virtual_root(&mut self, pos: Pos, on: bool) {
        self.virtual_root[pos as usize] = on;
    }

    /// Depth with root = 1, counting the virtual root when it is enabled.
    pub fn depth(&self, id: &SynsetId) -> Result<u32, WordNetError> {
        let i = self.get(id)?;
        Ok(self.depth[i] + u32::from(self.virtual_root(id.pos)))
    }

    /// Every ancestor of `id` (itself included) with its minimum edge
    /// distance.
    pub fn ancestors(&self, id: &SynsetId) -> Result<HashMap<SynsetId, u32>, WordNetError> {
        let start = self.get(id)?;
        let mut dist = HashMap::new();
        dist.insert(*id, 0u32);
        let mut queue = VecDeque::from([start]);
        while let Some(i) = queue.pop_front() {
            let d = dist[&self.synsets[i].id];
            for h in &self.synsets[i].hypernyms {
                if !dist.contains_key(h) {
                    dist.insert(*h, d + 1);
                    queue.push_back(self.by_id[h]);
                }
            }
        }
        Ok(dist)
    }

    /// Hyponym closure of `id`, excluding `id` itself.
    pub fn hyponym_closure(&self, id: &SynsetId) -> Result<HashSet<SynsetId>, WordNetError> {
        let start = self.get(id)?;
        let mut seen = HashSet::new();
        let mut stack = vec![start];
        while let Some(i) = stack.pop() {
            for h in &self.synsets[i].hyponyms {
                if seen.insert(*h) {
                    stack.push(self.by_id[h]);
                }
            }
        }
        Ok(seen)
    }

    /// Synsets sharing a direct hypernym with `id`, excluding `id`, by id.
    pub fn sister_synsets(&self, id: &SynsetId) -> Result<Vec<SynsetId>, WordNetError> {
        let s = &self.synsets[self.get(id)?];
        let mut out: Vec<SynsetId> = s
            .hypernyms
            .iter()
            .flat_map(|h| self.synsets[self.by_id[h]].hyponyms.iter().copied())
            .filter(|x| x != id)
            .collect();
        out.sort();
        out.dedup();
        Ok(out)
    }

    /// Walks up from the first sense of `word`, one hypernym level at a
    /// time, and returns the first lemma that `table` knows.
    pub fn first_iv_hypernym<'t>(
        &self,
        word: &str,
        pos: Pos,
        table: &'t EmbeddingTable,
    ) -> Result<(String, &'t [f32]), WordNetError> {
        let start = self.first_synset(word, pos)?;
        let mut seen = HashSet::from([start]);
        let mut level = vec![start];
        while !level.is_empty() {
            let mut next = Vec::new();
            for id in &level {
                for h in &self.synsets[self.by_id[id]].hypernyms {
                    if seen.insert(*h) {
                        next.push(*h);
                    }
                }
            }
            for id in &next {
                for lemma in &self.synsets[self.by_id[id]].lemmas {
                    if let Some(v) = table.lookup(lemma) {
                        return Ok((lemma.clone(), v));
                    }
                }
            }
            level = next;
        }
        Err(WordNetError::NoIvHypernym {
            word: word.to_owned(),
            pos,
        })
    }
}

#[cfg(test)]
pub(crate) mod toy {
    use super::*;

    /// root -> {A -> {A1, A2}, B}, all nouns.
    pub fn graph() -> WordNetGraph {
        let ids: Vec<SynsetId> = (1..=5).map(|o| SynsetId::new(o, Pos::Noun)).collect();
        let [root, a, a1, a2, b] = [ids[0], ids[1], ids[2], ids[3], ids[4]];
        let mk = |id, lemma: &str, hyper: Vec<SynsetId>, hypo: Vec<SynsetId>| Synset {
            id,
            lemmas: vec![lemma.to_owned()],
            definition: String::new(),
            examples: vec![],
            hypernyms: hyper,
            hyponyms: hypo,
        };
        let synsets = vec![
            mk(root, "root", vec![], vec![a, b]),
            mk(a, "a", vec![root], vec![a1, a2]),
            mk(a1, "a1", vec![a], vec![]),
            mk(a2, "a2", vec![a], vec![]),
            mk(b, "b", vec![root], vec![]),
        ];
        WordNetGraph::from_parts(synsets, HashMap::new()).unwrap()
    }

    pub fn id(offset: u32) -> SynsetId {
        SynsetId::new(offset, Pos::Noun)
    }
}

#[cfg(test)]
mod tests {
    use super::toy::{graph, id};
    use super::*;

    #[test]
    fn synset_id_round_trip() {
        let s = SynsetId::new(1681, Pos::Noun);
        assert_eq!(s.to_string(), "00001681-n");
        assert_eq!("00001681-n".parse::<SynsetId>().unwrap(), s);
        assert!("1681".parse::<SynsetId>().is_err());
    }

    #[test]
    fn gloss_split() {
        let (d, e) = split_gloss(r#"a young dog; "the puppy slept"; "it barked""#);
        assert_eq!(d, "a young dog");
        assert_eq!(e, vec!["the puppy slept", "it barked"]);
        let (d, e) = split_gloss("cause to change; make different");
        assert_eq!(d, "cause to change; make different");
        assert!(e.is_empty());
    }

    #[test]
    fn toy_depths() {
        let g = graph();
        assert_eq!(g.depth(&id(1)).unwrap(), 1);
        assert_eq!(g.depth(&id(3)).unwrap(), 3);
        assert_eq!(g.roots(Pos::Noun), vec![id(1)]);
    }

    #[test]
    fn sisters() {
        let g = graph();
        assert_eq!(g.sister_synsets(&id(3)).unwrap(), vec![id(4)]);
        assert!(g.sister_synsets(&id(1)).unwrap().is_empty());
        assert_eq!(g.sister_synsets(&id(2)).unwrap(), vec![id(5)]);
    }

    #[test]
    fn closure() {
        let g = graph();
        assert_eq!(g.hyponym_closure(&id(2)).unwrap().len(), 2);
        assert_eq!(g.hyponym_closure(&id(1)).unwrap().len(), 4);
    }

    #[test]
    fn dangling_edge_rejected() {
        let s = Synset {
            id: id(1),
            lemmas: vec!["x".into()],
            definition: String::new(),
            examples: vec![],
            hypernyms: vec![id(9)],
            hyponyms: vec![],
        };
        assert!(matches!(
            WordNetGraph::from_parts(vec![s], HashMap::new()),
            Err(WordNetError::DanglingEdge { .. })
        ));
    }

    #[test]
    fn one_sided_edge_rejected() {
        let mk = |o, hyper: Vec<SynsetId>| Synset {
            id: id(o),
            lemmas: vec![],
            definition: String::new(),
            examples: vec![],
            hypernyms: hyper,
            hyponyms: vec![],
        };
        assert!(matches!(
            WordNetGraph::from_parts(vec![mk(1, vec![]), mk(2, vec![id(1)])], HashMap::new()),
            Err(WordNetError::InconsistentEdge { .. })
        ));
    }

    #[test]
    fn first_iv_hypernym_walks_up() {
        let g = graph();
        let mut t = EmbeddingTable::new("t", 2).unwrap();
        t.insert("root", &[1.0, 0.0]).unwrap();
        let (lemma, v) = g.first_iv_hypernym("a1", Pos::Noun, &t).unwrap();
        assert_eq!(lemma, "root");
        assert_eq!(v, &[1.0, 0.0]);
        t.insert("a", &[0.0, 1.0]).unwrap();
        assert_eq!(g.first_iv_hypernym("a1", Pos::Noun, &t).unwrap().0, "a");
        assert!(matches!(
            g.first_iv_hypernym("root", Pos::Noun, &t),
            Err(WordNetError::NoIvHypernym { .. })
        ));
        assert!(matches!(
            g.first_iv_hypernym("zzz", Pos::Noun, &t),
            Err(WordNetError::NotInWordNet { .. })
        ));
    }
}
