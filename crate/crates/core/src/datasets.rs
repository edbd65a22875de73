//! Experiment datasets: in/out-of-vocabulary splits, direct train/test
//! sets, OOV word pairs with WordNet similarities, and fixed-size lists of
//! pairs with well separated similarity values.
//!
//! Every file starts with a `#` header carrying the format version, seed
//! and embedding table name, followed by tab-separated rows.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::io::{self, BufRead, Write};
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::defparse::{extract_pair, parse_ptb, DefPair, DefRecord, HeadRuleTable, ParseTree, Reject};
use crate::denn::lookup_folded;
use crate::embed_store::EmbeddingTable;
use crate::wordnet::{IcTable, Measure, Pos, SynsetId, WordNetError, WordNetGraph};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum DatasetError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
    #[error("line {line}: {message}")]
    Format { line: usize, message: String },
    #[error("{0}")]
    WordNet(#[from] WordNetError),
    #[error("no eligible {0}")]
    Empty(&'static str),
    #[error("asked for {wanted} pairs, only {made} could be built")]
    NotEnough { wanted: usize, made: usize },
    #[error("{found} pairs cannot fill a list of {size}")]
    TooFewPairs { found: usize, size: usize },
    #[error("invalid parameter: {0}")]
    Parameter(String),
}

/// Lowercase ASCII letters only.
pub fn is_eligible_lemma(word: &str) -> bool {
    !word.is_empty() && word.bytes().all(|b| b.is_ascii_lowercase())
}

/// Penn tag standing for a WordNet part of speech.
pub fn penn_tag(pos: Pos) -> &'static str {
    match pos {
        Pos::Noun => "NN",
        Pos::Verb => "VB",
        Pos::Adj => "JJ",
        Pos::Adv => "RB",
    }
}

/// A defined word with its definition, parse and extracted pair.
#[derive(Debug, Clone, PartialEq)]
pub struct WordRecord {
    pub word: String,
    pub pos: Pos,
    pub synset: SynsetId,
    pub definition: String,
    pub parse: ParseTree,
    pub pair: DefPair,
}

impl WordRecord {
    pub fn key(&self) -> (&str, Pos) {
        (&self.word, self.pos)
    }

    /// Whether `table` knows the head word, trying lowercase second.
    pub fn head_in(&self, table: &EmbeddingTable) -> bool {
        lookup_folded(table, &self.pair.w_h).is_some()
    }

    fn fields(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            self.word,
            self.pos,
            self.synset,
            self.definition.replace(['\t', '\n'], " "),
            self.parse,
            self.pair.w_h,
            self.pair.pos_h,
            self.pair.w_m.as_deref().unwrap_or("-"),
            self.pair.pos_m.as_deref().unwrap_or("-"),
        )
    }

    fn from_fields(f: &[&str], rules: &HeadRuleTable) -> Result<Self, String> {
        let [word, pos, synset, definition, parse, w_h, pos_h, w_m, pos_m] = f[..] else {
            return Err(format!("expected 9 record fields, found {}", f.len()));
        };
        let parse = parse_ptb(parse).map_err(|e| e.to_string())?;
        let pair = DefPair::new(w_h, pos_h, (w_m != "-").then_some((w_m, pos_m)));
        let again = extract_pair(&parse, rules).map_err(|e| e.to_string())?;
        if again != pair {
            return Err(format!("stored pair {pair:?} differs from the parse's {again:?}"));
        }
        Ok(WordRecord {
            word: word.to_owned(),
            pos: pos.parse()?,
            synset: synset.parse()?,
            definition: definition.to_owned(),
            parse,
            pair,
        })
    }
}

/// Checks corpus records against WordNet and extracts their pairs.
/// Records whose synset is missing or does not list the word are
/// rejected, as are trees without leaves.
pub fn ingest(
    corpus: &[DefRecord],
    g: &WordNetGraph,
    rules: &HeadRuleTable,
) -> (Vec<WordRecord>, Vec<Reject>) {
    let mut records = Vec::new();
    let mut rejects = Vec::new();
    for (i, r) in corpus.iter().enumerate() {
        let reject = |reason: String| Reject { line: i + 1, reason };
        let Some(s) = g.synset(&r.synset) else {
            rejects.push(reject(format!("synset {} not in WordNet", r.synset)));
            continue;
        };
        if !s.lemmas.iter().any(|l| l.eq_ignore_ascii_case(&r.word)) {
            rejects.push(reject(format!("{:?} is not a lemma of {}", r.word, r.synset)));
            continue;
        }
        match extract_pair(&r.parse, rules) {
            Ok(pair) => records.push(WordRecord {
                word: r.word.clone(),
                pos: r.pos,
                synset: r.synset,
                definition: r.definition.clone(),
                parse: r.parse.clone(),
                pair,
            }),
            Err(e) => rejects.push(reject(e.to_string())),
        }
    }
    (records, rejects)
}

/// Eligible WordNet lemmas split by membership in `table`, each sorted.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LexiconSplit {
    pub iv: Vec<(String, Pos)>,
    pub oov: Vec<(String, Pos)>,
}

impl LexiconSplit {
    pub fn is_iv(&self, word: &str, pos: Pos) -> bool {
        self.iv
            .binary_search_by(|(w, p)| (w.as_str(), *p).cmp(&(word, pos)))
            .is_ok()
    }

    pub fn is_oov(&self, word: &str, pos: Pos) -> bool {
        self.oov
            .binary_search_by(|(w, p)| (w.as_str(), *p).cmp(&(word, pos)))
            .is_ok()
    }
}

/// Partitions single-token lemmas by whether `table` has them. With
/// `require_example`, only lemmas whose first sense has a usage example
/// are kept.
pub fn split_iv_oov(g: &WordNetGraph, table: &EmbeddingTable, require_example: bool) -> LexiconSplit {
    let mut split = LexiconSplit::default();
    for (lemma, pos) in g.lemmas() {
        if !is_eligible_lemma(lemma) {
            continue;
        }
        if require_example {
            let has = g
                .first_synset(lemma, pos)
                .ok()
                .and_then(|id| g.synset(&id))
                .is_some_and(|s| !s.examples.is_empty());
            if !has {
                continue;
            }
        }
        let side = if table.contains(lemma) {
            &mut split.iv
        } else {
            &mut split.oov
        };
        side.push((lemma.to_owned(), pos));
    }
    split
}

/// Records usable for training and direct evaluation: the defined word is
/// eligible and in `table`, and so is its head word.
pub fn direct_candidates(records: &[WordRecord], table: &EmbeddingTable) -> Vec<WordRecord> {
    records
        .iter()
        .filter(|r| is_eligible_lemma(&r.word) && table.contains(&r.word) && r.head_in(table))
        .cloned()
        .collect()
}

/// Seeded split at the word level: every record of a word lands on the
/// same side. The train side gets `round(ratio * words)` words.
pub fn build_direct_sets(
    records: &[WordRecord],
    ratio: f64,
    seed: u64,
) -> Result<(Vec<WordRecord>, Vec<WordRecord>), DatasetError> {
    if !(0.0..=1.0).contains(&ratio) {
        return Err(DatasetError::Parameter(format!("split ratio {ratio}")));
    }
    let words: BTreeSet<&str> = records.iter().map(|r| r.word.as_str()).collect();
    if words.is_empty() {
        return Err(DatasetError::Empty("definitions"));
    }
    let mut words: Vec<&str> = words.into_iter().collect();
    words.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let n_train = (ratio * words.len() as f64).round() as usize;
    let train_words: BTreeSet<&str> = words[..n_train].iter().copied().collect();
    let (train, test) = records
        .iter()
        .cloned()
        .partition(|r| train_words.contains(r.word.as_str()));
    Ok((train, test))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Relation {
    Sister,
    Random,
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Relation::Sister => "sister",
            Relation::Random => "random",
        })
    }
}

impl FromStr for Relation {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "sister" => Ok(Relation::Sister),
            "random" => Ok(Relation::Random),
            other => Err(format!("unknown relation {other:?}")),
        }
    }
}

/// An OOV word `w1` paired with an in-vocabulary word `w2`.
#[derive(Debug, Clone, PartialEq)]
pub struct WordPair {
    pub w1: WordRecord,
    pub w2: String,
    pub relation: Relation,
    /// Indexed like [`Measure::ALL`].
    pub sims: [f64; 3],
}

impl WordPair {
    pub fn sim(&self, measure: Measure) -> f64 {
        self.sims[measure as usize]
    }

    fn fields(&self) -> String {
        format!(
            "{}\t{}\t{}\t{}\t{}\t{}",
            self.w1.fields(),
            self.w2,
            self.relation,
            self.sims[0],
            self.sims[1],
            self.sims[2]
        )
    }

    fn from_fields(f: &[&str], rules: &HeadRuleTable) -> Result<Self, String> {
        if f.len() != 14 {
            return Err(format!("expected 14 pair fields, found {}", f.len()));
        }
        let w1 = WordRecord::from_fields(&f[..9], rules)?;
        let mut sims = [0.0; 3];
        for (s, text) in sims.iter_mut().zip(&f[11..]) {
            *s = text.parse().map_err(|_| format!("bad similarity {text:?}"))?;
        }
        Ok(WordPair {
            w1,
            w2: f[9].to_owned(),
            relation: f[10].parse()?,
            sims,
        })
    }
}

/// IV lemmas of the sister synsets of `w1`'s first sense.
pub fn iv_sisters(
    g: &WordNetGraph,
    split: &LexiconSplit,
    w1: &str,
    pos: Pos,
) -> Result<Vec<String>, WordNetError> {
    let id = g.first_synset(w1, pos)?;
    let mut out = BTreeSet::new();
    for s in g.sister_synsets(&id)? {
        for lemma in &g.synset(&s).expect("sister exists").lemmas {
            if lemma != w1 && split.is_iv(lemma, pos) {
                out.insert(lemma.clone());
            }
        }
    }
    Ok(out.into_iter().collect())
}

/// Pairs OOV words with a sister word or a random word, alternating so the
/// two relations stay balanced. Each OOV record is used at most once, in
/// seeded order. With `count = None`, as many balanced pairs as possible
/// are built. Words without an IV sister are skipped when a sister is
/// due, as are pairs WordNet cannot compare.
pub fn build_pairs(
    oov: &[WordRecord],
    split: &LexiconSplit,
    g: &WordNetGraph,
    ic: &IcTable,
    count: Option<usize>,
    seed: u64,
) -> Result<Vec<WordPair>, DatasetError> {
    if oov.is_empty() {
        return Err(DatasetError::Empty("OOV words"));
    }
    let mut by_pos: HashMap<Pos, Vec<&str>> = HashMap::new();
    for (w, p) in &split.iv {
        by_pos.entry(*p).or_default().push(w);
    }
    if by_pos.is_empty() {
        return Err(DatasetError::Empty("IV words"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<&WordRecord> = oov.iter().collect();
    order.shuffle(&mut rng);
    let mut pairs: Vec<WordPair> = Vec::new();
    let (mut sisters, mut randoms) = (0usize, 0usize);
    let mut skipped = 0usize;
    for rec in order {
        if count.is_some_and(|c| pairs.len() >= c) {
            break;
        }
        let relation = if sisters <= randoms {
            Relation::Sister
        } else {
            Relation::Random
        };
        let w2 = match relation {
            Relation::Sister => {
                let options = iv_sisters(g, split, &rec.word, rec.pos).unwrap_or_default();
                options.choose(&mut rng).cloned()
            }
            Relation::Random => by_pos
                .get(&rec.pos)
                .and_then(|ws| ws.choose(&mut rng))
                .filter(|w| **w != rec.word)
                .map(|w| w.to_string()),
        };
        let Some(w2) = w2 else {
            log::debug!("no {relation} partner for {}", rec.word);
            skipped += 1;
            continue;
        };
        let sims = match g.word_similarities(ic, &rec.word, &w2, rec.pos) {
            Ok(s) => s,
            Err(e) => {
                log::debug!("{} / {w2}: {e}", rec.word);
                skipped += 1;
                continue;
            }
        };
        match relation {
            Relation::Sister => sisters += 1,
            Relation::Random => randoms += 1,
        }
        pairs.push(WordPair {
            w1: rec.clone(),
            w2,
            relation,
            sims,
        });
    }
    if skipped > 0 {
        log::info!("{skipped} OOV words skipped while building pairs");
    }
    match count {
        Some(c) if pairs.len() < c => Err(DatasetError::NotEnough {
            wanted: c,
            made: pairs.len(),
        }),
        _ => Ok(pairs),
    }
}

/// Pairs whose values under one measure are pairwise at least `delta`
/// apart.
#[derive(Debug, Clone, PartialEq)]
pub struct PairList {
    pub measure: Measure,
    pub pairs: Vec<WordPair>,
}

impl PairList {
    pub fn values(&self) -> Vec<f64> {
        self.pairs.iter().map(|p| p.sim(self.measure)).collect()
    }
}

/// Separation used when none is given.
pub fn default_delta(measure: Measure) -> f64 {
    match measure {
        Measure::Path | Measure::Wup => 0.02,
        Measure::Res => 0.1,
    }
}

/// Greedy seeded assembly: pairs are visited in shuffled order and each
/// joins the first open list it is separated from, or opens a new one.
/// Lists that never fill are dissolved; their pairs are returned as
/// leftovers (indices into `pairs`, sorted).
pub fn build_lists(
    pairs: &[WordPair],
    measure: Measure,
    list_size: usize,
    delta: f64,
    seed: u64,
) -> Result<(Vec<PairList>, Vec<usize>), DatasetError> {
    if list_size < 2 {
        return Err(DatasetError::Parameter(format!("list size {list_size}")));
    }
    if delta.is_nan() || delta < 0.0 {
        return Err(DatasetError::Parameter(format!("separation {delta}")));
    }
    if pairs.len() < list_size {
        return Err(DatasetError::TooFewPairs {
            found: pairs.len(),
            size: list_size,
        });
    }
    let mut order: Vec<usize> = (0..pairs.len()).collect();
    order.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    let mut open: Vec<Vec<usize>> = Vec::new();
    let mut done: Vec<Vec<usize>> = Vec::new();
    for i in order {
        let v = pairs[i].sim(measure);
        let slot = open.iter().position(|list| {
            list.iter()
                .all(|&j| (pairs[j].sim(measure) - v).abs() >= delta && pairs[j].sim(measure) != v)
        });
        match slot {
            Some(k) => {
                open[k].push(i);
                if open[k].len() == list_size {
                    done.push(open.remove(k));
                }
            }
            None => open.push(vec![i]),
        }
    }
    let mut leftovers: Vec<usize> = open.into_iter().flatten().collect();
    leftovers.sort_unstable();
    if !leftovers.is_empty() {
        log::info!("{} pairs left out of {measure} lists", leftovers.len());
    }
    let lists = done
        .into_iter()
        .map(|idx| PairList {
            measure,
            pairs: idx.into_iter().map(|i| pairs[i].clone()).collect(),
        })
        .collect();
    Ok((lists, leftovers))
}

/// Metadata at the top of every dataset file.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Header {
    pub kind: String,
    pub version: u32,
    pub seed: u64,
    pub table: String,
    /// Further `key: value` lines, written in key order.
    pub extra: BTreeMap<String, String>,
}

impl Header {
    pub fn new(kind: &str, seed: u64, table: &str) -> Self {
        Header {
            kind: kind.to_owned(),
            version: FORMAT_VERSION,
            seed,
            table: table.to_owned(),
            extra: BTreeMap::new(),
        }
    }

    pub fn write<W: Write>(&self, w: &mut W) -> io::Result<()> {
        writeln!(w, "# definnet {} v{}", self.kind, self.version)?;
        writeln!(w, "# seed: {}", self.seed)?;
        writeln!(w, "# table: {}", self.table)?;
        for (k, v) in &self.extra {
            writeln!(w, "# {k}: {v}")?;
        }
        Ok(())
    }
}

const RECORD_COLUMNS: &str = "# word\tpos\tsynset\tdefinition\tparse\tw_h\tpos_h\tw_m\tpos_m";
const PAIR_COLUMNS: &str = "w2\trelation\tpath\twup\tres";

fn format_err(line: usize, message: impl Into<String>) -> DatasetError {
    DatasetError::Format {
        line,
        message: message.into(),
    }
}

/// Reads the header and returns it with the remaining data lines and their
/// 1-based line numbers.
fn read_file<R: BufRead>(reader: R, kind: &str) -> Result<(Header, Vec<(usize, String)>), DatasetError> {
    let mut lines = reader.lines().enumerate();
    let first = lines.next().ok_or_else(|| format_err(1, "empty file"))?.1?;
    let rest = first
        .strip_prefix("# definnet ")
        .ok_or_else(|| format_err(1, "missing header"))?;
    let (found, version) = rest
        .rsplit_once(" v")
        .ok_or_else(|| format_err(1, "missing version"))?;
    if found != kind {
        return Err(format_err(1, format!("expected a {kind} file, found {found}")));
    }
    let version: u32 = version.parse().map_err(|_| format_err(1, "bad version"))?;
    if version != FORMAT_VERSION {
        return Err(format_err(1, format!("unsupported version {version}")));
    }
    let mut header = Header {
        kind: kind.to_owned(),
        version,
        ..Header::default()
    };
    let mut data = Vec::new();
    for (i, line) in lines {
        let line = line?;
        let n = i + 1;
        if let Some(comment) = line.strip_prefix("# ") {
            if let Some((k, v)) = comment.split_once(": ") {
                match k {
                    "seed" => header.seed = v.parse().map_err(|_| format_err(n, "bad seed"))?,
                    "table" => header.table = v.to_owned(),
                    _ => {
                        header.extra.insert(k.to_owned(), v.to_owned());
                    }
                }
            }
            continue;
        }
        if line.starts_with('#') || line.is_empty() {
            continue;
        }
        data.push((n, line));
    }
    Ok((header, data))
}

pub fn write_records<W: Write>(w: &mut W, header: &Header, records: &[WordRecord]) -> io::Result<()> {
    header.write(w)?;
    writeln!(w, "{RECORD_COLUMNS}")?;
    for r in records {
        writeln!(w, "{}", r.fields())?;
    }
    Ok(())
}

pub fn read_records<R: BufRead>(
    reader: R,
    kind: &str,
    rules: &HeadRuleTable,
) -> Result<(Header, Vec<WordRecord>), DatasetError> {
    let (header, lines) = read_file(reader, kind)?;
    let records = lines
        .iter()
        .map(|(n, l)| {
            let f: Vec<&str> = l.split('\t').collect();
            WordRecord::from_fields(&f, rules).map_err(|m| format_err(*n, m))
        })
        .collect::<Result<_, _>>()?;
    Ok((header, records))
}

pub fn write_pairs<W: Write>(w: &mut W, header: &Header, pairs: &[WordPair]) -> io::Result<()> {
    header.write(w)?;
    writeln!(w, "{RECORD_COLUMNS}\t{PAIR_COLUMNS}")?;
    for p in pairs {
        writeln!(w, "{}", p.fields())?;
    }
    Ok(())
}

pub fn read_pairs<R: BufRead>(
    reader: R,
    rules: &HeadRuleTable,
) -> Result<(Header, Vec<WordPair>), DatasetError> {
    let (header, lines) = read_file(reader, "pairs")?;
    let pairs = lines
        .iter()
        .map(|(n, l)| {
            let f: Vec<&str> = l.split('\t').collect();
            WordPair::from_fields(&f, rules).map_err(|m| format_err(*n, m))
        })
        .collect::<Result<_, _>>()?;
    Ok((header, pairs))
}

/// One row per pair, prefixed by its list number and the measure.
pub fn write_lists<W: Write>(w: &mut W, header: &Header, lists: &[PairList]) -> io::Result<()> {
    header.write(w)?;
    writeln!(w, "# list\tmeasure\t{}\t{PAIR_COLUMNS}", &RECORD_COLUMNS[2..])?;
    for (i, list) in lists.iter().enumerate() {
        for p in &list.pairs {
            writeln!(w, "{i}\t{}\t{}", list.measure, p.fields())?;
        }
    }
    Ok(())
}

pub fn read_lists<R: BufRead>(
    reader: R,
    rules: &HeadRuleTable,
) -> Result<(Header, Vec<PairList>), DatasetError> {
    let (header, lines) = read_file(reader, "lists")?;
    let mut lists: Vec<PairList> = Vec::new();
    for (n, l) in &lines {
        let f: Vec<&str> = l.split('\t').collect();
        if f.len() < 2 {
            return Err(format_err(*n, "missing list columns"));
        }
        let id: usize = f[0].parse().map_err(|_| format_err(*n, "bad list number"))?;
        let measure: Measure = f[1].parse().map_err(|m: String| format_err(*n, m))?;
        let pair = WordPair::from_fields(&f[2..], rules).map_err(|m| format_err(*n, m))?;
        if id == lists.len() {
            lists.push(PairList {
                measure,
                pairs: Vec::new(),
            });
        } else if id + 1 != lists.len() {
            return Err(format_err(*n, format!("list {id} out of order")));
        }
        let list = lists.last_mut().expect("pushed above");
        if list.measure != measure {
            return Err(format_err(*n, "measure changes inside a list"));
        }
        list.pairs.push(pair);
    }
    Ok((header, lists))
}
