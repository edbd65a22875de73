//! Bracketed constituency trees of definitions, semantic head finding,
//! and extraction of the super-type and modifier words.

use std::collections::HashMap;
use std::fmt;
use std::fs::File;
use std::io::{self, BufRead, BufReader, Write};
use std::path::Path;

use thiserror::Error;

use crate::wordnet::{Pos, SynsetId};

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseError {
    #[error("empty input")]
    Empty,
    #[error("unbalanced brackets at byte {0}")]
    Unbalanced(usize),
    #[error("stray input after the root at byte {0}")]
    Stray(usize),
    #[error("malformed tree at byte {position}: {message}")]
    Malformed { position: usize, message: String },
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ParseTree {
    pub label: String,
    pub children: Vec<ParseTree>,
    pub token: Option<String>,
}

const ESCAPES: [(&str, &str); 6] = [
    ("-LRB-", "("),
    ("-RRB-", ")"),
    ("-LSB-", "["),
    ("-RSB-", "]"),
    ("-LCB-", "{"),
    ("-RCB-", "}"),
];

fn decode(token: &str) -> String {
    ESCAPES
        .iter()
        .find(|(e, _)| *e == token)
        .map_or_else(|| token.to_owned(), |(_, raw)| (*raw).to_owned())
}

fn encode(token: &str) -> &str {
    ESCAPES
        .iter()
        .find(|(_, raw)| *raw == token)
        .map_or(token, |(e, _)| e)
}

impl ParseTree {
    pub fn leaf(tag: impl Into<String>, token: impl Into<String>) -> Self {
        ParseTree {
            label: tag.into(),
            children: Vec::new(),
            token: Some(token.into()),
        }
    }

    pub fn node(label: impl Into<String>, children: Vec<ParseTree>) -> Self {
        ParseTree {
            label: label.into(),
            children,
            token: None,
        }
    }

    pub fn is_leaf(&self) -> bool {
        self.token.is_some()
    }

    /// Label with function tags and indices removed: `NP-SBJ-1` is `NP`.
    pub fn base_label(&self) -> &str {
        base_label(&self.label)
    }

    /// (token, tag) of every leaf, left to right.
    pub fn leaves(&self) -> Vec<(&str, &str)> {
        let mut out = Vec::new();
        self.collect_leaves(&mut out);
        out
    }

    fn collect_leaves<'a>(&'a self, out: &mut Vec<(&'a str, &'a str)>) {
        match &self.token {
            Some(t) => out.push((t.as_str(), self.label.as_str())),
            None => self.children.iter().for_each(|c| c.collect_leaves(out)),
        }
    }

    /// Single-line bracketed form with bracket tokens escaped.
    pub fn serialize(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ParseTree {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.token {
            Some(t) => write!(f, "({} {})", self.label, encode(t)),
            None => {
                write!(f, "({}", self.label)?;
                for c in &self.children {
                    write!(f, " {c}")?;
                }
                write!(f, ")")
            }
        }
    }
}

fn base_label(label: &str) -> &str {
    if label.starts_with('-') {
        return label;
    }
    let end = label.find(['-', '=']).unwrap_or(label.len());
    &label[..end]
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum Tok<'a> {
    Open,
    Close,
    Atom(&'a str),
}

fn tokenize(text: &str) -> Vec<(usize, Tok<'_>)> {
    let mut out = Vec::new();
    let mut start: Option<usize> = None;
    for (i, c) in text.char_indices() {
        if c == '(' || c == ')' || c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s, Tok::Atom(&text[s..i])));
            }
            match c {
                '(' => out.push((i, Tok::Open)),
                ')' => out.push((i, Tok::Close)),
                _ => {}
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s, Tok::Atom(&text[s..])));
    }
    out
}

/// Parses one bracketed tree such as `(NP (DT a) (NN feeling))`.
pub fn parse_ptb(text: &str) -> Result<ParseTree, ParseError> {
    let toks = tokenize(text);
    if toks.is_empty() {
        return Err(ParseError::Empty);
    }
    let mut pos = 0;
    let tree = parse_node(&toks, &mut pos, text.len())?;
    if let Some(&(at, tok)) = toks.get(pos) {
        return Err(match tok {
            Tok::Close => ParseError::Unbalanced(at),
            _ => ParseError::Stray(at),
        });
    }
    Ok(tree)
}

fn parse_node(toks: &[(usize, Tok)], pos: &mut usize, end: usize) -> Result<ParseTree, ParseError> {
    let next = |pos: &usize| toks.get(*pos).copied();
    match next(pos) {
        Some((_, Tok::Open)) => *pos += 1,
        Some((at, Tok::Close)) => return Err(ParseError::Unbalanced(at)),
        Some((at, Tok::Atom(_))) => {
            return Err(ParseError::Malformed {
                position: at,
                message: "expected '('".into(),
            })
        }
        None => return Err(ParseError::Unbalanced(end)),
    }
    let open_at = toks[*pos - 1].0;
    let label = match next(pos) {
        Some((_, Tok::Atom(a))) => {
            *pos += 1;
            a.to_owned()
        }
        _ => String::new(),
    };
    let mut children = Vec::new();
    let mut token: Option<String> = None;
    loop {
        match next(pos) {
            None => return Err(ParseError::Unbalanced(end)),
            Some((_, Tok::Close)) => {
                *pos += 1;
                break;
            }
            Some((at, Tok::Atom(a))) => {
                if token.is_some() || !children.is_empty() {
                    return Err(ParseError::Malformed {
                        position: at,
                        message: format!("unexpected token {a:?}"),
                    });
                }
                token = Some(decode(a));
                *pos += 1;
            }
            Some((at, Tok::Open)) => {
                if token.is_some() {
                    return Err(ParseError::Malformed {
                        position: at,
                        message: "leaf with children".into(),
                    });
                }
                children.push(parse_node(toks, pos, end)?);
            }
        }
    }
    if token.is_none() && children.is_empty() {
        return Err(ParseError::Malformed {
            position: open_at,
            message: format!("empty constituent {label:?}"),
        });
    }
    if token.is_some() && label.is_empty() {
        return Err(ParseError::Malformed {
            position: open_at,
            message: "leaf without a tag".into(),
        });
    }
    Ok(ParseTree {
        label,
        children,
        token,
    })
}

const PUNCT: [&str; 12] = [
    ",", ".", ":", "``", "''", "-LRB-", "-RRB-", "-NONE-", "HYPH", "NFP", "#", "\"",
];

pub fn is_punct(tag: &str) -> bool {
    PUNCT.contains(&tag)
}

/// Tags whose words carry lexical content.
pub fn is_content_tag(tag: &str) -> bool {
    ["NN", "VB", "JJ", "RB"].iter().any(|p| tag.starts_with(p)) || tag == "CD" || tag == "FW"
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Direction {
    LeftToRight,
    RightToLeft,
}

/// One search over the children. Label-major passes try each label in
/// priority order against all children; child-major passes walk the
/// children and take the first whose label is in the set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Pass {
    pub direction: Direction,
    pub labels: Vec<String>,
    pub child_major: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadRule {
    pub passes: Vec<Pass>,
    /// Side to take when no pass matches.
    pub fallback: Direction,
}

impl HeadRule {
    fn simple(direction: Direction, labels: &[&str]) -> Self {
        HeadRule {
            passes: vec![Pass {
                direction,
                labels: labels.iter().map(|s| (*s).to_owned()).collect(),
                child_major: false,
            }],
            fallback: direction,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HeadRuleTable {
    pub rules: HashMap<String, HeadRule>,
    pub default: HeadRule,
    /// Words whose verb heads yield to a following VP complement.
    pub auxiliaries: Vec<String>,
    /// Forms of "be": never contentful, and yield to a predicate.
    pub copulas: Vec<String>,
    /// Head words treated as empty pronouns by [`extract_pair`].
    pub pronouns: Vec<String>,
}

const AUXILIARIES: [&str; 27] = [
    "be", "is", "are", "was", "were", "am", "been", "being", "'s", "'re", "'m", "have", "has", "had",
    "having", "do", "does", "did", "done", "doing", "get", "gets", "got", "gotten", "getting", "become",
    "to",
];

const COPULAS: [&str; 11] = [
    "be", "is", "are", "was", "were", "am", "been", "being", "'s", "'re", "'m",
];

const PRONOUNS: [&str; 14] = [
    "someone",
    "somebody",
    "something",
    "one",
    "anyone",
    "anybody",
    "anything",
    "everyone",
    "everybody",
    "everything",
    "those",
    "that",
    "who",
    "whoever",
];

impl HeadRuleTable {
    /// The Collins head table with semantic modifications: prepositional
    /// phrases resolve to their complement, clauses to their verb phrase,
    /// auxiliaries to the verb phrase they govern.
    pub fn semantic() -> Self {
        use Direction::{LeftToRight as L, RightToLeft as R};
        let mut rules = HashMap::new();
        let mut add = |label: &str, rule: HeadRule| {
            rules.insert(label.to_owned(), rule);
        };
        add(
            "ADJP",
            HeadRule::simple(
                L,
                &[
                    "NNS", "QP", "NN", "$", "ADVP", "JJ", "VBN", "VBG", "ADJP", "JJR", "NP", "JJS", "DT",
                    "FW", "RBR", "RBS", "SBAR", "RB",
                ],
            ),
        );
        add(
            "ADVP",
            HeadRule::simple(
                R,
                &[
                    "RB", "RBR", "RBS", "FW", "ADVP", "TO", "CD", "JJR", "JJ", "IN", "NP", "JJS", "NN",
                ],
            ),
        );
        add("CONJP", HeadRule::simple(R, &["CC", "RB", "IN"]));
        add("FRAG", HeadRule::simple(R, &[]));
        add("INTJ", HeadRule::simple(L, &[]));
        add("LST", HeadRule::simple(R, &["LS", ":"]));
        add(
            "NAC",
            HeadRule::simple(
                L,
                &[
                    "NN", "NNS", "NNP", "NNPS", "NP", "NAC", "EX", "$", "CD", "QP", "PRP", "VBG", "JJ",
                    "JJS", "JJR", "ADJP", "FW",
                ],
            ),
        );
        add(
            "PP",
            HeadRule {
                passes: vec![
                    Pass {
                        direction: L,
                        labels: [
                            "NP", "S", "SBAR", "VP", "SQ", "WHNP", "ADJP", "ADVP", "PP", "NN", "NNS", "CD",
                        ]
                        .map(String::from)
                        .to_vec(),
                        child_major: false,
                    },
                    Pass {
                        direction: L,
                        labels: ["IN", "TO", "VBG", "VBN", "RP", "FW"].map(String::from).to_vec(),
                        child_major: false,
                    },
                ],
                fallback: R,
            },
        );
        add("PRN", HeadRule::simple(L, &[]));
        add("PRT", HeadRule::simple(R, &["RP"]));
        add(
            "QP",
            HeadRule::simple(
                L,
                &[
                    "$", "IN", "NNS", "NN", "JJ", "RB", "DT", "CD", "NCD", "QP", "JJR", "JJS",
                ],
            ),
        );
        add("RRC", HeadRule::simple(R, &["VP", "NP", "ADVP", "ADJP", "PP"]));
        add(
            "S",
            HeadRule::simple(L, &["VP", "S", "SBAR", "ADJP", "UCP", "NP", "TO", "IN"]),
        );
        add(
            "SBAR",
            HeadRule::simple(
                L,
                &[
                    "S", "SQ", "SINV", "SBAR", "FRAG", "WHNP", "WHPP", "WHADVP", "WHADJP", "IN", "DT",
                ],
            ),
        );
        add(
            "SBARQ",
            HeadRule::simple(L, &["SQ", "S", "SINV", "SBARQ", "FRAG"]),
        );
        add(
            "SINV",
            HeadRule::simple(
                L,
                &["VBZ", "VBD", "VBP", "VB", "MD", "VP", "S", "SINV", "ADJP", "NP"],
            ),
        );
        add(
            "SQ",
            HeadRule::simple(L, &["VBZ", "VBD", "VBP", "VB", "MD", "VP", "SQ"]),
        );
        add("UCP", HeadRule::simple(R, &[]));
        add(
            "VP",
            HeadRule::simple(
                L,
                &[
                    "TO", "VBD", "VBN", "MD", "VBZ", "VB", "VBG", "VBP", "VP", "ADJP", "NN", "NNS", "NP",
                ],
            ),
        );
        add("WHADJP", HeadRule::simple(L, &["CC", "WRB", "JJ", "ADJP"]));
        add("WHADVP", HeadRule::simple(R, &["CC", "WRB"]));
        add(
            "WHNP",
            HeadRule::simple(L, &["WDT", "WP", "WP$", "WHADJP", "WHPP", "WHNP"]),
        );
        add("WHPP", HeadRule::simple(R, &["IN", "TO", "FW"]));
        add("X", HeadRule::simple(R, &[]));
        add("NX", HeadRule::simple(L, &[]));
        add(
            "ROOT",
            HeadRule::simple(L, &["S", "SQ", "SINV", "SBARQ", "FRAG", "NP", "VP"]),
        );
        let cm = |direction, labels: &[&str]| Pass {
            direction,
            labels: labels.iter().map(|s| (*s).to_owned()).collect(),
            child_major: true,
        };
        add(
            "NP",
            HeadRule {
                passes: vec![
                    cm(R, &["NN", "NNP", "NNPS", "NNS", "NX", "POS", "JJR"]),
                    cm(L, &["NP"]),
                    cm(R, &["$", "ADJP", "PRN"]),
                    cm(R, &["CD"]),
                    cm(R, &["JJ", "JJS", "RB", "QP"]),
                ],
                fallback: R,
            },
        );
        HeadRuleTable {
            rules,
            default: HeadRule::simple(L, &[]),
            auxiliaries: AUXILIARIES.map(String::from).to_vec(),
            copulas: COPULAS.map(String::from).to_vec(),
            pronouns: PRONOUNS.map(String::from).to_vec(),
        }
    }

    pub fn rule(&self, label: &str) -> &HeadRule {
        self.rules.get(base_label(label)).unwrap_or(&self.default)
    }

    /// Index of the head child of an internal node.
    pub fn head_child(&self, t: &ParseTree) -> usize {
        let visible: Vec<usize> = (0..t.children.len())
            .filter(|&i| !is_punct(&t.children[i].label))
            .collect();
        if visible.is_empty() {
            return t.children.len() - 1;
        }
        let label_of = |i: usize| t.children[i].base_label();
        let rule = self.rule(&t.label);
        let mut head = None;
        'passes: for pass in &rule.passes {
            let order: Vec<usize> = match pass.direction {
                Direction::LeftToRight => visible.clone(),
                Direction::RightToLeft => visible.iter().rev().copied().collect(),
            };
            if pass.child_major {
                if let Some(&i) = order
                    .iter()
                    .find(|&&i| pass.labels.iter().any(|l| l == label_of(i)))
                {
                    head = Some(i);
                    break 'passes;
                }
            } else {
                for l in &pass.labels {
                    if let Some(&i) = order.iter().find(|&&i| label_of(i) == l) {
                        head = Some(i);
                        break 'passes;
                    }
                }
            }
        }
        let head = head.unwrap_or(match rule.fallback {
            Direction::LeftToRight => visible[0],
            Direction::RightToLeft => visible[visible.len() - 1],
        });
        if t.base_label() == "VP" {
            let after = |labels: &[&str]| {
                labels.iter().find_map(|l| {
                    visible
                        .iter()
                        .copied()
                        .find(|&i| i > head && t.children[i].base_label() == *l)
                })
            };
            let h = &t.children[head];
            if self.is_auxiliary(h) {
                if let Some(vp) = after(&["VP"]) {
                    return vp;
                }
            }
            if self.is_copula(h) {
                if let Some(pred) = after(&["VP", "ADJP", "NP", "UCP", "PP"]) {
                    return pred;
                }
            }
        }
        head
    }

    fn is_copula(&self, leaf: &ParseTree) -> bool {
        match &leaf.token {
            Some(tok) => {
                leaf.label.starts_with("VB") && self.copulas.iter().any(|c| c.eq_ignore_ascii_case(tok))
            }
            None => false,
        }
    }

    /// Whether a constituent's semantic head is a content word.
    pub fn is_contentful(&self, t: &ParseTree) -> bool {
        if is_punct(&t.label) {
            return false;
        }
        let h = semantic_head(t, self);
        is_content_tag(h.tag)
            && !(h.tag.starts_with("VB") && self.copulas.iter().any(|c| c.eq_ignore_ascii_case(h.token)))
    }

    fn is_auxiliary(&self, child: &ParseTree) -> bool {
        match &child.token {
            Some(tok) => {
                matches!(child.label.as_str(), "TO" | "MD")
                    || (child.label.starts_with("VB")
                        && self.auxiliaries.iter().any(|a| a.eq_ignore_ascii_case(tok)))
            }
            None => false,
        }
    }

    fn is_pronoun(&self, word: &str) -> bool {
        self.pronouns.iter().any(|p| p.eq_ignore_ascii_case(word))
    }
}

impl Default for HeadRuleTable {
    fn default() -> Self {
        Self::semantic()
    }
}

/// A leaf of the tree: the word and its POS tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Head<'a> {
    pub token: &'a str,
    pub tag: &'a str,
}

pub fn semantic_head<'a>(t: &'a ParseTree, rules: &HeadRuleTable) -> Head<'a> {
    let mut node = t;
    loop {
        if let Some(tok) = &node.token {
            return Head {
                token: tok,
                tag: &node.label,
            };
        }
        node = &node.children[rules.head_child(node)];
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct DefPair {
    pub w_h: String,
    pub pos_h: String,
    pub w_m: Option<String>,
    pub pos_m: Option<String>,
}

impl DefPair {
    pub fn new(w_h: &str, pos_h: &str, modifier: Option<(&str, &str)>) -> Self {
        DefPair {
            w_h: w_h.to_owned(),
            pos_h: pos_h.to_owned(),
            w_m: modifier.map(|m| m.0.to_owned()),
            pos_m: modifier.map(|m| m.1.to_owned()),
        }
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ExtractError {
    #[error("tree has no leaves")]
    Empty,
}

fn phrase_rank(label: &str) -> u8 {
    match label {
        "PP" => 0,
        "SBAR" => 1,
        "NP" => 2,
        "ADJP" => 3,
        "VP" => 4,
        "S" => 5,
        _ => 6,
    }
}

fn main_constituent<'a>(t: &'a ParseTree, rules: &HeadRuleTable) -> Option<(&'a ParseTree, Vec<usize>)> {
    if t.is_leaf() {
        return None;
    }
    let contentful: Vec<usize> = t
        .children
        .iter()
        .enumerate()
        .filter(|(_, c)| rules.is_contentful(c))
        .map(|(i, _)| i)
        .collect();
    if contentful.len() >= 2 {
        return Some((t, contentful));
    }
    t.children.iter().find_map(|c| main_constituent(c, rules))
}

/// Finds the first constituent, in pre-order, with at least two children
/// whose heads are content words. Its head child gives `w_h`; the best
/// ranked contentful sibling gives `w_m`.
pub fn extract_pair(t: &ParseTree, rules: &HeadRuleTable) -> Result<DefPair, ExtractError> {
    if t.leaves().is_empty() {
        return Err(ExtractError::Empty);
    }
    let Some((node, contentful)) = main_constituent(t, rules) else {
        let h = semantic_head(t, rules);
        return Ok(DefPair::new(h.token, h.tag, None));
    };
    let head = rules.head_child(node);
    let h = semantic_head(&node.children[head], rules);
    let siblings = contentful.iter().copied().filter(|&i| i != head);
    let pick = if node.children[head].base_label() == "NP" && rules.is_pronoun(h.token) {
        siblings
            .clone()
            .filter(|&i| node.children[i].base_label() == "SBAR")
            .min_by_key(|&i| i.abs_diff(head))
    } else {
        None
    };
    let pick = pick.or_else(|| {
        siblings.min_by_key(|&i| {
            let c = &node.children[i];
            let rank = if c.is_leaf() {
                7
            } else {
                phrase_rank(c.base_label())
            };
            (rank, i.abs_diff(head), i)
        })
    });
    let m = pick.map(|i| semantic_head(&node.children[i], rules));
    Ok(DefPair::new(h.token, h.tag, m.map(|m| (m.token, m.tag))))
}

/// One line of the definitions corpus.
#[derive(Debug, Clone, PartialEq)]
pub struct DefRecord {
    pub word: String,
    pub pos: Pos,
    pub synset: SynsetId,
    pub definition: String,
    pub parse: ParseTree,
}

#[derive(Debug, Error)]
pub enum CorpusError {
    #[error("i/o error: {0}")]
    Io(#[from] io::Error),
}

/// A line of the corpus that could not be used.
#[derive(Debug, Clone, PartialEq)]
pub struct Reject {
    pub line: usize,
    pub reason: String,
}

pub const CORPUS_HEADER: &str = "# word\tpos\tsynset\tdefinition\tparse";

/// Reads a corpus with one record per line and five tab-separated
/// fields: word, pos letter, synset id, definition text, bracketed parse.
/// Lines starting with `#` are comments.
pub fn read_corpus<R: BufRead>(reader: R) -> Result<(Vec<DefRecord>, Vec<Reject>), CorpusError> {
    let mut records = Vec::new();
    let mut rejects = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        match parse_record(&line) {
            Ok(r) => records.push(r),
            Err(reason) => rejects.push(Reject { line: i + 1, reason }),
        }
    }
    Ok((records, rejects))
}

pub fn read_corpus_file(path: impl AsRef<Path>) -> Result<(Vec<DefRecord>, Vec<Reject>), CorpusError> {
    read_corpus(BufReader::new(File::open(path)?))
}

fn parse_record(line: &str) -> Result<DefRecord, String> {
    let fields: Vec<&str> = line.split('\t').collect();
    let [word, pos, synset, definition, parse] = fields[..] else {
        return Err(format!("expected 5 tab-separated fields, found {}", fields.len()));
    };
    if word.is_empty() {
        return Err("empty word".into());
    }
    let pos: Pos = pos.parse()?;
    let synset: SynsetId = synset.parse()?;
    if synset.pos != pos {
        return Err(format!("synset {synset} does not match pos {pos}"));
    }
    let parse = parse_ptb(parse).map_err(|e| e.to_string())?;
    Ok(DefRecord {
        word: word.to_owned(),
        pos,
        synset,
        definition: definition.to_owned(),
        parse,
    })
}

pub fn write_corpus<W: Write>(w: &mut W, records: &[DefRecord]) -> io::Result<()> {
    writeln!(w, "{CORPUS_HEADER}")?;
    for r in records {
        writeln!(
            w,
            "{}\t{}\t{}\t{}\t{}",
            r.word,
            r.pos,
            r.synset,
            r.definition.replace(['\t', '\n'], " "),
            r.parse
        )?;
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    const FIG1: &str = "(ROOT (NP (NP (DT a) (NN feeling)) (PP (IN of) (NP (ADJP (JJ dreary) (CC or) (JJ pessimistic)) (NN sadness)))))";

    fn head(s: &str) -> (String, String) {
        let t = parse_ptb(s).unwrap();
        let h = semantic_head(&t, &HeadRuleTable::semantic());
        (h.token.to_owned(), h.tag.to_owned())
    }

    fn pair(s: &str) -> DefPair {
        extract_pair(&parse_ptb(s).unwrap(), &HeadRuleTable::semantic()).unwrap()
    }

    #[test]
    fn parses_small_tree() {
        let t = parse_ptb("(NP (DT a) (NN feeling))").unwrap();
        assert_eq!(t.label, "NP");
        assert_eq!(t.leaves(), vec![("a", "DT"), ("feeling", "NN")]);
    }

    #[test]
    fn parses_cheerlessness_tree() {
        let t = parse_ptb(FIG1).unwrap();
        assert_eq!(t.leaves().len(), 7);
        let np = &t.children[0];
        assert_eq!(np.label, "NP");
        let labels: Vec<&str> = np.children.iter().map(|c| c.label.as_str()).collect();
        assert_eq!(labels, vec!["NP", "PP"]);
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_ptb("(NP (DT a"), Err(ParseError::Unbalanced(9)));
        assert_eq!(parse_ptb("   "), Err(ParseError::Empty));
        assert_eq!(parse_ptb("(NN a))"), Err(ParseError::Unbalanced(6)));
        assert_eq!(parse_ptb("(NN a) x"), Err(ParseError::Stray(7)));
        assert_eq!(parse_ptb("(NN a) (NN b)"), Err(ParseError::Stray(7)));
        assert!(matches!(parse_ptb("(NP)"), Err(ParseError::Malformed { .. })));
        assert!(matches!(parse_ptb("(NN a b)"), Err(ParseError::Malformed { .. })));
        assert!(matches!(
            parse_ptb("(NN a (X b))"),
            Err(ParseError::Malformed { .. })
        ));
    }

    #[test]
    fn brackets_are_decoded_and_reencoded() {
        let src = "(NP (-LRB- -LRB-) (NN x) (-RRB- -RRB-))";
        let t = parse_ptb(src).unwrap();
        assert_eq!(t.leaves()[0], ("(", "-LRB-"));
        assert_eq!(t.serialize(), src);
    }

    #[test]
    fn round_trip_normalizes_whitespace() {
        let t = parse_ptb("(ROOT\n  (NP (DT a)\n      (NN feeling)))").unwrap();
        assert_eq!(t.serialize(), "(ROOT (NP (DT a) (NN feeling)))");
        let t = parse_ptb("( (NN x))").unwrap();
        assert_eq!(parse_ptb(&t.serialize()).unwrap(), t);
    }

    #[test]
    fn heads() {
        assert_eq!(head("(NP (DT a) (NN feeling))"), ("feeling".into(), "NN".into()));
        assert_eq!(
            head("(PP (IN of) (NP (NN sadness)))"),
            ("sadness".into(), "NN".into())
        );
        assert_eq!(head("(NN dog)"), ("dog".into(), "NN".into()));
        assert_eq!(head("(PP (IN from))"), ("from".into(), "IN".into()));
        assert_eq!(
            head("(VP (TO to) (VP (VB remove) (NP (NN dirt))))"),
            ("remove".into(), "VB".into())
        );
        assert_eq!(
            head("(SBAR (WHNP (WP who)) (S (VP (VBZ drives) (NP (DT a) (NN taxi)))))"),
            ("drives".into(), "VBZ".into())
        );
        assert_eq!(
            head("(NP (NN dog) (, ,) (NN cat) (. .))"),
            ("cat".into(), "NN".into())
        );
    }

    #[test]
    fn function_tags_are_ignored() {
        assert_eq!(
            head("(S (NP-SBJ (NN it)) (VP (VBZ runs)))"),
            ("runs".into(), "VBZ".into())
        );
    }

    #[test]
    fn cheerlessness_pair() {
        assert_eq!(pair(FIG1), DefPair::new("feeling", "NN", Some(("sadness", "NN"))));
    }

    #[test]
    fn verb_pair_skips_bare_preposition() {
        assert_eq!(
            pair("(ROOT (S (VP (VB remove) (NP (DT the) (NNS trees)) (PP (IN from)))))"),
            DefPair::new("remove", "VB", Some(("trees", "NNS")))
        );
    }

    #[test]
    fn single_child_fallback() {
        assert_eq!(
            pair("(ROOT (NP (NN someone)))"),
            DefPair::new("someone", "NN", None)
        );
    }

    #[test]
    fn pronoun_head_takes_clause_verb() {
        let p = pair(
            "(ROOT (NP (NP (NN someone)) (PP (IN in) (NP (NN charge))) (SBAR (WHNP (WP who)) (S (VP (VBZ drives) (NP (DT a) (NN taxi)))))))",
        );
        assert_eq!(p, DefPair::new("someone", "NN", Some(("drives", "VBZ"))));
    }

    #[test]
    fn pp_outranks_nearer_adjective() {
        let p = pair("(ROOT (NP (NP (JJ young) (NN cat)) (PP (IN of) (NP (NN house)))))");
        assert_eq!(p, DefPair::new("cat", "NN", Some(("house", "NN"))));
        let p = pair("(ROOT (NP (JJ young) (NN dog)))");
        assert_eq!(p, DefPair::new("dog", "NN", Some(("young", "JJ"))));
    }

    #[test]
    fn empty_tree_is_an_error() {
        let t = ParseTree::node("ROOT", vec![]);
        assert_eq!(
            extract_pair(&t, &HeadRuleTable::semantic()),
            Err(ExtractError::Empty)
        );
    }

    #[test]
    fn corpus_round_trip() {
        let text = format!(
            "{CORPUS_HEADER}\ncheerlessness\tn\t00001681-n\ta feeling of dreary or pessimistic sadness\t{FIG1}\nbad\tn\tx\ty\tz\n"
        );
        let (records, rejects) = read_corpus(text.as_bytes()).unwrap();
        assert_eq!(records.len(), 1);
        assert_eq!(rejects.len(), 1);
        assert_eq!(rejects[0].line, 3);
        let mut out = Vec::new();
        write_corpus(&mut out, &records).unwrap();
        let (again, _) = read_corpus(&out[..]).unwrap();
        assert_eq!(again, records);
    }
}
