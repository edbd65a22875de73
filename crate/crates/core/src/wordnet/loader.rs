use std::collections::HashMap;
use std::fs;
use std::path::Path;

use super::{split_gloss, Pos, Synset, SynsetId, WordNetError, WordNetGraph};

/// Loads `data.{noun,verb,adj,adv}` and `index.*` from a WordNet 3.0 dict
/// directory. Only hypernym and hyponym pointers (plain and instance) are
/// kept.
pub fn load_wordnet(dir: impl AsRef<Path>) -> Result<WordNetGraph, WordNetError> {
    let dir = dir.as_ref();
    let mut files = Vec::new();
    for pos in Pos::ALL {
        for kind in ["data", "index"] {
            let name = format!("{kind}.{}", pos.file_stem());
            let path = dir.join(&name);
            if !path.is_file() {
                return Err(WordNetError::MissingFile(name));
            }
            files.push((pos, kind, name, path));
        }
    }
    let mut synsets = Vec::new();
    let mut index = HashMap::new();
    for (pos, kind, name, path) in files {
        let bytes = fs::read(&path).map_err(|source| WordNetError::Io {
            file: name.clone(),
            source,
        })?;
        if kind == "data" {
            parse_data(&name, pos, &bytes, &mut synsets)?;
        } else {
            parse_index(&name, pos, &String::from_utf8_lossy(&bytes), &mut index)?;
        }
    }
    reconcile_hyponyms(&mut synsets);
    WordNetGraph::from_parts(synsets, index)
}

/// Rebuilds hyponym lists as the inverse of the hypernym pointers, keeping
/// file order where the two agree. One-sided `~` pointers are dropped.
fn reconcile_hyponyms(synsets: &mut [Synset]) {
    let mut inverse: HashMap<SynsetId, Vec<SynsetId>> = HashMap::new();
    for s in synsets.iter() {
        for h in &s.hypernyms {
            inverse.entry(*h).or_default().push(s.id);
        }
    }
    let mut dropped = 0usize;
    for s in synsets.iter_mut() {
        let expected = inverse.remove(&s.id).unwrap_or_default();
        let before = s.hyponyms.len();
        s.hyponyms.retain(|h| expected.contains(h));
        dropped += before - s.hyponyms.len();
        for e in expected {
            if !s.hyponyms.contains(&e) {
                s.hyponyms.push(e);
            }
        }
    }
    if dropped > 0 {
        log::warn!("dropped {dropped} hyponym pointers without a matching hypernym pointer");
    }
}

fn strip_marker(lemma: &str) -> &str {
    // adjective syntactic markers such as "(a)" or "(ip)"
    match lemma.find('(') {
        Some(i) if lemma.ends_with(')') => &lemma[..i],
        _ => lemma,
    }
}

fn parse_data(file: &str, pos: Pos, bytes: &[u8], out: &mut Vec<Synset>) -> Result<(), WordNetError> {
    // copies converted to CRLF keep offsets that count one byte per newline
    let crlf = bytes.windows(2).any(|w| w == b"\r\n");
    let mut at = 0usize;
    for (lineno, raw) in bytes.split_inclusive(|&b| b == b'\n').enumerate() {
        let start = at;
        at += raw.len() - usize::from(crlf && raw.ends_with(b"\r\n"));
        let line = String::from_utf8_lossy(raw);
        if line.starts_with("  ") || line.trim().is_empty() {
            continue;
        }
        let malformed = |message: String| WordNetError::Malformed {
            file: file.to_owned(),
            line: lineno + 1,
            message,
        };
        let (head, gloss) = line
            .split_once(" | ")
            .or_else(|| line.split_once('|'))
            .ok_or_else(|| malformed("no gloss separator".into()))?;
        let fields: Vec<&str> = head.split_ascii_whitespace().collect();
        let offset: u32 =
            fields
                .first()
                .and_then(|f| f.parse().ok())
                .ok_or_else(|| WordNetError::MalformedOffset {
                    file: file.to_owned(),
                    line: lineno + 1,
                    message: format!("unreadable offset {:?}", fields.first()),
                })?;
        if offset as usize != start {
            return Err(WordNetError::MalformedOffset {
                file: file.to_owned(),
                line: lineno + 1,
                message: format!("record claims offset {offset} but starts at byte {start}"),
            });
        }
        let field = |i: usize| {
            fields
                .get(i)
                .copied()
                .ok_or_else(|| malformed(format!("record ends before field {i}")))
        };
        let w_cnt =
            usize::from_str_radix(field(3)?, 16).map_err(|e| malformed(format!("word count: {e}")))?;
        let mut lemmas = Vec::with_capacity(w_cnt);
        let mut i = 4;
        for _ in 0..w_cnt {
            lemmas.push(strip_marker(field(i)?).to_owned());
            i += 2;
        }
        let p_cnt: usize = field(i)?
            .parse()
            .map_err(|e| malformed(format!("pointer count: {e}")))?;
        i += 1;
        let id = SynsetId::new(offset, pos);
        let mut hypernyms = Vec::new();
        let mut hyponyms = Vec::new();
        for _ in 0..p_cnt {
            let symbol = field(i)?;
            let target_offset: u32 = field(i + 1)?
                .parse()
                .map_err(|e| malformed(format!("pointer offset: {e}")))?;
            let target_pos = field(i + 2)?
                .chars()
                .next()
                .and_then(Pos::from_letter)
                .ok_or_else(|| malformed("pointer part of speech".into()))?;
            i += 4;
            let target = SynsetId::new(target_offset, target_pos);
            match symbol {
                "@" | "@i" if target_pos == pos => hypernyms.push(target),
                "~" | "~i" if target_pos == pos => hyponyms.push(target),
                _ => {}
            }
        }
        let (definition, examples) = split_gloss(gloss.trim());
        out.push(Synset {
            id,
            lemmas,
            definition,
            examples,
            hypernyms,
            hyponyms,
        });
    }
    Ok(())
}

fn parse_index(
    file: &str,
    pos: Pos,
    text: &str,
    out: &mut HashMap<(String, Pos), Vec<SynsetId>>,
) -> Result<(), WordNetError> {
    for (lineno, line) in text.lines().enumerate() {
        if line.starts_with("  ") || line.trim().is_empty() {
            continue;
        }
        let malformed = |message: &str| WordNetError::Malformed {
            file: file.to_owned(),
            line: lineno + 1,
            message: message.to_owned(),
        };
        let fields: Vec<&str> = line.split_ascii_whitespace().collect();
        if fields.len() < 4 {
            return Err(malformed("too few fields"));
        }
        let synset_cnt: usize = fields[2].parse().map_err(|_| malformed("synset count"))?;
        if synset_cnt > fields.len() {
            return Err(malformed("synset count exceeds fields"));
        }
        let ids = fields[fields.len() - synset_cnt..]
            .iter()
            .map(|f| f.parse::<u32>().map(|o| SynsetId::new(o, pos)))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|_| malformed("synset offset"))?;
        out.insert((fields[0].to_owned(), pos), ids);
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn markers_are_stripped() {
        assert_eq!(strip_marker("happy(a)"), "happy");
        assert_eq!(strip_marker("dog"), "dog");
    }

    #[test]
    fn offset_must_match_position() {
        let text = "00000005 03 n 01 x 0 000 | thing  \n";
        let mut out = Vec::new();
        assert!(matches!(
            parse_data("data.noun", Pos::Noun, text.as_bytes(), &mut out),
            Err(WordNetError::MalformedOffset { .. })
        ));
        let text = "00000000 03 n 01 x 0 000 | thing  \n";
        parse_data("data.noun", Pos::Noun, text.as_bytes(), &mut out).unwrap();
        assert_eq!(out[0].lemmas, vec!["x"]);
        assert_eq!(out[0].definition, "thing");
    }
}
