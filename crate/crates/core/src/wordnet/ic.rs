use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::path::Path;

use super::{Pos, SynsetId, WordNetError, WordNetGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum IcMethod {
    Intrinsic,
    CorpusFile,
}

/// Information content per synset.
#[derive(Debug, Clone)]
pub struct IcTable {
    pub method: IcMethod,
    values: HashMap<SynsetId, f64>,
}

impl IcTable {
    /// `IC(s) = -ln((|hyponym closure of s| + 1) / N_pos)`, where the
    /// closure excludes `s` and `N_pos` counts the synsets of its POS.
    pub fn intrinsic(g: &WordNetGraph) -> IcTable {
        let mut below: HashMap<SynsetId, usize> = HashMap::new();
        let mut totals: BTreeMap<Pos, usize> = BTreeMap::new();
        for s in g.synsets() {
            *totals.entry(s.id.pos).or_default() += 1;
            let up = g.ancestors(&s.id).expect("synset from the graph itself");
            for a in up.keys().filter(|a| **a != s.id) {
                *below.entry(*a).or_default() += 1;
            }
        }
        let values = g
            .synsets()
            .map(|s| {
                let n = totals[&s.id.pos] as f64;
                let k = below.get(&s.id).copied().unwrap_or(0) as f64;
                (s.id, neg_log((k + 1.0) / n))
            })
            .collect();
        IcTable {
            method: IcMethod::Intrinsic,
            values,
        }
    }

    /// Reads a count file in the layout distributed with NLTK's
    /// `wordnet_ic` data: an optional `wnver::` line, then
    /// `<offset><pos-letter> <count> [ROOT]` per line. Probabilities are
    /// relative to the summed counts of the `ROOT` lines of each POS.
    /// Synsets with zero count get no entry.
    pub fn from_counts_file(path: impl AsRef<Path>) -> Result<IcTable, WordNetError> {
        let path = path.as_ref();
        let text = fs::read_to_string(path).map_err(|source| WordNetError::Io {
            file: path.display().to_string(),
            source,
        })?;
        Self::from_counts(&text)
    }

    pub fn from_counts(text: &str) -> Result<IcTable, WordNetError> {
        let mut counts: Vec<(SynsetId, f64)> = Vec::new();
        let mut totals: HashMap<Pos, f64> = HashMap::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || (i == 0 && line.starts_with("wnver")) {
                continue;
            }
            let err = |message: String| WordNetError::IcFormat { line: i + 1, message };
            let mut fields = line.split_whitespace();
            let key = fields.next().unwrap_or_default();
            let count = fields
                .next()
                .ok_or_else(|| err("missing count".into()))?
                .parse::<f64>()
                .map_err(|e| err(format!("count: {e}")))?;
            let root = match fields.next() {
                None => false,
                Some("ROOT") => true,
                Some(other) => return Err(err(format!("unexpected field {other:?}"))),
            };
            let pos_char = key.chars().last().ok_or_else(|| err("empty key".into()))?;
            let pos =
                Pos::from_letter(pos_char).ok_or_else(|| err(format!("bad part of speech in {key:?}")))?;
            let offset = key[..key.len() - pos_char.len_utf8()]
                .parse::<u32>()
                .map_err(|e| err(format!("offset in {key:?}: {e}")))?;
            if !(count >= 0.0 && count.is_finite()) {
                return Err(err(format!("count {count} is not a finite nonnegative number")));
            }
            if root {
                *totals.entry(pos).or_default() += count;
            }
            counts.push((SynsetId::new(offset, pos), count));
        }
        let mut values = HashMap::new();
        for (id, count) in counts {
            let Some(&total) = totals.get(&id.pos) else {
                continue;
            };
            if count > 0.0 && total > 0.0 {
                values.insert(id, neg_log(count / total));
            }
        }
        Ok(IcTable {
            method: IcMethod::CorpusFile,
            values,
        })
    }

    pub fn get(&self, id: &SynsetId) -> Option<f64> {
        self.values.get(id).copied()
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }
}

/// `-ln(p)` clamped to a nonnegative, positive-zero result.
fn neg_log(p: f64) -> f64 {
    let v = -p.ln();
    if v > 0.0 {
        v
    } else {
        0.0
    }
}

#[cfg(test)]
mod tests {
    use super::super::toy::{graph, id};
    use super::*;

    #[test]
    fn intrinsic_values() {
        let g = graph();
        let ic = IcTable::intrinsic(&g);
        assert_eq!(ic.get(&id(1)), Some(0.0));
        assert!((ic.get(&id(2)).unwrap() - (5.0f64 / 3.0).ln()).abs() < 1e-15);
        assert!((ic.get(&id(3)).unwrap() - 5.0f64.ln()).abs() < 1e-15);
    }

    #[test]
    fn counts_file() {
        let text = "wnver::abc\n1n 10.0 ROOT\n2n 4\n3n 0\n7v 2 ROOT\n";
        let ic = IcTable::from_counts(text).unwrap();
        assert_eq!(ic.get(&id(1)), Some(0.0));
        assert!((ic.get(&id(2)).unwrap() - 2.5f64.ln()).abs() < 1e-15);
        assert_eq!(ic.get(&id(3)), None);
        assert_eq!(ic.get(&SynsetId::new(7, Pos::Verb)), Some(0.0));
        assert!(IcTable::from_counts("1n x\n").is_err());
        assert!(IcTable::from_counts("1q 3\n").is_err());
    }
}
