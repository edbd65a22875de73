use std::collections::HashMap;
use std::fmt;
use std::str::FromStr;

use super::{IcTable, Pos, SynsetId, WordNetError, WordNetGraph};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Measure {
    Path,
    Wup,
    Res,
}

impl Measure {
    pub const ALL: [Measure; 3] = [Measure::Path, Measure::Wup, Measure::Res];

    pub fn name(self) -> &'static str {
        match self {
            Measure::Path => "path",
            Measure::Wup => "wup",
            Measure::Res => "res",
        }
    }
}

impl fmt::Display for Measure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Measure {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "path" => Ok(Measure::Path),
            "wup" => Ok(Measure::Wup),
            "res" => Ok(Measure::Res),
            other => Err(format!("unknown measure {other:?} (path, wup, res)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subsumer {
    Synset(SynsetId),
    VirtualRoot,
}

struct Ancestry {
    id: SynsetId,
    up: HashMap<SynsetId, u32>,
}

struct PairInfo {
    lcs: Subsumer,
    distance: u32,
}

impl WordNetGraph {
    fn ancestry(&self, id: &SynsetId) -> Result<Ancestry, WordNetError> {
        Ok(Ancestry {
            id: *id,
            up: self.ancestors(id)?,
        })
    }

    fn real_depth(&self, id: &SynsetId) -> u32 {
        self.depth[self.by_id[id]]
    }

    fn pair_info(&self, a: &Ancestry, b: &Ancestry) -> Result<PairInfo, WordNetError> {
        if a.id.pos != b.id.pos {
            return Err(WordNetError::PosMismatch(a.id, b.id));
        }
        let (small, large) = if a.up.len() <= b.up.len() { (a, b) } else { (b, a) };
        let mut best: Option<(u32, SynsetId)> = None;
        let mut distance: Option<u32> = None;
        for (c, da) in &small.up {
            let Some(db) = large.up.get(c) else { continue };
            let d = da + db;
            distance = Some(distance.map_or(d, |x| x.min(d)));
            let depth = self.real_depth(c);
            best = match best {
                Some((bd, bid)) if bd > depth || (bd == depth && bid < *c) => Some((bd, bid)),
                _ => Some((depth, *c)),
            };
        }
        let virtual_root = self.virtual_root(a.id.pos);
        if virtual_root {
            let via_root = self.real_depth(&a.id) + self.real_depth(&b.id);
            distance = Some(distance.map_or(via_root, |x| x.min(via_root)));
        }
        match (best, distance) {
            (Some((_, c)), Some(d)) => Ok(PairInfo {
                lcs: Subsumer::Synset(c),
                distance: d,
            }),
            (None, Some(d)) => Ok(PairInfo {
                lcs: Subsumer::VirtualRoot,
                distance: d,
            }),
            _ => Err(WordNetError::NoCommonAncestor(a.id, b.id)),
        }
    }

    /// Deepest common ancestor (itself included), smaller id on ties.
    /// `None` when the two synsets share no real ancestor.
    pub fn lcs(&self, a: &SynsetId, b: &SynsetId) -> Result<Option<SynsetId>, WordNetError> {
        if a.pos != b.pos {
            return Err(WordNetError::PosMismatch(*a, *b));
        }
        match self.pair_info(&self.ancestry(a)?, &self.ancestry(b)?) {
            Ok(PairInfo {
                lcs: Subsumer::Synset(c),
                ..
            }) => Ok(Some(c)),
            Ok(_) | Err(WordNetError::NoCommonAncestor(..)) => Ok(None),
            Err(e) => Err(e),
        }
    }

    /// Like [`lcs`](Self::lcs) but falls back to the virtual root when it
    /// is enabled for the POS.
    pub fn subsumer(&self, a: &SynsetId, b: &SynsetId) -> Result<Subsumer, WordNetError> {
        Ok(self.pair_info(&self.ancestry(a)?, &self.ancestry(b)?)?.lcs)
    }

    /// Shortest hypernym-path edge count between two synsets.
    pub fn path_distance(&self, a: &SynsetId, b: &SynsetId) -> Result<u32, WordNetError> {
        Ok(self.pair_info(&self.ancestry(a)?, &self.ancestry(b)?)?.distance)
    }

    pub fn path_sim(&self, a: &SynsetId, b: &SynsetId) -> Result<f64, WordNetError> {
        self.similarity(Measure::Path, None, a, b)
    }

    pub fn wup_sim(&self, a: &SynsetId, b: &SynsetId) -> Result<f64, WordNetError> {
        self.similarity(Measure::Wup, None, a, b)
    }

    pub fn res_sim(&self, ic: &IcTable, a: &SynsetId, b: &SynsetId) -> Result<f64, WordNetError> {
        self.similarity(Measure::Res, Some(ic), a, b)
    }

    /// `ic` is required for [`Measure::Res`] and ignored otherwise.
    pub fn similarity(
        &self,
        measure: Measure,
        ic: Option<&IcTable>,
        a: &SynsetId,
        b: &SynsetId,
    ) -> Result<f64, WordNetError> {
        let (aa, ab) = (self.ancestry(a)?, self.ancestry(b)?);
        self.similarity_of(measure, ic, &aa, &ab)
    }

    fn similarity_of(
        &self,
        measure: Measure,
        ic: Option<&IcTable>,
        a: &Ancestry,
        b: &Ancestry,
    ) -> Result<f64, WordNetError> {
        let info = self.pair_info(a, b)?;
        match measure {
            Measure::Path => Ok(1.0 / (1.0 + f64::from(info.distance))),
            Measure::Wup => {
                let shift = u32::from(self.virtual_root(a.id.pos));
                let lcs_depth = match info.lcs {
                    Subsumer::Synset(c) => self.real_depth(&c) + shift,
                    Subsumer::VirtualRoot => 1,
                };
                let da = self.real_depth(&a.id) + shift;
                let db = self.real_depth(&b.id) + shift;
                Ok(2.0 * f64::from(lcs_depth) / f64::from(da + db))
            }
            Measure::Res => {
                let ic = ic.ok_or(WordNetError::MissingIc(a.id))?;
                match info.lcs {
                    Subsumer::Synset(c) => ic.get(&c).ok_or(WordNetError::MissingIc(c)),
                    Subsumer::VirtualRoot => Ok(0.0),
                }
            }
        }
    }

    /// Maximum similarity over all synset pairs of two words. Pairs that
    /// cannot be compared are skipped.
    pub fn word_similarity(
        &self,
        measure: Measure,
        ic: Option<&IcTable>,
        w1: &str,
        w2: &str,
        pos: Pos,
    ) -> Result<f64, WordNetError> {
        let s1 = self.synsets_of(w1, pos);
        let s2 = self.synsets_of(w2, pos);
        if s1.is_empty() {
            return Err(WordNetError::NotInWordNet {
                word: w1.to_owned(),
                pos,
            });
        }
        if s2.is_empty() {
            return Err(WordNetError::NotInWordNet {
                word: w2.to_owned(),
                pos,
            });
        }
        let a1 = s1
            .iter()
            .map(|s| self.ancestry(s))
            .collect::<Result<Vec<_>, _>>()?;
        let a2 = s2
            .iter()
            .map(|s| self.ancestry(s))
            .collect::<Result<Vec<_>, _>>()?;
        let mut best: Option<f64> = None;
        for x in &a1 {
            for y in &a2 {
                if let Ok(v) = self.similarity_of(measure, ic, x, y) {
                    best = Some(best.map_or(v, |b| b.max(v)));
                }
            }
        }
        best.ok_or_else(|| WordNetError::NoComparablePair(w1.to_owned(), w2.to_owned()))
    }

    /// All three measures at once for a word pair.
    pub fn word_similarities(
        &self,
        ic: &IcTable,
        w1: &str,
        w2: &str,
        pos: Pos,
    ) -> Result<[f64; 3], WordNetError> {
        Ok([
            self.word_similarity(Measure::Path, Some(ic), w1, w2, pos)?,
            self.word_similarity(Measure::Wup, Some(ic), w1, w2, pos)?,
            self.word_similarity(Measure::Res, Some(ic), w1, w2, pos)?,
        ])
    }
}

#[cfg(test)]
mod tests {
    use super::super::toy::{graph, id};
    use super::*;

    #[test]
    fn lcs_cases() {
        let g = graph();
        assert_eq!(g.lcs(&id(3), &id(3)).unwrap(), Some(id(3)));
        assert_eq!(g.lcs(&id(3), &id(2)).unwrap(), Some(id(2)));
        assert_eq!(g.lcs(&id(3), &id(4)).unwrap(), Some(id(2)));
        assert_eq!(g.lcs(&id(3), &id(5)).unwrap(), Some(id(1)));
    }

    #[test]
    fn path_values() {
        let g = graph();
        assert_eq!(g.path_sim(&id(3), &id(3)).unwrap(), 1.0);
        assert_eq!(g.path_sim(&id(2), &id(3)).unwrap(), 0.5);
        assert_eq!(g.path_sim(&id(3), &id(4)).unwrap(), 1.0 / 3.0);
    }

    #[test]
    fn wup_values() {
        let g = graph();
        assert_eq!(g.wup_sim(&id(3), &id(3)).unwrap(), 1.0);
        assert_eq!(g.wup_sim(&id(3), &id(4)).unwrap(), 2.0 / 3.0);
        assert_eq!(g.wup_sim(&id(2), &id(3)).unwrap(), 0.8);
    }

    #[test]
    fn res_values() {
        let g = graph();
        let ic = IcTable::intrinsic(&g);
        assert_eq!(g.res_sim(&ic, &id(1), &id(4)).unwrap(), 0.0);
        // closure of A is {A1, A2}: p = (2 + 1) / 5
        let expected = -(3.0f64 / 5.0).ln();
        assert!((g.res_sim(&ic, &id(3), &id(4)).unwrap() - expected).abs() < 1e-15);
        assert_eq!(g.res_sim(&ic, &id(3), &id(3)).unwrap(), ic.get(&id(3)).unwrap());
    }

    #[test]
    fn measure_names() {
        for m in Measure::ALL {
            assert_eq!(m.name().parse::<Measure>().unwrap(), m);
        }
        assert!("lch".parse::<Measure>().is_err());
    }

    #[test]
    fn pos_mismatch() {
        let g = graph();
        let v = SynsetId::new(1, Pos::Verb);
        assert!(matches!(g.lcs(&id(1), &v), Err(WordNetError::PosMismatch(..))));
    }
}
