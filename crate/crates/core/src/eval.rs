//! Evaluation protocols and the statistics behind them: cosine
//! distributions against stored embeddings, sister-term AUC, per-list
//! Spearman correlation with WordNet measures, and the one-sided Wilcoxon
//! signed-rank test.

use statrs::distribution::{ContinuousCDF, Normal};
use thiserror::Error;

use crate::baselines::{additive, head_baseline};
use crate::datasets::{penn_tag, PairList, Relation, WordPair, WordRecord};
use crate::denn::{lookup_folded, predict_oov, DennModel};
use crate::embed_store::{cosine, EmbeddingTable, NgramComposer};
use crate::wordnet::{Measure, Pos, WordNetGraph};

/// One-sided significance level.
pub const ALPHA: f64 = 0.05;

/// Largest sample handled by the exact Wilcoxon distribution.
pub const WILCOXON_EXACT_MAX: usize = 25;

#[derive(Debug, Error, PartialEq)]
pub enum StatsError {
    #[error("inputs have different lengths ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("need at least {need} values, got {got}")]
    TooFew { need: usize, got: usize },
    #[error("ranks have zero variance")]
    ZeroVariance,
    #[error("only one class present")]
    SingleClass,
    #[error("all paired differences are zero")]
    AllZero,
    #[error("non-finite input")]
    NonFinite,
}

/// Mean and population standard deviation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Summary {
    pub mean: f64,
    pub std: f64,
    pub n: usize,
}

impl Summary {
    pub fn of(values: &[f64]) -> Summary {
        let n = values.len();
        if n == 0 {
            return Summary {
                mean: f64::NAN,
                std: f64::NAN,
                n,
            };
        }
        let mean = values.iter().sum::<f64>() / n as f64;
        let var = values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / n as f64;
        Summary {
            mean,
            std: var.sqrt(),
            n,
        }
    }
}

/// 1-based ranks with ties sharing their average rank.
pub fn average_ranks(xs: &[f64]) -> Vec<f64> {
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let mut ranks = vec![0.0; xs.len()];
    let mut i = 0;
    while i < idx.len() {
        let mut j = i;
        while j + 1 < idx.len() && xs[idx[j + 1]] == xs[idx[i]] {
            j += 1;
        }
        let r = (i + j) as f64 / 2.0 + 1.0;
        for &k in &idx[i..=j] {
            ranks[k] = r;
        }
        i = j + 1;
    }
    ranks
}

fn check_finite(xs: &[f64]) -> Result<(), StatsError> {
    if xs.iter().all(|x| x.is_finite()) {
        Ok(())
    } else {
        Err(StatsError::NonFinite)
    }
}

/// Pearson correlation of the average ranks.
pub fn spearman(xs: &[f64], ys: &[f64]) -> Result<f64, StatsError> {
    if xs.len() != ys.len() {
        return Err(StatsError::LengthMismatch(xs.len(), ys.len()));
    }
    if xs.len() < 2 {
        return Err(StatsError::TooFew {
            need: 2,
            got: xs.len(),
        });
    }
    check_finite(xs)?;
    check_finite(ys)?;
    let rx = average_ranks(xs);
    let ry = average_ranks(ys);
    let m = (xs.len() as f64 + 1.0) / 2.0;
    let (mut sxy, mut sxx, mut syy) = (0.0, 0.0, 0.0);
    for (a, b) in rx.iter().zip(&ry) {
        sxy += (a - m) * (b - m);
        sxx += (a - m) * (a - m);
        syy += (b - m) * (b - m);
    }
    if sxx == 0.0 || syy == 0.0 {
        return Err(StatsError::ZeroVariance);
    }
    Ok((sxy / (sxx * syy).sqrt()).clamp(-1.0, 1.0))
}

/// Area under the ROC curve: the chance that a positive outscores a
/// negative, ties counting one half.
pub fn auc_roc(scores: &[f64], positive: &[bool]) -> Result<f64, StatsError> {
    if scores.len() != positive.len() {
        return Err(StatsError::LengthMismatch(scores.len(), positive.len()));
    }
    check_finite(scores)?;
    let n_pos = positive.iter().filter(|&&p| p).count();
    let n_neg = positive.len() - n_pos;
    if n_pos == 0 || n_neg == 0 {
        return Err(StatsError::SingleClass);
    }
    let ranks = average_ranks(scores);
    let r_pos: f64 = ranks
        .iter()
        .zip(positive)
        .filter(|(_, &p)| p)
        .map(|(r, _)| r)
        .sum();
    let u = r_pos - (n_pos * (n_pos + 1)) as f64 / 2.0;
    Ok(u / (n_pos as f64 * n_neg as f64))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Wilcoxon {
    /// P(W+ ≥ observed) under the null hypothesis.
    pub p: f64,
    /// Sum of the ranks of positive differences.
    pub w_plus: f64,
    /// Nonzero differences used.
    pub n: usize,
    /// Zero differences discarded.
    pub zeros: usize,
    pub exact: bool,
}

/// Signed-rank test of the alternative `a > b` on paired samples.
pub fn wilcoxon_one_sided(a: &[f64], b: &[f64]) -> Result<Wilcoxon, StatsError> {
    if a.len() != b.len() {
        return Err(StatsError::LengthMismatch(a.len(), b.len()));
    }
    check_finite(a)?;
    check_finite(b)?;
    let d: Vec<f64> = a
        .iter()
        .zip(b)
        .map(|(x, y)| x - y)
        .filter(|&d| d != 0.0)
        .collect();
    let zeros = a.len() - d.len();
    let n = d.len();
    if n == 0 {
        return Err(StatsError::AllZero);
    }
    let abs: Vec<f64> = d.iter().map(|x| x.abs()).collect();
    let ranks = average_ranks(&abs);
    let w_plus: f64 = ranks
        .iter()
        .zip(&d)
        .filter(|(_, &x)| x > 0.0)
        .map(|(r, _)| r)
        .sum();
    if n <= WILCOXON_EXACT_MAX {
        // ranks are multiples of 1/2, so doubled ranks index an array
        let doubled: Vec<usize> = ranks.iter().map(|r| (2.0 * r).round() as usize).collect();
        let total: usize = doubled.iter().sum();
        let mut counts = vec![0.0f64; total + 1];
        counts[0] = 1.0;
        let mut reach = 0;
        for &r in &doubled {
            for s in (0..=reach).rev() {
                if counts[s] != 0.0 {
                    counts[s + r] += counts[s];
                }
            }
            reach += r;
        }
        let observed = (2.0 * w_plus).round() as usize;
        let tail: f64 = counts[observed..].iter().sum();
        return Ok(Wilcoxon {
            p: tail / 2f64.powi(n as i32),
            w_plus,
            n,
            zeros,
            exact: true,
        });
    }
    let nf = n as f64;
    let mean = nf * (nf + 1.0) / 4.0;
    let mut sorted = abs.clone();
    sorted.sort_by(f64::total_cmp);
    let mut tie_term = 0.0;
    let mut i = 0;
    while i < n {
        let mut j = i;
        while j + 1 < n && sorted[j + 1] == sorted[i] {
            j += 1;
        }
        let t = (j - i + 1) as f64;
        tie_term += t * t * t - t;
        i = j + 1;
    }
    let var = nf * (nf + 1.0) * (2.0 * nf + 1.0) / 24.0 - tie_term / 48.0;
    let z = (w_plus - mean - 0.5) / var.sqrt();
    let normal = Normal::standard();
    Ok(Wilcoxon {
        p: normal.sf(z).clamp(f64::MIN_POSITIVE, 1.0),
        w_plus,
        n,
        zeros,
        exact: false,
    })
}

/// Pairs the entries that are present on both sides.
pub fn paired(a: &[Option<f64>], b: &[Option<f64>]) -> (Vec<f64>, Vec<f64>) {
    a.iter().zip(b).filter_map(|(x, y)| Some(((*x)?, (*y)?))).unzip()
}

#[derive(Debug, Error, PartialEq)]
#[error("{0}")]
pub struct PredictError(pub String);

/// Produces a vector for a defined word.
pub trait Predictor {
    fn name(&self) -> &str;
    fn predict(&self, record: &WordRecord) -> Result<Vec<f32>, PredictError>;
}

fn err(e: impl ToString) -> PredictError {
    PredictError(e.to_string())
}

pub struct DefinnetPredictor<'a> {
    pub model: &'a DennModel,
    pub table: &'a EmbeddingTable,
}

impl Predictor for DefinnetPredictor<'_> {
    fn name(&self) -> &str {
        "definnet"
    }

    fn predict(&self, r: &WordRecord) -> Result<Vec<f32>, PredictError> {
        predict_oov(self.model, self.table, &r.pair, penn_tag(r.pos)).map_err(err)
    }
}

/// Sum of the head and modifier vectors; the head alone when the modifier
/// is missing or unknown.
pub struct AdditivePredictor<'a> {
    pub table: &'a EmbeddingTable,
}

impl Predictor for AdditivePredictor<'_> {
    fn name(&self) -> &str {
        "additive"
    }

    fn predict(&self, r: &WordRecord) -> Result<Vec<f32>, PredictError> {
        let vh = lookup_folded(self.table, &r.pair.w_h)
            .ok_or_else(|| PredictError(format!("head {:?} unknown", r.pair.w_h)))?;
        match r.pair.w_m.as_deref().and_then(|w| lookup_folded(self.table, w)) {
            Some(vm) => additive(vh, vm).map_err(err),
            None => Ok(vh.to_vec()),
        }
    }
}

pub struct HeadPredictor<'a> {
    pub graph: &'a WordNetGraph,
    pub table: &'a EmbeddingTable,
}

impl Predictor for HeadPredictor<'_> {
    fn name(&self) -> &str {
        "head"
    }

    fn predict(&self, r: &WordRecord) -> Result<Vec<f32>, PredictError> {
        head_baseline(self.graph, self.table, &r.word, r.pos).map_err(err)
    }
}

/// Character n-gram composition of the word itself.
pub struct NgramPredictor<'a> {
    pub ngrams: &'a EmbeddingTable,
    pub composer: NgramComposer,
}

impl Predictor for NgramPredictor<'_> {
    fn name(&self) -> &str {
        "ngram"
    }

    fn predict(&self, r: &WordRecord) -> Result<Vec<f32>, PredictError> {
        self.composer.compose(self.ngrams, &r.word).map_err(err)
    }
}

/// The stored embedding of the word.
pub struct OraclePredictor<'a> {
    pub table: &'a EmbeddingTable,
}

impl Predictor for OraclePredictor<'_> {
    fn name(&self) -> &str {
        "embedding"
    }

    fn predict(&self, r: &WordRecord) -> Result<Vec<f32>, PredictError> {
        self.table
            .lookup(&r.word)
            .map(<[f32]>::to_vec)
            .ok_or_else(|| PredictError(format!("{:?} unknown", r.word)))
    }
}

/// Wraps a closure.
pub struct FnPredictor<F> {
    pub name: String,
    pub f: F,
}

impl<F: Fn(&WordRecord) -> Result<Vec<f32>, PredictError>> Predictor for FnPredictor<F> {
    fn name(&self) -> &str {
        &self.name
    }

    fn predict(&self, r: &WordRecord) -> Result<Vec<f32>, PredictError> {
        (self.f)(r)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DirectItem {
    pub word: String,
    pub pos: Pos,
    /// `None` when the word could not be scored.
    pub cosine: Option<f64>,
}

/// Cosine between predicted and stored vectors over a test set.
#[derive(Debug, Clone, PartialEq)]
pub struct DirectReport {
    pub model: String,
    pub items: Vec<DirectItem>,
    pub summary: Summary,
    pub excluded: usize,
}

impl DirectReport {
    pub fn values(&self) -> Vec<Option<f64>> {
        self.items.iter().map(|i| i.cosine).collect()
    }

    /// Restricted to one part of speech.
    pub fn for_pos(&self, pos: Pos) -> DirectReport {
        let items: Vec<DirectItem> = self.items.iter().filter(|i| i.pos == pos).cloned().collect();
        let present: Vec<f64> = items.iter().filter_map(|i| i.cosine).collect();
        DirectReport {
            model: self.model.clone(),
            excluded: items.len() - present.len(),
            summary: Summary::of(&present),
            items,
        }
    }
}

pub fn direct_eval(p: &dyn Predictor, test: &[WordRecord], table: &EmbeddingTable) -> DirectReport {
    let items: Vec<DirectItem> = test
        .iter()
        .map(|r| {
            let cosine = table.lookup(&r.word).and_then(|target| {
                let v = p.predict(r).map_err(|e| log::debug!("{}: {e}", r.word)).ok()?;
                cosine(&v, target).ok()
            });
            DirectItem {
                word: r.word.clone(),
                pos: r.pos,
                cosine,
            }
        })
        .collect();
    let present: Vec<f64> = items.iter().filter_map(|i| i.cosine).collect();
    DirectReport {
        model: p.name().to_owned(),
        excluded: items.len() - present.len(),
        summary: Summary::of(&present),
        items,
    }
}

fn pair_cosine(p: &dyn Predictor, pair: &WordPair, table: &EmbeddingTable) -> Option<f64> {
    let v = p.predict(&pair.w1).ok()?;
    cosine(&v, table.lookup(&pair.w2)?).ok()
}

#[derive(Debug, Clone, PartialEq)]
pub struct AucReport {
    pub model: String,
    pub auc: Option<f64>,
    /// Cosine per pair, `None` when unusable.
    pub scores: Vec<Option<f64>>,
    pub relations: Vec<Relation>,
    pub excluded: usize,
}

/// Ranks pairs by the cosine of `w1`'s predicted vector with `w2`'s stored
/// one and measures how well that separates sisters from random pairs.
pub fn auc_eval(p: &dyn Predictor, pairs: &[WordPair], table: &EmbeddingTable) -> AucReport {
    let scores: Vec<Option<f64>> = pairs.iter().map(|x| pair_cosine(p, x, table)).collect();
    let relations: Vec<Relation> = pairs.iter().map(|x| x.relation).collect();
    let (s, l): (Vec<f64>, Vec<bool>) = scores
        .iter()
        .zip(&relations)
        .filter_map(|(s, r)| Some(((*s)?, *r == Relation::Sister)))
        .unzip();
    AucReport {
        model: p.name().to_owned(),
        auc: auc_roc(&s, &l).ok(),
        excluded: scores.len() - s.len(),
        scores,
        relations,
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ListOutcome {
    Rho(f64),
    /// Some pair could not be scored.
    Unusable,
    /// Spearman undefined because of zero rank variance.
    Undefined,
}

impl ListOutcome {
    pub fn rho(self) -> Option<f64> {
        match self {
            ListOutcome::Rho(r) => Some(r),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorrelationReport {
    pub model: String,
    pub measure: Measure,
    pub per_list: Vec<ListOutcome>,
    pub summary: Summary,
    pub unusable: usize,
    pub undefined: usize,
}

impl CorrelationReport {
    pub fn rhos(&self) -> Vec<Option<f64>> {
        self.per_list.iter().map(|o| o.rho()).collect()
    }
}

/// Spearman correlation, per list, between predicted-vector cosines and
/// WordNet similarity.
pub fn indirect_eval(p: &dyn Predictor, lists: &[PairList], table: &EmbeddingTable) -> CorrelationReport {
    let measure = lists.first().map_or(Measure::Res, |l| l.measure);
    let per_list: Vec<ListOutcome> = lists
        .iter()
        .map(|list| {
            let cos: Option<Vec<f64>> = list.pairs.iter().map(|x| pair_cosine(p, x, table)).collect();
            match cos {
                None => ListOutcome::Unusable,
                Some(c) => match spearman(&c, &list.values()) {
                    Ok(r) => ListOutcome::Rho(r),
                    Err(_) => ListOutcome::Undefined,
                },
            }
        })
        .collect();
    let rhos: Vec<f64> = per_list.iter().filter_map(|o| o.rho()).collect();
    let count = |k: ListOutcome| per_list.iter().filter(|&&o| o == k).count();
    CorrelationReport {
        model: p.name().to_owned(),
        measure,
        unusable: count(ListOutcome::Unusable),
        undefined: count(ListOutcome::Undefined),
        summary: Summary::of(&rhos),
        per_list,
    }
}

/// Formats a value for report files; missing values print as `-`.
pub fn fmt_value(v: Option<f64>) -> String {
    v.map_or_else(|| "-".to_owned(), |x| format!("{x}"))
}
