use std::collections::BTreeSet;
use std::fmt::Write as _;
use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use definnet::baselines::head_baseline;
use definnet::datasets::{
    self, build_direct_sets, build_lists, build_pairs, direct_candidates, ingest, penn_tag, read_lists,
    read_pairs, read_records, split_iv_oov, Header, PairList, Relation, WordPair, WordRecord,
};
use definnet::defparse::{extract_pair, parse_ptb, read_corpus_file, HeadRuleTable};
use definnet::denn::{load_model, pair_input, predict_oov, save_model, train, DennModel, TrainExample};
use definnet::embed_store::{EmbeddingTable, NgramComposer};
use definnet::eval::{
    auc_eval, direct_eval, fmt_value, indirect_eval, paired, wilcoxon_one_sided, AdditivePredictor,
    CorrelationReport, DefinnetPredictor, HeadPredictor, NgramPredictor, OraclePredictor, Predictor, ALPHA,
};
use definnet::wordnet::{load_wordnet, IcTable, Measure, Pos, WordNetGraph};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::UsageError;

/// Independent seeds drawn from the run seed, one per random step.
struct Seeds {
    split: u64,
    iv_pairs: u64,
    oov_pairs: u64,
    lists: u64,
    model: u64,
    train: u64,
}

impl Seeds {
    fn new(seed: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut next = || rng.next_u64();
        Seeds {
            split: next(),
            iv_pairs: next(),
            oov_pairs: next(),
            lists: next(),
            model: next(),
            train: next(),
        }
    }
}

pub struct Ctx<'a> {
    pub cfg: &'a RunConfig,
    hash: String,
    rules: HeadRuleTable,
}

fn required<'p>(p: &'p Option<PathBuf>, what: &str) -> Result<&'p Path> {
    p.as_deref()
        .ok_or_else(|| UsageError(format!("no {what} given (config or flag)")).into())
}

fn existing(path: &Path) -> Result<&Path> {
    if path.exists() {
        Ok(path)
    } else {
        bail!("{} does not exist", path.display())
    }
}

impl<'a> Ctx<'a> {
    pub fn new(cfg: &'a RunConfig) -> Self {
        Ctx {
            cfg,
            hash: cfg.hash(),
            rules: HeadRuleTable::semantic(),
        }
    }

    fn out(&self, name: &str) -> PathBuf {
        self.cfg.paths.out.join(name)
    }

    fn header(&self, kind: &str, table: &str) -> Header {
        let mut h = Header::new(kind, self.cfg.seed, table);
        h.extra.insert("config".into(), self.hash.clone());
        h
    }

    fn create(&self, name: &str) -> Result<BufWriter<File>> {
        std::fs::create_dir_all(&self.cfg.paths.out)
            .with_context(|| format!("creating {}", self.cfg.paths.out.display()))?;
        let path = self.out(name);
        let f = File::create(&path).with_context(|| format!("creating {}", path.display()))?;
        Ok(BufWriter::new(f))
    }

    fn open(&self, name: &str) -> Result<BufReader<File>> {
        let path = self.out(name);
        let f = File::open(&path).with_context(|| format!("opening {}", path.display()))?;
        Ok(BufReader::new(f))
    }

    fn graph(&self) -> Result<WordNetGraph> {
        let dir = required(&self.cfg.paths.wordnet_dir, "WordNet directory")?;
        load_wordnet(dir).with_context(|| format!("loading WordNet from {}", dir.display()))
    }

    fn ic(&self, g: &WordNetGraph) -> Result<IcTable> {
        match &self.cfg.paths.ic_counts {
            Some(p) => IcTable::from_counts_file(p).context("reading IC counts"),
            None => Ok(IcTable::intrinsic(g)),
        }
    }

    fn load_table(path: &Path, format: definnet::embed_store::Format) -> Result<EmbeddingTable> {
        let mut t = EmbeddingTable::load(path, format)
            .with_context(|| format!("loading embeddings {}", path.display()))?;
        let name = path
            .file_stem()
            .map_or_else(|| "table".to_owned(), |s| s.to_string_lossy().into_owned());
        t.set_name(name);
        Ok(t)
    }

    fn table(&self) -> Result<EmbeddingTable> {
        let path = required(&self.cfg.paths.embeddings, "embeddings file")?;
        Self::load_table(path, self.cfg.embeddings_format()?)
    }

    /// The n-gram table and the word space it lives in, when configured.
    fn ngram_space(&self) -> Result<Option<(EmbeddingTable, EmbeddingTable, NgramComposer)>> {
        let p = &self.cfg.paths;
        let (Some(grams), Some(words)) = (&p.ngrams, &p.ngram_embeddings) else {
            return Ok(None);
        };
        let fmt = self.cfg.ngram_format()?;
        let composer = NgramComposer {
            n: p.ngram_n,
            boundary_markers: p.ngram_boundary_markers,
        };
        Ok(Some((
            Self::load_table(grams, fmt)?,
            Self::load_table(words, fmt)?,
            composer,
        )))
    }

    fn model(&self) -> Result<DennModel> {
        let path = self.cfg.model_path();
        load_model(&path).with_context(|| format!("loading model {}", path.display()))
    }

    fn records(&self, name: &str, kind: &str) -> Result<Vec<WordRecord>> {
        let (_, r) =
            read_records(self.open(name)?, kind, &self.rules).with_context(|| format!("reading {name}"))?;
        Ok(r)
    }

    fn write_records(&self, name: &str, kind: &str, table: &str, records: &[WordRecord]) -> Result<()> {
        let mut w = self.create(name)?;
        datasets::write_records(&mut w, &self.header(kind, table), records)?;
        w.flush()?;
        Ok(())
    }

    fn lists(&self, scope: &str, m: Measure) -> Result<Vec<PairList>> {
        let name = format!("lists_{scope}_{m}.tsv");
        let (_, lists) =
            read_lists(self.open(&name)?, &self.rules).with_context(|| format!("reading {name}"))?;
        Ok(lists)
    }
}

pub fn cmd_ingest(ctx: &Ctx) -> Result<()> {
    let defs = existing(required(&ctx.cfg.paths.defs, "definitions corpus")?)?;
    let g = ctx.graph()?;
    let (corpus, mut rejects) = read_corpus_file(defs).context("reading definitions corpus")?;
    let seen = corpus.len() + rejects.len();
    let (records, more) = ingest(&corpus, &g, &ctx.rules);
    rejects.extend(more);
    if seen == 0 {
        log::warn!("definitions corpus {} is empty", defs.display());
    }
    for r in &rejects {
        log::debug!("rejected line {}: {}", r.line, r.reason);
    }
    let fraction = if seen == 0 {
        0.0
    } else {
        rejects.len() as f64 / seen as f64
    };
    log::info!("{} records, {} rejected of {seen}", records.len(), rejects.len());
    if fraction > ctx.cfg.datasets.max_reject_fraction {
        bail!(
            "{} of {seen} records rejected, above the {} threshold",
            rejects.len(),
            ctx.cfg.datasets.max_reject_fraction
        );
    }
    ctx.write_records("records.tsv", "records", "-", &records)?;
    println!("records\t{}\nrejected\t{}", records.len(), rejects.len());
    Ok(())
}

fn dedupe(records: impl IntoIterator<Item = WordRecord>) -> Vec<WordRecord> {
    let mut seen = BTreeSet::new();
    records
        .into_iter()
        .filter(|r| seen.insert((r.word.clone(), r.pos)))
        .collect()
}

pub fn cmd_build_datasets(ctx: &Ctx) -> Result<()> {
    let cfg = ctx.cfg;
    let seeds = Seeds::new(cfg.seed);
    let records = ctx.records("records.tsv", "records")?;
    let table = ctx.table()?;
    let g = ctx.graph()?;
    let ic = ctx.ic(&g)?;
    let ngram = ctx.ngram_space()?;
    let split = split_iv_oov(&g, &table, cfg.datasets.require_example);
    log::info!("{} IV and {} OOV lemmas", split.iv.len(), split.oov.len());

    let iv_records = dedupe(records.iter().filter(|r| split.is_iv(&r.word, r.pos)).cloned());
    let direct = direct_candidates(&iv_records, &table);
    let (train_set, test_set) = build_direct_sets(&direct, cfg.datasets.split_ratio, seeds.split)?;
    ctx.write_records("train.tsv", "train", table.name(), &train_set)?;
    ctx.write_records("test.tsv", "test", table.name(), &test_set)?;

    // every OOV word must be scorable by all predictors
    let oov_records = dedupe(
        records
            .iter()
            .filter(|r| {
                split.is_oov(&r.word, r.pos)
                    && r.head_in(&table)
                    && head_baseline(&g, &table, &r.word, r.pos).is_ok()
                    && ngram
                        .as_ref()
                        .is_none_or(|(grams, _, c)| c.compose(grams, &r.word).is_ok())
            })
            .cloned(),
    );
    let oov_pairs = build_pairs(
        &oov_records,
        &split,
        &g,
        &ic,
        cfg.datasets.oov_pairs,
        seeds.oov_pairs,
    )?;
    let iv_pairs = build_pairs(&direct, &split, &g, &ic, cfg.datasets.iv_pairs, seeds.iv_pairs)?;
    let mut counts = vec![
        ("train".to_owned(), train_set.len()),
        ("test".to_owned(), test_set.len()),
    ];
    for (scope, pairs) in [("oov", &oov_pairs), ("iv", &iv_pairs)] {
        let mut w = ctx.create(&format!("pairs_{scope}.tsv"))?;
        datasets::write_pairs(&mut w, &ctx.header("pairs", table.name()), pairs)?;
        w.flush()?;
        counts.push((format!("pairs_{scope}"), pairs.len()));
        for m in Measure::ALL {
            let (lists, _) = build_lists(
                pairs,
                m,
                cfg.datasets.list_size,
                cfg.datasets.delta(m),
                seeds.lists,
            )?;
            let mut w = ctx.create(&format!("lists_{scope}_{m}.tsv"))?;
            datasets::write_lists(&mut w, &ctx.header("lists", table.name()), &lists)?;
            w.flush()?;
            counts.push((format!("lists_{scope}_{m}"), lists.len()));
        }
    }
    for (name, n) in counts {
        println!("{name}\t{n}");
    }
    Ok(())
}

fn examples(
    records: &[WordRecord],
    table: &EmbeddingTable,
    model: &definnet::denn::DennConfig,
) -> Result<Vec<TrainExample>> {
    let mut out = Vec::with_capacity(records.len());
    for r in records {
        let target = table
            .lookup(&r.word)
            .with_context(|| format!("training word {:?} has no vector", r.word))?;
        let (vec_h, vec_m, [pos_h, pos_m, pos_c]) = pair_input(model, table, &r.pair, penn_tag(r.pos))?;
        out.push(TrainExample {
            vec_h,
            vec_m,
            pos_h,
            pos_m,
            pos_c,
            target: target.to_vec(),
        });
    }
    Ok(out)
}

pub fn cmd_train(ctx: &Ctx) -> Result<()> {
    let seeds = Seeds::new(ctx.cfg.seed);
    let records = ctx.records("train.tsv", "train")?;
    let table = ctx.table()?;
    let config = ctx.cfg.denn_config(table.dim(), seeds.model);
    let data = examples(&records, &table, &config)?;
    let mut model = DennModel::new(config)?;
    let report = train(&mut model, &data, &ctx.cfg.train_options(seeds.train)?)?;
    let path = ctx.cfg.model_path();
    if let Some(dir) = path.parent() {
        std::fs::create_dir_all(dir)?;
    }
    save_model(&model, &path).with_context(|| format!("writing {}", path.display()))?;
    let mut w = ctx.create("train_trace.tsv")?;
    ctx.header("trace", table.name()).write(&mut w)?;
    writeln!(w, "# examples: {}", data.len())?;
    writeln!(w, "# zero_norm_outputs: {}", report.zero_norm_outputs)?;
    writeln!(w, "epoch\tloss")?;
    for (i, l) in report.epoch_losses.iter().enumerate() {
        writeln!(w, "{}\t{l}", i + 1)?;
    }
    w.flush()?;
    if let Some(l) = report.epoch_losses.last() {
        println!("examples\t{}\nfinal_loss\t{l}", data.len());
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Which {
    Direct,
    Auc,
    IvCorr,
    OovCorr,
}

fn pos_groups() -> [(&'static str, Option<Pos>); 3] {
    [("all", None), ("n", Some(Pos::Noun)), ("v", Some(Pos::Verb))]
}

/// A report file: `[section]` lines followed by tab-separated rows.
struct Report {
    body: String,
    human: String,
}

impl Report {
    fn new() -> Self {
        Report {
            body: String::new(),
            human: String::new(),
        }
    }

    fn section(&mut self, name: &str, columns: &str) {
        let _ = writeln!(self.body, "[{name}]\n{columns}");
    }

    fn row(&mut self, row: String) {
        self.body.push_str(&row);
        self.body.push('\n');
    }

    fn save(self, ctx: &Ctx, name: &str, table: &str) -> Result<()> {
        let mut w = ctx.create(name)?;
        ctx.header(name, table).write(&mut w)?;
        w.write_all(self.body.as_bytes())?;
        w.flush()?;
        let mut h = ctx.create(&format!("{name}.txt"))?;
        ctx.header(&format!("{name}.txt"), table).write(&mut h)?;
        h.write_all(self.human.as_bytes())?;
        h.flush()?;
        print!("{}", self.human);
        Ok(())
    }
}

fn wilcoxon_rows(report: &mut Report, label: &str, columns: &[(String, Vec<Option<f64>>)]) {
    for (i, (na, a)) in columns.iter().enumerate() {
        for (j, (nb, b)) in columns.iter().enumerate() {
            if i == j {
                continue;
            }
            let (x, y) = paired(a, b);
            match wilcoxon_one_sided(&x, &y) {
                Ok(t) => report.row(format!(
                    "{label}\t{na}\t{nb}\t{}\t{}\t{:e}\t{}",
                    t.n,
                    t.w_plus,
                    t.p,
                    t.p < ALPHA
                )),
                Err(e) => report.row(format!("{label}\t{na}\t{nb}\t{}\t-\t-\t{e}", x.len())),
            }
        }
    }
}

const WILCOXON_COLUMNS: &str = "group\tbetter\tworse\tn\tw_plus\tp\tsignificant";

fn eval_direct(ctx: &Ctx) -> Result<()> {
    let test = ctx.records("test.tsv", "test")?;
    let table = ctx.table()?;
    let g = ctx.graph()?;
    let model = ctx.model()?;
    let predictors: Vec<Box<dyn Predictor + '_>> = vec![
        Box::new(DefinnetPredictor {
            model: &model,
            table: &table,
        }),
        Box::new(AdditivePredictor { table: &table }),
        Box::new(HeadPredictor {
            graph: &g,
            table: &table,
        }),
    ];
    let reports: Vec<_> = predictors
        .iter()
        .map(|p| direct_eval(p.as_ref(), &test, &table))
        .collect();
    let mut out = Report::new();
    out.section("summary", "model\tpos\tn\tmean\tstd\texcluded");
    let _ = writeln!(out.human, "direct evaluation on {} test words", test.len());
    for (label, pos) in pos_groups() {
        for r in &reports {
            let r = pos.map_or_else(|| r.clone(), |p| r.for_pos(p));
            out.row(format!(
                "{}\t{label}\t{}\t{}\t{}\t{}",
                r.model, r.summary.n, r.summary.mean, r.summary.std, r.excluded
            ));
            let _ = writeln!(
                out.human,
                "  {:<9} {label:<4} {:.3} (±{:.3})  n={}",
                r.model, r.summary.mean, r.summary.std, r.summary.n
            );
        }
    }
    out.section("wilcoxon", WILCOXON_COLUMNS);
    for (label, pos) in pos_groups() {
        let columns: Vec<(String, Vec<Option<f64>>)> = reports
            .iter()
            .map(|r| {
                let r = pos.map_or_else(|| r.clone(), |p| r.for_pos(p));
                (r.model.clone(), r.values())
            })
            .collect();
        wilcoxon_rows(&mut out, label, &columns);
    }
    let names: Vec<&str> = reports.iter().map(|r| r.model.as_str()).collect();
    out.section("items", &format!("word\tpos\t{}", names.join("\t")));
    for (i, r) in test.iter().enumerate() {
        let vals: Vec<String> = reports.iter().map(|rep| fmt_value(rep.items[i].cosine)).collect();
        out.row(format!("{}\t{}\t{}", r.word, r.pos, vals.join("\t")));
    }
    out.save(ctx, "table1.direct", table.name())
}

fn eval_auc(ctx: &Ctx) -> Result<()> {
    let table = ctx.table()?;
    let ngram = ctx.ngram_space()?;
    let (_, pairs) = read_pairs(ctx.open("pairs_iv.tsv")?, &ctx.rules).context("reading pairs_iv.tsv")?;
    let mut spaces: Vec<(&str, &EmbeddingTable)> = vec![(table.name(), &table)];
    if let Some((_, words, _)) = &ngram {
        spaces.push((words.name(), words));
    }
    let mut out = Report::new();
    out.section("summary", "space\tpos\tn_sister\tn_random\tauc\texcluded");
    let _ = writeln!(out.human, "sister-term AUC on {} IV pairs", pairs.len());
    let mut item_cols = Vec::new();
    for (name, t) in &spaces {
        let p = OraclePredictor { table: t };
        for (label, pos) in pos_groups() {
            let subset: Vec<WordPair> = pairs
                .iter()
                .filter(|x| pos.is_none_or(|p| x.w1.pos == p))
                .cloned()
                .collect();
            let rep = auc_eval(&p, &subset, t);
            let count = |rel| {
                rep.scores
                    .iter()
                    .zip(&rep.relations)
                    .filter(|(s, r)| s.is_some() && **r == rel)
                    .count()
            };
            out.row(format!(
                "{name}\t{label}\t{}\t{}\t{}\t{}",
                count(Relation::Sister),
                count(Relation::Random),
                fmt_value(rep.auc),
                rep.excluded
            ));
            let _ = writeln!(
                out.human,
                "  {name:<16} {label:<4} auc {}",
                rep.auc.map_or("-".into(), |a| format!("{a:.3}"))
            );
            if pos.is_none() {
                item_cols.push(rep.scores);
            }
        }
    }
    let names: Vec<&str> = spaces.iter().map(|s| s.0).collect();
    out.section("items", &format!("w1\tpos\tw2\trelation\t{}", names.join("\t")));
    for (i, x) in pairs.iter().enumerate() {
        let vals: Vec<String> = item_cols.iter().map(|c| fmt_value(c[i])).collect();
        out.row(format!(
            "{}\t{}\t{}\t{}\t{}",
            x.w1.word,
            x.w1.pos,
            x.w2,
            x.relation,
            vals.join("\t")
        ));
    }
    out.save(ctx, "table2.auc", table.name())
}

fn correlation_rows(out: &mut Report, measure: Measure, reports: &[CorrelationReport]) {
    for r in reports {
        out.row(format!(
            "{}\t{measure}\t{}\t{}\t{}\t{}\t{}",
            r.model, r.summary.n, r.summary.mean, r.summary.std, r.unusable, r.undefined
        ));
        let _ = writeln!(
            out.human,
            "  {:<16} {measure:<4} {:.3} (±{:.3})  lists={}",
            r.model, r.summary.mean, r.summary.std, r.summary.n
        );
    }
}

const CORRELATION_COLUMNS: &str = "model\tmeasure\tlists\tmean\tstd\tunusable\tundefined";

fn eval_correlation(ctx: &Ctx, measures: &[Measure], oov: bool) -> Result<()> {
    let table = ctx.table()?;
    let ngram = ctx.ngram_space()?;
    let g;
    let model;
    let mut predictors: Vec<(Box<dyn Predictor + '_>, &EmbeddingTable)> = Vec::new();
    if oov {
        g = ctx.graph()?;
        model = ctx.model()?;
        predictors.push((Box::new(AdditivePredictor { table: &table }), &table));
        predictors.push((
            Box::new(HeadPredictor {
                graph: &g,
                table: &table,
            }),
            &table,
        ));
        if let Some((grams, words, composer)) = &ngram {
            predictors.push((
                Box::new(NgramPredictor {
                    ngrams: grams,
                    composer: *composer,
                }),
                words,
            ));
        }
        predictors.push((
            Box::new(DefinnetPredictor {
                model: &model,
                table: &table,
            }),
            &table,
        ));
    } else {
        predictors.push((Box::new(OraclePredictor { table: &table }), &table));
        if let Some((_, words, _)) = &ngram {
            predictors.push((Box::new(OraclePredictor { table: words }), words));
        }
    }
    let names: Vec<String> = predictors
        .iter()
        .map(|(p, t)| {
            if oov {
                p.name().to_owned()
            } else {
                t.name().to_owned()
            }
        })
        .collect();
    let scope = if oov { "oov" } else { "iv" };
    let mut summary = Report::new();
    summary.section("summary", CORRELATION_COLUMNS);
    let mut tests = Report::new();
    tests.section("wilcoxon", WILCOXON_COLUMNS);
    let mut lists_out = Report::new();
    lists_out.section("lists", &format!("list\tmeasure\t{}", names.join("\t")));
    let _ = writeln!(summary.human, "Spearman correlation over {scope} lists");
    for &m in measures {
        let lists = ctx.lists(scope, m)?;
        let reports: Vec<CorrelationReport> = predictors
            .iter()
            .zip(&names)
            .map(|((p, t), name)| {
                let mut r = indirect_eval(p.as_ref(), &lists, t);
                r.model = name.clone();
                r.measure = m;
                r
            })
            .collect();
        correlation_rows(&mut summary, m, &reports);
        let columns: Vec<(String, Vec<Option<f64>>)> =
            reports.iter().map(|r| (r.model.clone(), r.rhos())).collect();
        wilcoxon_rows(&mut tests, m.name(), &columns);
        for i in 0..lists.len() {
            let vals: Vec<String> = reports.iter().map(|r| fmt_value(r.per_list[i].rho())).collect();
            lists_out.row(format!("{i}\t{m}\t{}", vals.join("\t")));
        }
    }
    let mut out = summary;
    out.body.push_str(&tests.body);
    out.body.push_str(&lists_out.body);
    let name = if oov { "table4.oov-corr" } else { "table3.iv-corr" };
    out.save(ctx, name, table.name())
}

pub fn cmd_eval(ctx: &Ctx, which: Which, measure: Option<Measure>) -> Result<()> {
    let measures: Vec<Measure> = measure.map_or_else(|| Measure::ALL.to_vec(), |m| vec![m]);
    match which {
        Which::Direct => eval_direct(ctx),
        Which::Auc => eval_auc(ctx),
        Which::IvCorr => eval_correlation(ctx, &measures, false),
        Which::OovCorr => eval_correlation(ctx, &measures, true),
    }
}

pub fn cmd_infer(ctx: &Ctx, word: Option<&str>, parse: Option<&str>, pos: Option<Pos>) -> Result<()> {
    let rules = &ctx.rules;
    let (label, pair, pos) = match (word, parse) {
        (_, Some(text)) => {
            let pos = pos.ok_or_else(|| UsageError("--parse needs --pos".into()))?;
            let tree = parse_ptb(text).map_err(|e| UsageError(format!("bad parse: {e}")))?;
            let pair = extract_pair(&tree, rules)?;
            (word.unwrap_or("-").to_owned(), pair, pos)
        }
        (Some(w), None) => {
            let defs = existing(required(&ctx.cfg.paths.defs, "definitions corpus")?)?;
            let (corpus, _) = read_corpus_file(defs)?;
            let rec = corpus
                .iter()
                .find(|r| r.word == w && pos.is_none_or(|p| r.pos == p))
                .with_context(|| format!("no definition of {w:?} in {}", defs.display()))?;
            (w.to_owned(), extract_pair(&rec.parse, rules)?, rec.pos)
        }
        (None, None) => return Err(UsageError("infer needs --word or --parse".into()).into()),
    };
    let model = ctx.model()?;
    let table = ctx.table()?;
    let v = predict_oov(&model, &table, &pair, penn_tag(pos))?;
    eprintln!(
        "pair: {} {} / {} {}",
        pair.w_h,
        pair.pos_h,
        pair.w_m.as_deref().unwrap_or("-"),
        pair.pos_m.as_deref().unwrap_or("-")
    );
    let values: Vec<String> = v.iter().map(|x| format!("{x:?}")).collect();
    println!("{label} {}", values.join(" "));
    Ok(())
}
