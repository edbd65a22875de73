use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use definnet::datasets::default_delta;
use definnet::denn::{default_pos_vocab, DennConfig, Optimizer, TrainOptions};
use definnet::embed_store::Format;
use definnet::wordnet::Measure;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

/// Everything a run depends on besides its input files.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RunConfig {
    pub seed: u64,
    pub paths: Paths,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub datasets: DatasetConfig,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct Paths {
    pub wordnet_dir: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub embeddings_format: String,
    /// Word vectors of the n-gram model's own space.
    pub ngram_embeddings: Option<PathBuf>,
    pub ngrams: Option<PathBuf>,
    pub ngram_format: String,
    pub ngram_n: usize,
    pub ngram_boundary_markers: bool,
    pub defs: Option<PathBuf>,
    /// Corpus counts for information content; intrinsic IC when absent.
    pub ic_counts: Option<PathBuf>,
    pub out: PathBuf,
    /// Checkpoint path; `<out>/model.bin` when absent.
    pub model: Option<PathBuf>,
}

impl Default for Paths {
    fn default() -> Self {
        Paths {
            wordnet_dir: None,
            embeddings: None,
            embeddings_format: "binary".into(),
            ngram_embeddings: None,
            ngrams: None,
            ngram_format: "binary".into(),
            ngram_n: 3,
            ngram_boundary_markers: false,
            defs: None,
            ic_counts: None,
            out: PathBuf::from("out"),
            model: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModelConfig {
    pub pos_dim: usize,
    pub hidden1: usize,
    pub hidden2: usize,
    pub leaky_slope: f64,
    pub dropout_p: f64,
}

impl Default for ModelConfig {
    fn default() -> Self {
        let d = DennConfig::default();
        ModelConfig {
            pos_dim: d.pos_dim,
            hidden1: d.hidden1,
            hidden2: d.hidden2,
            leaky_slope: d.leaky_slope,
            dropout_p: d.dropout_p,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub optimizer: String,
    pub lr: f64,
    pub batch_size: usize,
    pub epochs: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        let d = TrainOptions::default();
        TrainConfig {
            optimizer: d.optimizer.to_string(),
            lr: d.lr,
            batch_size: d.batch_size,
            epochs: d.epochs,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DatasetConfig {
    pub split_ratio: f64,
    pub require_example: bool,
    /// OOV pairs to build; as many as possible when absent.
    pub oov_pairs: Option<usize>,
    pub iv_pairs: Option<usize>,
    pub list_size: usize,
    pub delta_path: f64,
    pub delta_wup: f64,
    pub delta_res: f64,
    /// Ingest aborts when more than this share of records is rejected.
    pub max_reject_fraction: f64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        DatasetConfig {
            split_ratio: 0.8,
            require_example: false,
            oov_pairs: None,
            iv_pairs: None,
            list_size: 7,
            delta_path: default_delta(Measure::Path),
            delta_wup: default_delta(Measure::Wup),
            delta_res: default_delta(Measure::Res),
            max_reject_fraction: 0.2,
        }
    }
}

impl DatasetConfig {
    pub fn delta(&self, m: Measure) -> f64 {
        match m {
            Measure::Path => self.delta_path,
            Measure::Wup => self.delta_wup,
            Measure::Res => self.delta_res,
        }
    }
}

impl RunConfig {
    /// Parses a config file. Relative paths are taken from the file's
    /// directory.
    pub fn load(path: &Path) -> Result<Self> {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading config {}", path.display()))?;
        let mut cfg = Self::from_toml(&text)?;
        let base = path.parent().unwrap_or(Path::new("."));
        cfg.paths.resolve(base);
        Ok(cfg)
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        toml::from_str(text).context("parsing config")
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }

    /// Hex SHA-256 of the canonical TOML form.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        digest.iter().map(|b| format!("{b:02x}")).collect()
    }

    pub fn validate(&self) -> Result<()> {
        self.embeddings_format()?;
        self.ngram_format()?;
        self.optimizer()?;
        let d = &self.datasets;
        if !(0.0..=1.0).contains(&d.split_ratio) {
            bail!("split_ratio must lie in [0, 1]");
        }
        if d.list_size < 2 {
            bail!("list_size must be at least 2");
        }
        Ok(())
    }

    pub fn embeddings_format(&self) -> Result<Format> {
        self.paths.embeddings_format.parse().map_err(anyhow::Error::msg)
    }

    pub fn ngram_format(&self) -> Result<Format> {
        self.paths.ngram_format.parse().map_err(anyhow::Error::msg)
    }

    pub fn optimizer(&self) -> Result<Optimizer> {
        self.train.optimizer.parse().map_err(anyhow::Error::msg)
    }

    pub fn denn_config(&self, dim: usize, seed: u64) -> DennConfig {
        DennConfig {
            dim,
            pos_vocab: default_pos_vocab(),
            pos_dim: self.model.pos_dim,
            hidden1: self.model.hidden1,
            hidden2: self.model.hidden2,
            leaky_slope: self.model.leaky_slope,
            dropout_p: self.model.dropout_p,
            seed,
        }
    }

    pub fn train_options(&self, seed: u64) -> Result<TrainOptions> {
        Ok(TrainOptions {
            optimizer: self.optimizer()?,
            lr: self.train.lr,
            batch_size: self.train.batch_size,
            epochs: self.train.epochs,
            seed,
        })
    }

    pub fn model_path(&self) -> PathBuf {
        self.paths
            .model
            .clone()
            .unwrap_or_else(|| self.paths.out.join("model.bin"))
    }
}

impl Paths {
    fn resolve(&mut self, base: &Path) {
        let fix = |p: &mut PathBuf| {
            if p.is_relative() {
                *p = base.join(&*p);
            }
        };
        for p in [
            &mut self.wordnet_dir,
            &mut self.embeddings,
            &mut self.ngram_embeddings,
            &mut self.ngrams,
            &mut self.defs,
            &mut self.ic_counts,
            &mut self.model,
        ]
        .into_iter()
        .flatten()
        {
            fix(p);
        }
        fix(&mut self.out);
    }
}
