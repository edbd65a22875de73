//! `definnet`: builds the datasets, trains the network and runs the
//! evaluations.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for failed runs
//! (missing or malformed inputs), 3 when training diverges.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use definnet::denn::TrainError;
use definnet::wordnet::{Measure, Pos};

use crate::commands::{Ctx, Which};
use crate::config::RunConfig;

#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

#[derive(Debug, Parser)]
#[command(
    name = "definnet",
    version,
    args_override_self = true,
    about = "Embeddings for out-of-vocabulary words from their definitions"
)]
struct Cli {
    /// TOML run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    #[arg(long, global = true)]
    wordnet_dir: Option<PathBuf>,
    #[arg(long, global = true)]
    embeddings: Option<PathBuf>,
    /// Parsed definitions corpus.
    #[arg(long, global = true)]
    defs: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true)]
    epochs: Option<usize>,
    /// Embedding file format: `binary` or `text`.
    #[arg(long, global = true)]
    format: Option<String>,
    /// Checkpoint path.
    #[arg(long, global = true)]
    model: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reads the definitions corpus and extracts a pair per definition.
    Ingest,
    /// Splits the records and builds the pair files and lists.
    BuildDatasets,
    /// Trains the network on the training split.
    Train,
    /// Writes one results table.
    Eval {
        #[arg(value_enum)]
        which: Which,
        /// Restrict correlation tables to one measure.
        #[arg(long)]
        measure: Option<Measure>,
    },
    /// Prints the predicted vector of one defined word.
    Infer {
        #[arg(long)]
        word: Option<String>,
        /// Bracketed parse of a definition.
        #[arg(long)]
        parse: Option<String>,
        /// Part of speech of the defined word (`n`, `v`, `a`, `r`).
        #[arg(long)]
        pos: Option<Pos>,
    },
}

fn settings(cli: &Cli) -> anyhow::Result<RunConfig> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p).map_err(|e| UsageError(format!("{e:#}")))?,
        None => RunConfig::default(),
    };
    let p = &mut cfg.paths;
    if let Some(s) = cli.seed {
        cfg.seed = s;
    }
    if let Some(d) = &cli.wordnet_dir {
        p.wordnet_dir = Some(d.clone());
    }
    if let Some(e) = &cli.embeddings {
        p.embeddings = Some(e.clone());
    }
    if let Some(d) = &cli.defs {
        p.defs = Some(d.clone());
    }
    if let Some(o) = &cli.out {
        p.out = o.clone();
    }
    if let Some(f) = &cli.format {
        p.embeddings_format = f.clone();
    }
    if let Some(m) = &cli.model {
        p.model = Some(m.clone());
    }
    if let Some(n) = cli.epochs {
        cfg.train.epochs = n;
    }
    cfg.validate().map_err(|e| UsageError(e.to_string()))?;
    Ok(cfg)
}

fn run(cli: Cli) -> anyhow::Result<()> {
    let cfg = settings(&cli)?;
    let ctx = Ctx::new(&cfg);
    match cli.command {
        Command::Ingest => commands::cmd_ingest(&ctx),
        Command::BuildDatasets => commands::cmd_build_datasets(&ctx),
        Command::Train => commands::cmd_train(&ctx),
        Command::Eval { which, measure } => commands::cmd_eval(&ctx, which, measure),
        Command::Infer { word, parse, pos } => {
            commands::cmd_infer(&ctx, word.as_deref(), parse.as_deref(), pos)
        }
    }
}

fn exit_code(e: &anyhow::Error) -> u8 {
    if e.chain().any(|c| c.is::<UsageError>()) {
        1
    } else if e
        .chain()
        .any(|c| matches!(c.downcast_ref::<TrainError>(), Some(TrainError::NonFinite { .. })))
    {
        3
    } else {
        2
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(exit_code(&e))
        }
    }
}
