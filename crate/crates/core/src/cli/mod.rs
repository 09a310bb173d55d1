//! The `newsratio` command-line tool.
//!
//! Global flags: `--config <run.toml>`, `--out <dir or file>`, `--seed`,
//! `--threads`. When `--out` names a file (it has an extension) the primary
//! table of the subcommand goes there and any secondary outputs go next to
//! it; otherwise `--out` is the output directory. Failures print a JSON
//! object `{"error": kind, "message": ...}` on stderr and exit with status 1;
//! usage errors exit with status 2.

mod commands;
pub mod config;
pub mod report;

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

pub use config::{Problems, RunConfig};

use crate::error::{Error, Result};

#[derive(Debug, Parser)]
#[command(name = "newsratio", version, about = "News-ratio market predictability toolkit")]
pub struct Cli {
    /// Run configuration (TOML); flags override its values
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output directory, or primary output file when the path has an extension
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for simulate and oracle
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Worker threads for parallel stages (default: all cores)
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Count labeled headlines per period; write counts, ratios and summary statistics
    Ingest(IngestArgs),
    /// Label headlines with the lexicon or an LLM endpoint
    Classify(ClassifyArgs),
    /// Turn a counts file into news ratios
    Ratios(RatiosArgs),
    /// In-sample predictive regressions over several horizons
    Insample(InsampleArgs),
    /// Recursive out-of-sample forecasts, combinations and evaluation
    Oos(OosArgs),
    /// Mean-variance allocation backtest against the historical mean
    Backtest(BacktestArgs),
    /// Regress next-period macro proxies on the signals
    Macro(MacroArgs),
    /// State-dependent predictive regressions
    Interact(InteractArgs),
    /// Embedding novelty and similarity state
    Novelty(NoveltyArgs),
    /// Generate a synthetic corpus and returns
    Simulate(SimulateArgs),
    /// Check every estimator against brute-force oracles
    Oracle(OracleArgs),
}

#[derive(Debug, Clone, Args)]
pub struct IngestArgs {
    /// Headlines (JSON lines)
    #[arg(long)]
    pub headlines: Option<PathBuf>,
    /// Labels CSV
    #[arg(long)]
    pub labels: Option<PathBuf>,
    /// monthly, weekly or quarterly
    #[arg(long)]
    pub frequency: Option<String>,
    /// Label source to count when the file mixes runs
    #[arg(long)]
    pub source: Option<String>,
    /// Prompt id to count when the file mixes runs
    #[arg(long)]
    pub prompt_id: Option<String>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Backend {
    Lexicon,
    Llm,
}

#[derive(Debug, Clone, Args)]
pub struct ClassifyArgs {
    #[arg(long, value_enum, default_value = "lexicon")]
    pub backend: Backend,
    /// Prompt id (LLM: baseline, optimism, positivity, goodbad)
    #[arg(long)]
    pub prompt: Option<String>,
    #[arg(long)]
    pub headlines: Option<PathBuf>,
    /// Positive term list (with --lexicon-negative; default: bundled)
    #[arg(long)]
    pub lexicon_positive: Option<PathBuf>,
    #[arg(long)]
    pub lexicon_negative: Option<PathBuf>,
    /// Endpoint config (JSON) for the LLM backend
    #[arg(long)]
    pub endpoint: Option<PathBuf>,
    /// Response cache (JSON lines); default `llm_cache.jsonl` in the output directory
    #[arg(long)]
    pub cache: Option<PathBuf>,
    /// Also write a term-frequency report per label
    #[arg(long)]
    pub terms: bool,
    /// Minimum stem count kept in the term report
    #[arg(long, default_value_t = crate::classify::DEFAULT_MIN_COUNT)]
    pub min_count: u64,
}

#[derive(Debug, Clone, Args)]
pub struct RatiosArgs {
    #[arg(long)]
    pub counts: Option<PathBuf>,
}

/// Returns, signals and their column names.
#[derive(Debug, Clone, Args)]
pub struct SeriesArgs {
    /// Returns table: `period,ret[,rf]` (ret is the excess return)
    #[arg(long)]
    pub returns: Option<PathBuf>,
    /// Table holding the signal columns (e.g. a ratios file)
    #[arg(long)]
    pub ratios: Option<PathBuf>,
    /// Signal columns, comma separated
    #[arg(long, value_delimiter = ',')]
    pub signal: Vec<String>,
    #[arg(long)]
    pub returns_column: Option<String>,
    #[arg(long)]
    pub rf_column: Option<String>,
}

#[derive(Debug, Clone, Args)]
pub struct InsampleArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Horizons in periods, comma separated
    #[arg(long, value_delimiter = ',')]
    pub horizons: Vec<usize>,
    /// Table of control variables
    #[arg(long)]
    pub controls: Option<PathBuf>,
    /// Use the first k principal components of the controls
    #[arg(long)]
    pub pcs: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OosArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Last period of the initial training sample
    #[arg(long)]
    pub train_end: Option<String>,
    /// Combinations of the signal forecasts: mc, imc, iwc
    #[arg(long, value_delimiter = ',')]
    pub combine: Vec<String>,
    #[arg(long)]
    pub min_train: Option<usize>,
    /// Discount factor for IWC member errors
    #[arg(long)]
    pub discount: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    #[arg(long)]
    pub train_end: Option<String>,
    /// Forecast to trade: a signal name or mc, imc, iwc over all signals
    #[arg(long)]
    pub forecast: Option<String>,
    /// Risk aversion values, comma separated
    #[arg(long, value_delimiter = ',')]
    pub gamma: Vec<f64>,
    /// Proportional transaction cost in basis points
    #[arg(long)]
    pub tc_bp: Option<f64>,
    /// Weight bounds `lo,hi`
    #[arg(long)]
    pub bounds: Option<String>,
    /// Trailing periods for the variance estimate
    #[arg(long)]
    pub window: Option<usize>,
    #[arg(long)]
    pub min_train: Option<usize>,
    #[arg(long)]
    pub discount: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct MacroArgs {
    /// Table of macro proxies
    #[arg(long = "macro")]
    pub macro_proxies: Option<PathBuf>,
    /// Proxy columns (default: all)
    #[arg(long, value_delimiter = ',')]
    pub proxies: Vec<String>,
    #[arg(long)]
    pub ratios: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub signal: Vec<String>,
}

#[derive(Debug, Clone, Args)]
pub struct InteractArgs {
    #[command(flatten)]
    pub series: SeriesArgs,
    /// Table of state variables
    #[arg(long)]
    pub state: Option<PathBuf>,
    /// State columns (default: all)
    #[arg(long, value_delimiter = ',')]
    pub states: Vec<String>,
    #[arg(long, value_delimiter = ',')]
    pub horizons: Vec<usize>,
    /// Trailing window for the high-state dummy
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct NoveltyArgs {
    /// Embeddings: `.jsonl` or a binary file with a `.json` sidecar
    #[arg(long)]
    pub embeddings: Option<PathBuf>,
    #[arg(long)]
    pub lookback: Option<usize>,
    /// pearson or cosine
    #[arg(long)]
    pub similarity: Option<String>,
    /// Trailing window for the high-similarity dummy
    #[arg(long)]
    pub window: Option<usize>,
    /// Keep only headlines matching the economic keyword list
    #[arg(long)]
    pub economic: bool,
    /// Headlines used by --economic
    #[arg(long)]
    pub headlines: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    Default,
    Strong,
    Null,
}

#[derive(Debug, Clone, Args)]
pub struct SimulateArgs {
    /// Output directory (same as --out)
    #[arg(long)]
    pub out_dir: Option<PathBuf>,
    /// Starting parameters when no DGP config is given
    #[arg(long, value_enum, default_value = "default")]
    pub preset: Preset,
    #[arg(long)]
    pub periods: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub fixtures: Option<usize>,
    /// Multiplier on every tolerance
    #[arg(long)]
    pub tolerance_scale: Option<f64>,
}

/// Where a subcommand writes.
#[derive(Debug, Clone)]
pub struct OutputTarget {
    pub dir: PathBuf,
    pub file: Option<PathBuf>,
}

impl OutputTarget {
    pub fn resolve(flag: Option<&Path>, cfg: Option<&Path>) -> Self {
        match flag {
            Some(p) if p.extension().is_some() => Self {
                dir: p
                    .parent()
                    .filter(|d| !d.as_os_str().is_empty())
                    .map(Path::to_path_buf)
                    .unwrap_or_else(|| PathBuf::from(".")),
                file: Some(p.to_path_buf()),
            },
            Some(p) => Self {
                dir: p.to_path_buf(),
                file: None,
            },
            None => Self {
                dir: cfg.map(Path::to_path_buf).unwrap_or_else(|| PathBuf::from("out")),
                file: None,
            },
        }
    }

    /// Path of the primary output.
    pub fn primary(&self, default_name: &str) -> PathBuf {
        self.file.clone().unwrap_or_else(|| self.dir.join(default_name))
    }

    pub fn aux(&self, name: &str) -> PathBuf {
        self.dir.join(name)
    }

    pub fn create(&self) -> Result<()> {
        std::fs::create_dir_all(&self.dir).map_err(|e| Error::io(&self.dir, e))
    }
}

/// Machine-readable error report.
pub fn error_json(e: &Error) -> String {
    let mut v = serde_json::json!({ "error": e.kind(), "message": e.to_string() });
    if let Error::Config(problems) | Error::OracleFailure(problems) = e {
        v["problems"] = serde_json::json!(problems);
    }
    v.to_string()
}

/// Executes a parsed command line.
pub fn execute(cli: &Cli) -> Result<()> {
    let work = || commands::dispatch(cli);
    match cli.threads {
        Some(0) => Err(Error::Config(vec!["threads: must be at least 1".into()])),
        Some(n) => rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build()
            .map_err(|e| Error::Config(vec![format!("threads: {e}")]))?
            .install(work),
        None => work(),
    }
}

/// Parses `args` (including the program name) and runs; returns the exit status.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    match execute(&cli) {
        Ok(()) => 0,
        Err(e) => {
            eprintln!("{}", error_json(&e));
            1
        }
    }
}
