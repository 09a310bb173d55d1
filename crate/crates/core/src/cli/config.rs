//! Declarative run configuration (TOML) with command-line overrides.
//!
//! ```toml
//! [paths]
//! returns = "returns.csv"
//! ratios = "ratios.csv"
//!
//! [analysis]
//! signals = ["nr_good", "nr_bad"]
//! horizons = [0, 1, 3, 6, 9, 12]
//! train_end = "2005-12"
//!
//! [output]
//! dir = "out"
//! ```
//!
//! Relative paths are resolved against the directory of the config file.

use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Paths {
    pub headlines: Option<PathBuf>,
    pub labels: Option<PathBuf>,
    pub counts: Option<PathBuf>,
    pub returns: Option<PathBuf>,
    pub ratios: Option<PathBuf>,
    #[serde(rename = "macro")]
    pub macro_proxies: Option<PathBuf>,
    pub state: Option<PathBuf>,
    pub controls: Option<PathBuf>,
    pub embeddings: Option<PathBuf>,
    pub lexicon_positive: Option<PathBuf>,
    pub lexicon_negative: Option<PathBuf>,
    pub endpoint: Option<PathBuf>,
    pub cache: Option<PathBuf>,
    pub dgp: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Analysis {
    pub frequency: Option<String>,
    pub signals: Option<Vec<String>>,
    pub horizons: Option<Vec<usize>>,
    pub train_end: Option<String>,
    pub min_train: Option<usize>,
    pub combine: Option<Vec<String>>,
    pub discount: Option<f64>,
    pub gammas: Option<Vec<f64>>,
    pub tc_bp: Option<f64>,
    pub bounds: Option<(f64, f64)>,
    pub variance_window: Option<usize>,
    pub dummy_window: Option<usize>,
    pub lookback: Option<usize>,
    pub similarity: Option<String>,
    pub pcs: Option<usize>,
    pub returns_column: Option<String>,
    pub rf_column: Option<String>,
    pub source: Option<String>,
    pub prompt_id: Option<String>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Output {
    pub dir: Option<PathBuf>,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default)]
    pub paths: Paths,
    #[serde(default)]
    pub analysis: Analysis,
    #[serde(default)]
    pub output: Output,
}

impl RunConfig {
    pub fn from_toml(text: &str, base: &Path) -> Result<Self> {
        let mut cfg: Self = toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
        cfg.resolve(base);
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let base = path.parent().unwrap_or(Path::new("."));
        Self::from_toml(&text, base)
    }

    fn resolve(&mut self, base: &Path) {
        let p = &mut self.paths;
        for slot in [
            &mut p.headlines,
            &mut p.labels,
            &mut p.counts,
            &mut p.returns,
            &mut p.ratios,
            &mut p.macro_proxies,
            &mut p.state,
            &mut p.controls,
            &mut p.embeddings,
            &mut p.lexicon_positive,
            &mut p.lexicon_negative,
            &mut p.endpoint,
            &mut p.cache,
            &mut p.dgp,
            &mut self.output.dir,
        ] {
            if let Some(path) = slot.as_mut() {
                if path.is_relative() {
                    *path = base.join(&*path);
                }
            }
        }
    }
}

/// Collects every configuration problem before failing.
#[derive(Debug, Default)]
pub struct Problems(Vec<String>);

impl Problems {
    pub fn push(&mut self, msg: impl Into<String>) {
        self.0.push(msg.into());
    }

    /// Input file from a flag or the config; must exist.
    pub fn input(&mut self, what: &str, flag: Option<&PathBuf>, cfg: Option<&PathBuf>) -> Option<PathBuf> {
        match flag.or(cfg) {
            None => {
                self.push(format!("{what}: no path given (flag --{what} or [paths].{what})"));
                None
            }
            Some(p) if !p.is_file() => {
                self.push(format!("{what}: file `{}` does not exist", p.display()));
                None
            }
            Some(p) => Some(p.clone()),
        }
    }

    /// Like [`Problems::input`] but absent is fine.
    pub fn optional_input(&mut self, what: &str, flag: Option<&PathBuf>, cfg: Option<&PathBuf>) -> Option<PathBuf> {
        match flag.or(cfg) {
            Some(p) if !p.is_file() => {
                self.push(format!("{what}: file `{}` does not exist", p.display()));
                None
            }
            other => other.cloned(),
        }
    }

    /// Parses with `FromStr`, recording a problem on failure.
    pub fn parse<T: std::str::FromStr>(&mut self, what: &str, raw: &str) -> Option<T>
    where
        T::Err: std::fmt::Display,
    {
        match raw.parse() {
            Ok(v) => Some(v),
            Err(e) => {
                self.push(format!("{what}: {e}"));
                None
            }
        }
    }

    pub fn check(&mut self, ok: bool, msg: impl Into<String>) {
        if !ok {
            self.push(msg);
        }
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(self.0))
        }
    }
}
