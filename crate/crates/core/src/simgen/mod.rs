//! Synthetic markets and headline corpora, plus the brute-force oracle suite.
//!
//! All randomness comes from one ChaCha8 generator per (seed, stream), so
//! the latent signal, the return shocks and the label draws are independent
//! streams of the same seed. Changing the corpus breadth never changes the
//! simulated market.

pub mod oracles;
mod suite;

use std::ops::Range;
use std::path::Path;

use chrono::Duration;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::corpus::{HeadlineRecord, Label, LabelRecord};
use crate::error::{Error, Result};
use crate::timeseries::{Frequency, Period, PeriodSeries};

pub use suite::{oracle_suite, OracleCheck, OracleReport, OracleSettings};

pub const SOURCE: &str = "simgen";
pub const PROMPT_ID: &str = "latent";

const STREAM_SIGNAL: u64 = 1;
const STREAM_SHOCKS: u64 = 2;
const STREAM_LABELS: u64 = 3;
const STREAM_TEXT: u64 = 4;

/// Generator for one independent stream of `seed`.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Logistic link from the latent signal to label probabilities:
/// p_up = L(up_intercept + slope s), p_down = L(down_intercept - slope s),
/// the rest UNKNOWN.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct LabelLink {
    pub up_intercept: f64,
    pub down_intercept: f64,
    pub slope: f64,
}

impl Default for LabelLink {
    /// About 18% UP and 13% DOWN at s = 0.
    fn default() -> Self {
        Self {
            up_intercept: (0.18f64 / 0.82).ln(),
            down_intercept: (0.13f64 / 0.87).ln(),
            slope: 0.5,
        }
    }
}

fn logistic(x: f64) -> f64 {
    1.0 / (1.0 + (-x).exp())
}

impl LabelLink {
    /// (p_up, p_down, p_unknown), summing to one. If the two logistic
    /// probabilities exceed one together they are rescaled.
    pub fn probabilities(&self, s: f64) -> (f64, f64, f64) {
        let up = logistic(self.up_intercept + self.slope * s);
        let down = logistic(self.down_intercept - self.slope * s);
        let total = up + down;
        if total > 1.0 {
            (up / total, down / total, 0.0)
        } else {
            (up, down, 1.0 - total)
        }
    }

    /// A link whose probabilities do not depend on the signal.
    pub fn null(self) -> Self {
        Self { slope: 0.0, ..self }
    }
}

fn default_start() -> Period {
    Period::monthly(1996, 1)
}

fn default_hpp() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DgpConfig {
    pub seed: u64,
    /// Number of periods T.
    pub periods: usize,
    #[serde(default = "default_start")]
    pub start: Period,
    /// Slope of r_{t+1} on the unit-variance signal s_t.
    pub beta: f64,
    pub noise_sd: f64,
    pub signal_persistence: f64,
    #[serde(default = "default_hpp")]
    pub headlines_per_period: usize,
    #[serde(default)]
    pub label_link: LabelLink,
}

impl Default for DgpConfig {
    fn default() -> Self {
        Self {
            seed: 1,
            periods: 324,
            start: default_start(),
            beta: 0.005,
            noise_sd: 0.045,
            signal_persistence: 0.6,
            headlines_per_period: default_hpp(),
            label_link: LabelLink::default(),
        }
    }
}

impl DgpConfig {
    /// Planted standardized slope 0.5 with unit noise and a link steep
    /// enough that news ratios track the signal closely.
    pub fn strong_link(seed: u64) -> Self {
        Self {
            seed,
            beta: 0.5,
            noise_sd: 1.0,
            label_link: LabelLink {
                slope: 1.0,
                ..LabelLink::default()
            },
            ..Self::default()
        }
    }

    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if self.periods < 60 {
            out.push(format!("periods must be at least 60, got {}", self.periods));
        }
        if !(self.noise_sd > 0.0 && self.noise_sd.is_finite()) {
            out.push(format!("noise_sd must be positive, got {}", self.noise_sd));
        }
        if !(0.0..1.0).contains(&self.signal_persistence) {
            out.push(format!("signal_persistence must lie in [0, 1), got {}", self.signal_persistence));
        }
        if !self.beta.is_finite() {
            out.push("beta must be finite".into());
        }
        if self.headlines_per_period == 0 {
            out.push("headlines_per_period must be at least 1".into());
        }
        let l = self.label_link;
        if ![l.up_intercept, l.down_intercept, l.slope].iter().all(|v| v.is_finite()) {
            out.push("label_link parameters must be finite".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p))
        }
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(vec![e.to_string()]))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config serializes")
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Market {
    /// Latent AR(1) signal with unit stationary variance.
    pub signal: PeriodSeries,
    /// r_0 = e_0 and r_{t+1} = beta s_t + e_{t+1}.
    pub returns: PeriodSeries,
}

pub fn simulate_market(cfg: &DgpConfig) -> Result<Market> {
    cfg.validate()?;
    let n = cfg.periods;
    let phi = cfg.signal_persistence;
    let mut srng = stream_rng(cfg.seed, STREAM_SIGNAL);
    let mut erng = stream_rng(cfg.seed, STREAM_SHOCKS);
    let unit = Normal::new(0.0, 1.0).expect("valid normal");
    let shock = Normal::new(0.0, cfg.noise_sd).expect("validated noise");

    let innovation_sd = (1.0 - phi * phi).sqrt();
    let mut s = Vec::with_capacity(n);
    s.push(unit.sample(&mut srng));
    for t in 1..n {
        s.push(phi * s[t - 1] + innovation_sd * unit.sample(&mut srng));
    }
    let mut r = Vec::with_capacity(n);
    r.push(shock.sample(&mut erng));
    for t in 1..n {
        r.push(cfg.beta * s[t - 1] + shock.sample(&mut erng));
    }
    Ok(Market {
        signal: PeriodSeries::new(cfg.start, s),
        returns: PeriodSeries::new(cfg.start, r),
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct SyntheticCorpus {
    pub headlines: Vec<HeadlineRecord>,
    pub labels: Vec<LabelRecord>,
}

const FILLER: &[&str] = &[
    "shares", "traders", "officials", "report", "week", "sector", "exporters", "retailers", "lenders",
    "factories", "consumers", "builders", "airlines", "miners", "regulators", "analysts",
];
const UP_CUES: &[&str] = &["gain", "rally", "rise", "surge"];
const DOWN_CUES: &[&str] = &["loss", "fall", "slump", "plunge"];

fn span_days(f: Frequency) -> i64 {
    match f {
        Frequency::Monthly => 28,
        Frequency::Weekly => 7,
        Frequency::Quarterly => 90,
    }
}

/// Draws `headlines_per_period` labels per period from the label link at
/// the latent signal of that period. Headline text carries one positive or
/// negative cue word for UP and DOWN items, so the bundled lexicon
/// classifier reproduces the planted labels.
pub fn simulate_corpus(cfg: &DgpConfig) -> Result<SyntheticCorpus> {
    let market = simulate_market(cfg)?;
    let mut lrng = stream_rng(cfg.seed, STREAM_LABELS);
    let mut trng = stream_rng(cfg.seed, STREAM_TEXT);
    let hpp = cfg.headlines_per_period;
    let mut headlines = Vec::with_capacity(market.signal.len() * hpp);
    let mut labels = Vec::with_capacity(headlines.capacity());
    for (period, s) in market.signal.iter() {
        let (pu, pd, _) = cfg.label_link.probabilities(s);
        let span = span_days(period.frequency);
        for k in 0..hpp {
            let u: f64 = lrng.random();
            let label = if u < pu {
                Label::Up
            } else if u < pu + pd {
                Label::Down
            } else {
                Label::Unknown
            };
            let a = FILLER[trng.random_range(0..FILLER.len())];
            let b = FILLER[trng.random_range(0..FILLER.len())];
            let text = match label {
                Label::Up => format!("{a} {} {b}", UP_CUES[trng.random_range(0..UP_CUES.len())]),
                Label::Down => format!("{a} {} {b}", DOWN_CUES[trng.random_range(0..DOWN_CUES.len())]),
                Label::Unknown => format!("{a} meet {b}"),
            };
            let id = format!("{period}-{k:04}");
            headlines.push(HeadlineRecord {
                id: id.clone(),
                date: period.start_date() + Duration::days(k as i64 % span),
                text,
            });
            labels.push(LabelRecord {
                headline_id: id,
                label,
                source: SOURCE.into(),
                prompt_id: PROMPT_ID.into(),
            });
        }
    }
    Ok(SyntheticCorpus { headlines, labels })
}

/// Runs `f` for every seed in parallel and returns results in seed order,
/// independent of the number of worker threads.
pub fn monte_carlo<T, F>(seeds: Range<u64>, f: F) -> Vec<T>
where
    T: Send,
    F: Fn(u64) -> T + Sync + Send,
{
    seeds.into_par_iter().map(f).collect()
}

/// Share of `stats` with |t| above `critical`.
pub fn rejection_rate(stats: &[f64], critical: f64) -> f64 {
    stats.iter().filter(|t| t.abs() > critical).count() as f64 / stats.len() as f64
}
