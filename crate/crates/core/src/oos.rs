//! Recursive out-of-sample evaluation against the expanding historical mean.
//!
//! A [`ForecastPath`] is indexed by *target* period: entry `i` holds the
//! realized return of that period, the benchmark forecast of it and the
//! model forecast of it, both formed with information up to the previous
//! period only.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::{ContinuousCDF, Normal};

use crate::error::{Error, Result};
use crate::timeseries::{align, mean, Period, PeriodSeries};

#[derive(Debug, Clone, PartialEq)]
pub struct ForecastPath {
    pub realized: PeriodSeries,
    pub benchmark: PeriodSeries,
    pub model: PeriodSeries,
    /// Dates where the model fell back to the benchmark because the
    /// training signal had no variance.
    pub fallback: Vec<bool>,
}

impl ForecastPath {
    pub fn new(realized: PeriodSeries, benchmark: PeriodSeries, model: PeriodSeries) -> Result<Self> {
        let n = realized.len();
        if n == 0 {
            return Err(Error::InsufficientData("empty forecast path".into()));
        }
        for (name, s) in [("benchmark", &benchmark), ("model", &model)] {
            if s.start() != realized.start() || s.len() != n {
                return Err(Error::Alignment(format!("{name} forecasts are not aligned with realized returns")));
            }
        }
        Ok(Self {
            realized,
            benchmark,
            model,
            fallback: vec![false; n],
        })
    }

    pub fn len(&self) -> usize {
        self.realized.len()
    }

    pub fn is_empty(&self) -> bool {
        self.realized.is_empty()
    }

    pub fn start(&self) -> Period {
        self.realized.start()
    }

    pub fn end(&self) -> Period {
        self.realized.end()
    }

    /// Sub-path over `[from, to]`, clipped to coverage.
    pub fn window(&self, from: Period, to: Period) -> Result<Self> {
        let realized = self.realized.slice(from, to)?;
        let a = self.realized.position(realized.start()).expect("slice lies inside");
        Ok(Self {
            benchmark: self.benchmark.slice(from, to)?,
            model: self.model.slice(from, to)?,
            fallback: self.fallback[a..a + realized.len()].to_vec(),
            realized,
        })
    }

    /// Same path with the model forecasts replaced.
    pub fn with_model(&self, model: Vec<f64>) -> Result<Self> {
        let mut out = Self::new(
            self.realized.clone(),
            self.benchmark.clone(),
            PeriodSeries::new(self.start(), model),
        )?;
        out.fallback = self.fallback.clone();
        Ok(out)
    }

    fn errors(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.realized
            .values()
            .iter()
            .zip(self.benchmark.values())
            .zip(self.model.values())
            .map(|((r, b), m)| (r - b, r - m))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct ForecastOptions {
    /// Minimum number of (signal, next return) pairs in the first fit.
    pub min_train: usize,
}

impl Default for ForecastOptions {
    fn default() -> Self {
        Self { min_train: 24 }
    }
}

/// Expanding-window one-step forecasts of `returns` from `signal`.
///
/// Every period after `train_end` (within the common sample) is a target.
/// The model forecast for target t+1 is a + b x_t where (a, b) is the OLS fit
/// of r_{s+1} on x_s over all s + 1 <= t; the benchmark is the mean of
/// r_1..r_t. Each date uses past data only, so the dates are fitted in
/// parallel.
pub fn recursive_forecast(
    signal: &PeriodSeries,
    returns: &PeriodSeries,
    train_end: Period,
    opts: ForecastOptions,
) -> Result<ForecastPath> {
    let aligned = align(&[signal, returns])?;
    let (x, r) = (aligned[0].values(), aligned[1].values());
    let origin0 = aligned[0].position(train_end).ok_or_else(|| {
        Error::Alignment(format!(
            "train end {train_end} is outside the common sample {}..{}",
            aligned[0].start(),
            aligned[0].end()
        ))
    })?;
    if origin0 + 1 >= r.len() {
        return Err(Error::InsufficientData(format!("no evaluation periods after {train_end}")));
    }
    let min_train = opts.min_train.max(2);
    if origin0 < min_train {
        return Err(Error::InsufficientData(format!(
            "{origin0} training pairs before the first forecast, need {min_train}"
        )));
    }

    let results: Vec<(f64, f64, bool)> = (origin0..r.len() - 1)
        .into_par_iter()
        .map(|t| {
            let bench = mean(&r[..=t]);
            // training pairs (x_s, r_{s+1}) for s < t
            let xs = &x[..t];
            let ys = &r[1..=t];
            let mx = mean(xs);
            let my = mean(ys);
            let sxx: f64 = xs.iter().map(|v| (v - mx) * (v - mx)).sum();
            if sxx <= 0.0 {
                return (bench, bench, true);
            }
            let sxy: f64 = xs.iter().zip(ys).map(|(a, b)| (a - mx) * (b - my)).sum();
            let slope = sxy / sxx;
            (bench, my - slope * mx + slope * x[t], false)
        })
        .collect();

    let first = aligned[1].period_at(origin0 + 1);
    let mut path = ForecastPath::new(
        PeriodSeries::new(first, r[origin0 + 1..].to_vec()),
        PeriodSeries::new(first, results.iter().map(|v| v.0).collect()),
        PeriodSeries::new(first, results.iter().map(|v| v.1).collect()),
    )?;
    path.fallback = results.iter().map(|v| v.2).collect();
    Ok(path)
}

/// Running sum of benchmark-minus-model squared forecast errors.
pub fn csfe_difference(path: &ForecastPath) -> PeriodSeries {
    let mut acc = 0.0;
    let values = path
        .errors()
        .map(|(eb, em)| {
            acc += eb * eb - em * em;
            acc
        })
        .collect();
    PeriodSeries::new(path.start(), values)
}

/// 1 - SSE_model / SSE_benchmark. The numerator margin is the final CSFE
/// difference, so the sign always agrees with [`csfe_difference`].
pub fn r2_os(path: &ForecastPath) -> Result<f64> {
    let sse_bench: f64 = path.errors().map(|(eb, _)| eb * eb).sum();
    if sse_bench <= 0.0 {
        return Err(Error::Degenerate("benchmark forecasts are perfect".into()));
    }
    let margin = *csfe_difference(path).values().last().expect("non-empty path");
    Ok(margin / sse_bench)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ClarkWest {
    pub statistic: f64,
    /// One-sided upper-tail standard normal p-value.
    pub p_value: f64,
}

/// Clark-West MSFE-adjusted statistic: Newey-West (one lag) t-statistic of
/// the mean of f_t = (r - b)^2 - [(r - m)^2 - (b - m)^2].
pub fn msfe_adjusted(path: &ForecastPath) -> Result<ClarkWest> {
    let n = path.len();
    if n < 10 {
        return Err(Error::InsufficientData(format!("{n} evaluation periods, need 10")));
    }
    let f: Vec<f64> = path
        .errors()
        .zip(path.benchmark.values().iter().zip(path.model.values()))
        .map(|((eb, em), (b, m))| eb * eb - (em * em - (b - m) * (b - m)))
        .collect();
    if f.iter().all(|v| *v == 0.0) {
        return Ok(ClarkWest {
            statistic: 0.0,
            p_value: 0.5,
        });
    }
    let fbar = mean(&f);
    let u: Vec<f64> = f.iter().map(|v| v - fbar).collect();
    let g0: f64 = u.iter().map(|v| v * v).sum();
    let g1: f64 = u.windows(2).map(|w| w[0] * w[1]).sum();
    let long_run = g0 + 2.0 * 0.5 * g1;
    if long_run <= 0.0 {
        return Err(Error::Degenerate("MSFE-adjusted loss differential has no variance".into()));
    }
    let se = long_run.sqrt() / n as f64;
    let statistic = fbar / se;
    let normal = Normal::standard();
    Ok(ClarkWest {
        statistic,
        p_value: normal.sf(statistic),
    })
}

/// Headline numbers for one path.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OosReport {
    pub first_target: Period,
    pub last_target: Period,
    pub n_eval: usize,
    pub n_fallback: usize,
    pub r2_os: f64,
    pub msfe_adjusted: f64,
    pub p_value: f64,
    pub csfe_final: f64,
}

impl OosReport {
    pub fn from_path(path: &ForecastPath) -> Result<Self> {
        let cw = msfe_adjusted(path)?;
        Ok(Self {
            first_target: path.start(),
            last_target: path.end(),
            n_eval: path.len(),
            n_fallback: path.fallback.iter().filter(|f| **f).count(),
            r2_os: r2_os(path)?,
            msfe_adjusted: cw.statistic,
            p_value: cw.p_value,
            csfe_final: *csfe_difference(path).values().last().expect("non-empty path"),
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombineMethod {
    /// Equal-weight mean of the members.
    Mc,
    /// Mean combination shrunk toward the benchmark by theta.
    Imc,
    /// Discounted-MSFE weighted combination shrunk toward the benchmark.
    Iwc,
}

impl std::str::FromStr for CombineMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "mc" => Ok(CombineMethod::Mc),
            "imc" => Ok(CombineMethod::Imc),
            "iwc" => Ok(CombineMethod::Iwc),
            other => Err(Error::Parse(format!("unknown combination `{other}`"))),
        }
    }
}

impl std::fmt::Display for CombineMethod {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            CombineMethod::Mc => "mc",
            CombineMethod::Imc => "imc",
            CombineMethod::Iwc => "iwc",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CombineOptions {
    /// Discount factor for the member MSFEs (1.0 = no discounting).
    pub discount: f64,
    /// Past periods needed before theta is estimated; before that theta = 1.
    pub theta_min_window: usize,
    pub theta_bounds: (f64, f64),
}

impl Default for CombineOptions {
    fn default() -> Self {
        Self {
            discount: 1.0,
            theta_min_window: 12,
            theta_bounds: (0.0, 2.0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Combination {
    pub path: ForecastPath,
    /// Shrinkage toward the combination at each date (1 for MC).
    pub theta: Vec<f64>,
    /// Member weights at each date.
    pub weights: Vec<Vec<f64>>,
}

/// Combines member paths that share realized returns and benchmark.
pub fn combine(paths: &[ForecastPath], method: CombineMethod, opts: CombineOptions) -> Result<Combination> {
    let first = paths
        .first()
        .ok_or_else(|| Error::InsufficientData("no member forecasts to combine".into()))?;
    for (i, p) in paths.iter().enumerate().skip(1) {
        if p.realized != first.realized || p.benchmark != first.benchmark {
            return Err(Error::Alignment(format!(
                "member {i} does not share the evaluation index and benchmark of member 0"
            )));
        }
    }
    if !(opts.discount > 0.0 && opts.discount <= 1.0) {
        return Err(Error::Domain(format!("discount factor {} outside (0, 1]", opts.discount)));
    }
    let n = first.len();
    let k = paths.len();
    let r = first.realized.values();
    let b = first.benchmark.values();

    let weights: Vec<Vec<f64>> = match method {
        CombineMethod::Mc | CombineMethod::Imc => vec![vec![1.0 / k as f64; k]; n],
        CombineMethod::Iwc => discounted_msfe_weights(paths, opts.discount),
    };
    let combo: Vec<f64> = (0..n)
        .map(|t| (0..k).map(|i| weights[t][i] * paths[i].model.values()[t]).sum())
        .collect();

    let theta: Vec<f64> = match method {
        CombineMethod::Mc => vec![1.0; n],
        CombineMethod::Imc | CombineMethod::Iwc => (0..n)
            .map(|t| shrinkage(&r[..t], &b[..t], &combo[..t], opts))
            .collect(),
    };
    let model = (0..n).map(|t| (1.0 - theta[t]) * b[t] + theta[t] * combo[t]).collect();
    let mut path = first.with_model(model)?;
    path.fallback = (0..n).map(|t| paths.iter().all(|p| p.fallback[t])).collect();
    Ok(Combination { path, theta, weights })
}

/// cov(r - b, c - b) / var(c - b) over the past window, clamped.
fn shrinkage(r: &[f64], b: &[f64], c: &[f64], opts: CombineOptions) -> f64 {
    if r.len() < opts.theta_min_window.max(2) {
        return 1.0;
    }
    let a: Vec<f64> = r.iter().zip(b).map(|(r, b)| r - b).collect();
    let d: Vec<f64> = c.iter().zip(b).map(|(c, b)| c - b).collect();
    let (ma, md) = (mean(&a), mean(&d));
    let var: f64 = d.iter().map(|v| (v - md) * (v - md)).sum();
    if var <= 0.0 {
        return 1.0;
    }
    let cov: f64 = a.iter().zip(&d).map(|(x, y)| (x - ma) * (y - md)).sum();
    (cov / var).clamp(opts.theta_bounds.0, opts.theta_bounds.1)
}

/// Weights proportional to the inverse discounted MSFE of past errors.
/// Equal weights before any error is observed; members with zero past
/// error share the weight equally.
fn discounted_msfe_weights(paths: &[ForecastPath], discount: f64) -> Vec<Vec<f64>> {
    let k = paths.len();
    let n = paths[0].len();
    let r = paths[0].realized.values();
    let mut dmsfe = vec![0.0; k];
    let mut out = Vec::with_capacity(n);
    for t in 0..n {
        if t == 0 {
            out.push(vec![1.0 / k as f64; k]);
        } else {
            let zeros: Vec<usize> = (0..k).filter(|&i| dmsfe[i] == 0.0).collect();
            let w = if !zeros.is_empty() {
                (0..k)
                    .map(|i| if zeros.contains(&i) { 1.0 / zeros.len() as f64 } else { 0.0 })
                    .collect()
            } else {
                let inv: Vec<f64> = dmsfe.iter().map(|v| 1.0 / v).collect();
                let total: f64 = inv.iter().sum();
                inv.iter().map(|v| v / total).collect()
            };
            out.push(w);
        }
        for (i, p) in paths.iter().enumerate() {
            let e = r[t] - p.model.values()[t];
            dmsfe[i] = discount * dmsfe[i] + e * e;
        }
    }
    out
}
