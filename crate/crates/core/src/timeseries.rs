//! Period-indexed series shared by every analysis module.
//!
//! A [`PeriodSeries`] is a gap-free run of values over consecutive periods of
//! one [`Frequency`]. Periods are integer ordinals from a fixed epoch, so
//! alignment and shifting are plain integer arithmetic.

use std::fmt;
use std::str::FromStr;

use chrono::{Datelike, NaiveDate};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Frequency {
    Monthly,
    Weekly,
    Quarterly,
}

impl Frequency {
    pub fn periods_per_year(self) -> u32 {
        match self {
            Frequency::Monthly => 12,
            Frequency::Weekly => 52,
            Frequency::Quarterly => 4,
        }
    }
}

impl fmt::Display for Frequency {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Frequency::Monthly => "monthly",
            Frequency::Weekly => "weekly",
            Frequency::Quarterly => "quarterly",
        })
    }
}

impl FromStr for Frequency {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "monthly" | "m" => Ok(Frequency::Monthly),
            "weekly" | "w" => Ok(Frequency::Weekly),
            "quarterly" | "q" => Ok(Frequency::Quarterly),
            other => Err(Error::Parse(format!("unknown frequency `{other}`"))),
        }
    }
}

// Weekly ordinals count Monday-starting weeks from 1970-01-05.
fn weekly_epoch() -> NaiveDate {
    NaiveDate::from_ymd_opt(1970, 1, 5).expect("valid epoch")
}

/// One entry of a period index.
///
/// Labels: monthly `YYYY-MM`, quarterly `YYYY-Qn`, weekly the Monday that
/// starts the week as `YYYY-MM-DD`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Period {
    pub frequency: Frequency,
    pub ordinal: i64,
}

impl Period {
    pub fn new(frequency: Frequency, ordinal: i64) -> Self {
        Self { frequency, ordinal }
    }

    pub fn monthly(year: i32, month: u32) -> Self {
        debug_assert!((1..=12).contains(&month));
        Self::new(Frequency::Monthly, year as i64 * 12 + (month as i64 - 1))
    }

    pub fn quarterly(year: i32, quarter: u32) -> Self {
        debug_assert!((1..=4).contains(&quarter));
        Self::new(Frequency::Quarterly, year as i64 * 4 + (quarter as i64 - 1))
    }

    /// The period of `frequency` that contains `date`.
    pub fn containing(frequency: Frequency, date: NaiveDate) -> Self {
        match frequency {
            Frequency::Monthly => Self::monthly(date.year(), date.month()),
            Frequency::Quarterly => Self::quarterly(date.year(), (date.month() - 1) / 3 + 1),
            Frequency::Weekly => {
                let days = (date - weekly_epoch()).num_days();
                Self::new(Frequency::Weekly, days.div_euclid(7))
            }
        }
    }

    /// Parses a label, inferring the frequency from its shape.
    pub fn parse(label: &str) -> Result<Self> {
        let s = label.trim();
        let bad = || Error::Parse(format!("invalid period label `{label}`"));
        if let Some((y, q)) = s.split_once("-Q") {
            let year: i32 = y.parse().map_err(|_| bad())?;
            let quarter: u32 = q.parse().map_err(|_| bad())?;
            if !(1..=4).contains(&quarter) {
                return Err(bad());
            }
            return Ok(Self::quarterly(year, quarter));
        }
        match s.len() {
            7 => {
                let date = NaiveDate::parse_from_str(&format!("{s}-01"), "%Y-%m-%d")
                    .map_err(|_| bad())?;
                Ok(Self::monthly(date.year(), date.month()))
            }
            10 => {
                let date = NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(|_| bad())?;
                Ok(Self::containing(Frequency::Weekly, date))
            }
            _ => Err(bad()),
        }
    }

    /// Parses a label and checks it has the expected frequency.
    pub fn parse_as(frequency: Frequency, label: &str) -> Result<Self> {
        let p = Self::parse(label)?;
        if p.frequency != frequency {
            return Err(Error::Frequency(format!(
                "label `{label}` is {} but {frequency} was expected",
                p.frequency
            )));
        }
        Ok(p)
    }

    pub fn offset(self, n: i64) -> Self {
        Self::new(self.frequency, self.ordinal + n)
    }

    pub fn next(self) -> Self {
        self.offset(1)
    }

    /// First calendar day of the period.
    pub fn start_date(self) -> NaiveDate {
        match self.frequency {
            Frequency::Monthly => {
                let y = self.ordinal.div_euclid(12) as i32;
                let m = self.ordinal.rem_euclid(12) as u32 + 1;
                NaiveDate::from_ymd_opt(y, m, 1).expect("valid month")
            }
            Frequency::Quarterly => {
                let y = self.ordinal.div_euclid(4) as i32;
                let q = self.ordinal.rem_euclid(4) as u32;
                NaiveDate::from_ymd_opt(y, q * 3 + 1, 1).expect("valid quarter")
            }
            Frequency::Weekly => weekly_epoch() + chrono::Duration::days(self.ordinal * 7),
        }
    }
}

impl fmt::Display for Period {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.frequency {
            Frequency::Monthly => write!(
                f,
                "{:04}-{:02}",
                self.ordinal.div_euclid(12),
                self.ordinal.rem_euclid(12) + 1
            ),
            Frequency::Quarterly => write!(
                f,
                "{:04}-Q{}",
                self.ordinal.div_euclid(4),
                self.ordinal.rem_euclid(4) + 1
            ),
            Frequency::Weekly => write!(f, "{}", self.start_date().format("%Y-%m-%d")),
        }
    }
}

impl FromStr for Period {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Period::parse(s)
    }
}

impl Serialize for Period {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Period {
    fn deserialize<D: serde::Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        Period::parse(&s).map_err(serde::de::Error::custom)
    }
}

/// Values over a contiguous run of periods starting at `start`.
#[derive(Debug, Clone, PartialEq)]
pub struct PeriodSeries {
    start: Period,
    values: Vec<f64>,
}

impl PeriodSeries {
    pub fn new(start: Period, values: Vec<f64>) -> Self {
        Self { start, values }
    }

    /// Builds a series from `(period, value)` pairs, which must be sorted,
    /// share one frequency, and leave no gaps.
    pub fn from_pairs(pairs: &[(Period, f64)]) -> Result<Self> {
        let (first, _) = *pairs
            .first()
            .ok_or_else(|| Error::InsufficientData("empty series".into()))?;
        for (i, (p, _)) in pairs.iter().enumerate() {
            if p.frequency != first.frequency {
                return Err(Error::Frequency(format!(
                    "period {p} is {} inside a {} series",
                    p.frequency, first.frequency
                )));
            }
            if p.ordinal != first.ordinal + i as i64 {
                return Err(Error::Alignment(format!(
                    "series is not contiguous at {p} (expected {})",
                    first.offset(i as i64)
                )));
            }
        }
        Ok(Self::new(first, pairs.iter().map(|(_, v)| *v).collect()))
    }

    pub fn start(&self) -> Period {
        self.start
    }

    /// Last period; panics on an empty series.
    pub fn end(&self) -> Period {
        assert!(!self.values.is_empty(), "empty series has no end");
        self.start.offset(self.values.len() as i64 - 1)
    }

    pub fn frequency(&self) -> Frequency {
        self.start.frequency
    }

    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn into_values(self) -> Vec<f64> {
        self.values
    }

    pub fn period_at(&self, i: usize) -> Period {
        self.start.offset(i as i64)
    }

    pub fn periods(&self) -> impl Iterator<Item = Period> + '_ {
        (0..self.values.len()).map(move |i| self.period_at(i))
    }

    pub fn iter(&self) -> impl Iterator<Item = (Period, f64)> + '_ {
        self.values.iter().enumerate().map(move |(i, v)| (self.period_at(i), *v))
    }

    /// Position of `period` within the series, if covered.
    pub fn position(&self, period: Period) -> Option<usize> {
        if period.frequency != self.frequency() {
            return None;
        }
        let d = period.ordinal - self.start.ordinal;
        (d >= 0 && (d as usize) < self.values.len()).then_some(d as usize)
    }

    pub fn get(&self, period: Period) -> Option<f64> {
        self.position(period).map(|i| self.values[i])
    }

    /// Sub-series over the inclusive range `[from, to]`, clipped to coverage.
    pub fn slice(&self, from: Period, to: Period) -> Result<Self> {
        if from.frequency != self.frequency() || to.frequency != self.frequency() {
            return Err(Error::Frequency("slice bounds use a different frequency".into()));
        }
        let lo = from.ordinal.max(self.start.ordinal);
        let hi = to.ordinal.min(self.start.ordinal + self.values.len() as i64 - 1);
        if lo > hi {
            return Err(Error::Alignment(format!("[{from}, {to}] does not overlap the series")));
        }
        let a = (lo - self.start.ordinal) as usize;
        let b = (hi - self.start.ordinal) as usize;
        Ok(Self::new(self.start.offset(a as i64), self.values[a..=b].to_vec()))
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self::new(self.start, self.values.iter().map(|&v| f(v)).collect())
    }
}

/// A {0,1} state indicator derived from a base series.
#[derive(Debug, Clone, PartialEq)]
pub struct StateDummy {
    pub base: PeriodSeries,
    pub window_periods: usize,
    high: Vec<bool>,
}

impl StateDummy {
    pub fn is_high(&self, i: usize) -> bool {
        self.high[i]
    }

    pub fn high(&self) -> PeriodSeries {
        PeriodSeries::new(
            self.base.start(),
            self.high.iter().map(|&h| if h { 1.0 } else { 0.0 }).collect(),
        )
    }

    /// Complement of [`StateDummy::high`].
    pub fn low(&self) -> PeriodSeries {
        PeriodSeries::new(
            self.base.start(),
            self.high.iter().map(|&h| if h { 0.0 } else { 1.0 }).collect(),
        )
    }

    pub fn len(&self) -> usize {
        self.high.len()
    }

    pub fn is_empty(&self) -> bool {
        self.high.is_empty()
    }
}

/// Truncates every input to the common period range.
pub fn align(series: &[&PeriodSeries]) -> Result<Vec<PeriodSeries>> {
    let first = series
        .first()
        .ok_or_else(|| Error::Alignment("nothing to align".into()))?;
    let freq = first.frequency();
    if let Some(other) = series.iter().find(|s| s.frequency() != freq) {
        return Err(Error::Frequency(format!(
            "cannot align {freq} with {} series",
            other.frequency()
        )));
    }
    if series.iter().any(|s| s.is_empty()) {
        return Err(Error::Alignment("cannot align an empty series".into()));
    }
    let lo = series.iter().map(|s| s.start().ordinal).max().unwrap();
    let hi = series.iter().map(|s| s.end().ordinal).min().unwrap();
    if lo > hi {
        return Err(Error::Alignment("series do not overlap".into()));
    }
    let (from, to) = (Period::new(freq, lo), Period::new(freq, hi));
    series.iter().map(|s| s.slice(from, to)).collect()
}

/// Mean of `r` over the next `h` periods: output at t is mean(r[t+1..=t+h]).
/// The output keeps the input start and loses `h` periods at the end.
pub fn horizon_average(r: &PeriodSeries, h: usize) -> Result<PeriodSeries> {
    if h == 0 {
        return Err(Error::Domain("horizon must be at least 1".into()));
    }
    if h >= r.len() {
        return Err(Error::InsufficientData(format!(
            "horizon {h} needs more than {} observations",
            r.len()
        )));
    }
    let v = r.values();
    let out = (0..v.len() - h)
        .map(|t| v[t + 1..=t + h].iter().sum::<f64>() / h as f64)
        .collect();
    Ok(PeriodSeries::new(r.start(), out))
}

pub(crate) fn mean(x: &[f64]) -> f64 {
    x.iter().sum::<f64>() / x.len() as f64
}

/// Unbiased (n-1) sample variance.
pub(crate) fn sample_variance(x: &[f64]) -> f64 {
    let m = mean(x);
    x.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (x.len() as f64 - 1.0)
}

/// Z-scores with the unbiased standard deviation.
pub fn standardize(x: &PeriodSeries) -> Result<PeriodSeries> {
    Ok(PeriodSeries::new(x.start(), standardize_values(x.values())?))
}

pub(crate) fn standardize_values(x: &[f64]) -> Result<Vec<f64>> {
    if x.len() < 2 {
        return Err(Error::InsufficientData("standardize needs at least 2 values".into()));
    }
    let m = mean(x);
    let sd = sample_variance(x).sqrt();
    if !(sd > 0.0) || !sd.is_finite() {
        return Err(Error::Degenerate("series has zero variance".into()));
    }
    Ok(x.iter().map(|v| (v - m) / sd).collect())
}

/// High-state indicator: 1 when x_t is strictly above the mean of the
/// previous `window` observations. Short histories use every prior
/// observation; the first period is always low.
pub fn trailing_mean_dummy(x: &PeriodSeries, window: usize) -> Result<StateDummy> {
    if window == 0 {
        return Err(Error::Domain("window must be positive".into()));
    }
    let v = x.values();
    let high = (0..v.len())
        .map(|t| {
            if t == 0 {
                return false;
            }
            let prior = &v[t.saturating_sub(window)..t];
            v[t] > mean(prior)
        })
        .collect();
    Ok(StateDummy {
        base: x.clone(),
        window_periods: window,
        high,
    })
}
