//! Headline and label ingestion, per-period counts, and news ratios.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::io::{BufRead, BufReader, Read, Write};
use std::path::Path;
use std::str::FromStr;

use chrono::NaiveDate;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::timeseries::{mean, Frequency, Period, PeriodSeries};

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct HeadlineRecord {
    pub id: String,
    pub date: NaiveDate,
    pub text: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Label {
    #[serde(rename = "UP")]
    Up,
    #[serde(rename = "DOWN")]
    Down,
    #[serde(rename = "UNKNOWN")]
    Unknown,
}

impl Label {
    pub fn as_str(self) -> &'static str {
        match self {
            Label::Up => "UP",
            Label::Down => "DOWN",
            Label::Unknown => "UNKNOWN",
        }
    }

    /// UP and DOWN swap; UNKNOWN is fixed.
    pub fn flipped(self) -> Self {
        match self {
            Label::Up => Label::Down,
            Label::Down => Label::Up,
            Label::Unknown => Label::Unknown,
        }
    }
}

impl fmt::Display for Label {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Label {
    type Err = Error;

    /// Case-sensitive, matching the label file format.
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "UP" => Ok(Label::Up),
            "DOWN" => Ok(Label::Down),
            "UNKNOWN" => Ok(Label::Unknown),
            other => Err(Error::Parse(format!("invalid label `{other}`"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct LabelRecord {
    pub headline_id: String,
    pub label: Label,
    pub source: String,
    pub prompt_id: String,
}

/// Which classifier run to count when a label file mixes several.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct LabelSelector {
    pub source: String,
    pub prompt_id: String,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct PeriodCounts {
    pub period: Period,
    pub n_up: u64,
    pub n_down: u64,
    pub n_unknown: u64,
    pub n_total: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct NewsRatios {
    pub nr_good: PeriodSeries,
    pub nr_bad: PeriodSeries,
}

/// Buckets headlines by period and counts labels.
///
/// Headlines without a label under the selected run count as UNKNOWN.
/// Without a selector the labels must come from a single run.
pub fn aggregate(
    headlines: &[HeadlineRecord],
    labels: &[LabelRecord],
    frequency: Frequency,
    selector: Option<&LabelSelector>,
) -> Result<Vec<PeriodCounts>> {
    if headlines.is_empty() {
        return Err(Error::InsufficientData("no headlines to aggregate".into()));
    }
    let mut ids = HashSet::with_capacity(headlines.len());
    for h in headlines {
        if !ids.insert(h.id.as_str()) {
            return Err(Error::Duplicate(format!("headline id `{}`", h.id)));
        }
    }

    let mut seen = HashSet::with_capacity(labels.len());
    for l in labels {
        if !ids.contains(l.headline_id.as_str()) {
            return Err(Error::Referential(l.headline_id.clone()));
        }
        if !seen.insert((l.headline_id.as_str(), l.source.as_str(), l.prompt_id.as_str())) {
            return Err(Error::Duplicate(format!(
                "label ({}, {}, {})",
                l.headline_id, l.source, l.prompt_id
            )));
        }
    }

    let selected: Vec<&LabelRecord> = match selector {
        Some(sel) => labels
            .iter()
            .filter(|l| l.source == sel.source && l.prompt_id == sel.prompt_id)
            .collect(),
        None => {
            let runs: HashSet<(&str, &str)> = labels
                .iter()
                .map(|l| (l.source.as_str(), l.prompt_id.as_str()))
                .collect();
            if runs.len() > 1 {
                return Err(Error::Duplicate(format!(
                    "labels mix {} (source, prompt_id) runs; select one",
                    runs.len()
                )));
            }
            labels.iter().collect()
        }
    };
    let by_id: HashMap<&str, Label> = selected
        .iter()
        .map(|l| (l.headline_id.as_str(), l.label))
        .collect();

    let mut buckets: BTreeMap<Period, PeriodCounts> = BTreeMap::new();
    for h in headlines {
        let period = Period::containing(frequency, h.date);
        let c = buckets.entry(period).or_insert_with(|| empty_counts(period));
        match by_id.get(h.id.as_str()).copied().unwrap_or(Label::Unknown) {
            Label::Up => c.n_up += 1,
            Label::Down => c.n_down += 1,
            Label::Unknown => c.n_unknown += 1,
        }
        c.n_total += 1;
    }

    let first = *buckets.keys().next().unwrap();
    let last = *buckets.keys().next_back().unwrap();
    Ok((first.ordinal..=last.ordinal)
        .map(|o| {
            let p = Period::new(frequency, o);
            buckets.get(&p).copied().unwrap_or_else(|| empty_counts(p))
        })
        .collect())
}

fn empty_counts(period: Period) -> PeriodCounts {
    PeriodCounts {
        period,
        n_up: 0,
        n_down: 0,
        n_unknown: 0,
        n_total: 0,
    }
}

/// Good and bad news shares per period.
pub fn ratios(counts: &[PeriodCounts]) -> Result<NewsRatios> {
    let mut good = Vec::with_capacity(counts.len());
    let mut bad = Vec::with_capacity(counts.len());
    for c in counts {
        if c.n_total == 0 {
            return Err(Error::ZeroDenominator(c.period.to_string()));
        }
        let n = c.n_total as f64;
        good.push((c.period, c.n_up as f64 / n));
        bad.push((c.period, c.n_down as f64 / n));
    }
    Ok(NewsRatios {
        nr_good: PeriodSeries::from_pairs(&good)?,
        nr_bad: PeriodSeries::from_pairs(&bad)?,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Category {
    Bad,
    Neutral,
    Good,
    Total,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryRow {
    pub category: Category,
    pub mean: f64,
    pub std: f64,
    pub skewness: f64,
    pub median: f64,
    pub min: f64,
    pub max: f64,
    pub total: f64,
}

/// Per-category distribution of monthly counts.
pub fn summary_stats(counts: &[PeriodCounts]) -> Result<Vec<SummaryRow>> {
    if counts.len() < 3 {
        return Err(Error::InsufficientData(format!(
            "summary statistics need at least 3 periods, got {}",
            counts.len()
        )));
    }
    let pick = |f: fn(&PeriodCounts) -> u64| -> Vec<f64> { counts.iter().map(|c| f(c) as f64).collect() };
    Ok([
        (Category::Bad, pick(|c| c.n_down)),
        (Category::Neutral, pick(|c| c.n_unknown)),
        (Category::Good, pick(|c| c.n_up)),
        (Category::Total, pick(|c| c.n_total)),
    ]
    .into_iter()
    .map(|(category, xs)| describe(category, &xs))
    .collect())
}

fn describe(category: Category, xs: &[f64]) -> SummaryRow {
    let n = xs.len() as f64;
    let m = mean(xs);
    let m2 = xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / n;
    let m3 = xs.iter().map(|x| (x - m).powi(3)).sum::<f64>() / n;
    let std = (m2 * n / (n - 1.0)).sqrt();
    // adjusted Fisher-Pearson; zero-variance series report 0
    let skewness = if m2 > 0.0 {
        (n * (n - 1.0)).sqrt() / (n - 2.0) * m3 / m2.powf(1.5)
    } else {
        0.0
    };
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let k = sorted.len();
    let median = if k % 2 == 1 {
        sorted[k / 2]
    } else {
        0.5 * (sorted[k / 2 - 1] + sorted[k / 2])
    };
    SummaryRow {
        category,
        mean: m,
        std,
        skewness,
        median,
        min: sorted[0],
        max: sorted[k - 1],
        total: xs.iter().sum(),
    }
}

// ---- file formats ----

pub fn read_headlines(reader: impl Read) -> Result<Vec<HeadlineRecord>> {
    let mut out = Vec::new();
    for (lineno, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::io("<headlines>", e))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: HeadlineRecord = serde_json::from_str(&line)
            .map_err(|e| Error::Parse(format!("headlines line {}: {e}", lineno + 1)))?;
        if rec.text.trim().is_empty() {
            return Err(Error::Parse(format!(
                "headlines line {}: empty text for `{}`",
                lineno + 1,
                rec.id
            )));
        }
        out.push(rec);
    }
    Ok(out)
}

pub fn read_headlines_file(path: &Path) -> Result<Vec<HeadlineRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_headlines(f)
}

pub fn write_headlines(mut writer: impl Write, headlines: &[HeadlineRecord]) -> Result<()> {
    for h in headlines {
        serde_json::to_writer(&mut writer, h)?;
        writer.write_all(b"\n").map_err(|e| Error::io("<headlines>", e))?;
    }
    Ok(())
}

pub fn read_labels(reader: impl Read) -> Result<Vec<LabelRecord>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let headers = rdr.headers()?.clone();
    let expected = ["headline_id", "label", "source", "prompt_id"];
    if headers.iter().collect::<Vec<_>>() != expected {
        return Err(Error::Parse(format!(
            "label header must be `{}`, got `{}`",
            expected.join(","),
            headers.iter().collect::<Vec<_>>().join(",")
        )));
    }
    rdr.deserialize()
        .map(|r| r.map_err(|e| Error::Parse(format!("labels: {e}"))))
        .collect()
}

pub fn read_labels_file(path: &Path) -> Result<Vec<LabelRecord>> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_labels(f)
}

pub fn write_labels(writer: impl Write, labels: &[LabelRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    for l in labels {
        w.serialize(l)?;
    }
    // header-only output when there is nothing to write
    if labels.is_empty() {
        w.write_record(["headline_id", "label", "source", "prompt_id"])?;
    }
    w.flush().map_err(|e| Error::io("<labels>", e))?;
    Ok(())
}

pub fn write_counts(writer: impl Write, counts: &[PeriodCounts]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["period", "n_up", "n_down", "n_unknown", "n_total"])?;
    for c in counts {
        w.write_record([
            c.period.to_string(),
            c.n_up.to_string(),
            c.n_down.to_string(),
            c.n_unknown.to_string(),
            c.n_total.to_string(),
        ])?;
    }
    w.flush().map_err(|e| Error::io("<counts>", e))?;
    Ok(())
}

pub fn read_counts(reader: impl Read) -> Result<Vec<PeriodCounts>> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut out = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let num = |i: usize| -> Result<u64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("counts: bad field {i} in {rec:?}")))
        };
        let c = PeriodCounts {
            period: Period::parse(rec.get(0).unwrap_or_default())?,
            n_up: num(1)?,
            n_down: num(2)?,
            n_unknown: num(3)?,
            n_total: num(4)?,
        };
        if c.n_up + c.n_down + c.n_unknown != c.n_total {
            return Err(Error::Parse(format!("counts for {} do not add up", c.period)));
        }
        out.push(c);
    }
    Ok(out)
}

pub fn write_ratios(writer: impl Write, ratios: &NewsRatios) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(["period", "nr_good", "nr_bad"])?;
    for ((p, g), b) in ratios.nr_good.iter().zip(ratios.nr_bad.values()) {
        w.write_record([p.to_string(), g.to_string(), b.to_string()])?;
    }
    w.flush().map_err(|e| Error::io("<ratios>", e))?;
    Ok(())
}

pub fn read_ratios(reader: impl Read) -> Result<NewsRatios> {
    let mut rdr = csv::Reader::from_reader(reader);
    let mut good = Vec::new();
    let mut bad = Vec::new();
    for rec in rdr.records() {
        let rec = rec?;
        let p = Period::parse(rec.get(0).unwrap_or_default())?;
        let f = |i: usize| -> Result<f64> {
            rec.get(i)
                .and_then(|s| s.parse().ok())
                .ok_or_else(|| Error::Parse(format!("ratios: bad field {i} at {p}")))
        };
        good.push((p, f(1)?));
        bad.push((p, f(2)?));
    }
    Ok(NewsRatios {
        nr_good: PeriodSeries::from_pairs(&good)?,
        nr_bad: PeriodSeries::from_pairs(&bad)?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn headline(id: &str, date: &str) -> HeadlineRecord {
        HeadlineRecord {
            id: id.into(),
            date: NaiveDate::parse_from_str(date, "%Y-%m-%d").unwrap(),
            text: format!("headline {id}"),
        }
    }

    fn label(id: &str, label: Label) -> LabelRecord {
        LabelRecord {
            headline_id: id.into(),
            label,
            source: "gpt".into(),
            prompt_id: "baseline".into(),
        }
    }

    #[test]
    fn counts_one_month() {
        let hs = vec![
            headline("a", "1996-01-02"),
            headline("b", "1996-01-15"),
            headline("c", "1996-01-31"),
        ];
        let ls = vec![label("a", Label::Up), label("b", Label::Down), label("c", Label::Unknown)];
        let counts = aggregate(&hs, &ls, Frequency::Monthly, None).unwrap();
        assert_eq!(counts.len(), 1);
        let c = counts[0];
        assert_eq!((c.n_up, c.n_down, c.n_unknown, c.n_total), (1, 1, 1, 3));
    }

    #[test]
    fn gaps_are_emitted_and_abort_ratios() {
        let hs = vec![headline("a", "1996-01-02"), headline("b", "1996-03-02")];
        let counts = aggregate(&hs, &[], Frequency::Monthly, None).unwrap();
        assert_eq!(counts.len(), 3);
        assert_eq!(counts[1].n_total, 0);
        assert_eq!(counts[1].period.to_string(), "1996-02");
        // unlabeled headlines land in UNKNOWN
        assert_eq!(counts[0].n_unknown, 1);
        match ratios(&counts) {
            Err(Error::ZeroDenominator(p)) => assert_eq!(p, "1996-02"),
            other => panic!("expected zero denominator, got {other:?}"),
        }
    }

    #[test]
    fn referential_and_duplicate_errors() {
        let hs = vec![headline("a", "1996-01-02")];
        assert!(matches!(
            aggregate(&hs, &[label("zzz", Label::Up)], Frequency::Monthly, None),
            Err(Error::Referential(id)) if id == "zzz"
        ));
        assert!(matches!(
            aggregate(&hs, &[label("a", Label::Up), label("a", Label::Down)], Frequency::Monthly, None),
            Err(Error::Duplicate(_))
        ));
    }

    #[test]
    fn selector_picks_one_run() {
        let hs = vec![headline("a", "1996-01-02"), headline("b", "1996-01-03")];
        let mut other = label("a", Label::Down);
        other.source = "lexicon".into();
        let ls = vec![label("a", Label::Up), other];
        assert!(aggregate(&hs, &ls, Frequency::Monthly, None).is_err());
        let sel = LabelSelector {
            source: "lexicon".into(),
            prompt_id: "baseline".into(),
        };
        let c = aggregate(&hs, &ls, Frequency::Monthly, Some(&sel)).unwrap()[0];
        assert_eq!((c.n_up, c.n_down, c.n_unknown), (0, 1, 1));
    }

    #[test]
    fn ratio_arithmetic() {
        let p = Period::monthly(2000, 1);
        let c = PeriodCounts {
            period: p,
            n_up: 46,
            n_down: 32,
            n_unknown: 182,
            n_total: 260,
        };
        let r = ratios(&[c]).unwrap();
        assert!((r.nr_good.values()[0] - 0.176923).abs() < 1e-5);
        assert!((r.nr_bad.values()[0] - 0.123077).abs() < 1e-5);

        let unknown = PeriodCounts {
            n_up: 0,
            n_down: 0,
            n_unknown: 5,
            n_total: 5,
            period: p,
        };
        let r = ratios(&[unknown]).unwrap();
        assert_eq!((r.nr_good.values()[0], r.nr_bad.values()[0]), (0.0, 0.0));
    }

    #[test]
    fn summary_examples() {
        let mk = |n: u64, i: i64| PeriodCounts {
            period: Period::monthly(2000, 1).offset(i),
            n_up: n,
            n_down: 4,
            n_unknown: 0,
            n_total: n + 4,
        };
        let rows = summary_stats(&[mk(1, 0), mk(2, 1), mk(3, 2)]).unwrap();
        let good = rows.iter().find(|r| r.category == Category::Good).unwrap();
        assert_eq!((good.mean, good.std, good.median, good.total), (2.0, 1.0, 2.0, 6.0));
        let bad = rows.iter().find(|r| r.category == Category::Bad).unwrap();
        assert_eq!((bad.std, bad.skewness), (0.0, 0.0));

        assert!(summary_stats(&[mk(1, 0), mk(2, 1)]).is_err());
    }

    #[test]
    fn skewness_matches_adjusted_formula() {
        // [0, 0, 1, 5]: mean 1.5, m2 = 4.25, m3 = 9
        // G1 = sqrt(12)/2 * 9 / 4.25^1.5
        let xs = [0.0, 0.0, 1.0, 5.0];
        let expected = (12.0f64).sqrt() / 2.0 * 9.0 / 4.25f64.powf(1.5);
        let row = describe(Category::Total, &xs);
        assert!((row.skewness - expected).abs() < 1e-12);
        assert_eq!(row.median, 0.5);
    }

    #[test]
    fn file_formats_round_trip() {
        let hs = vec![headline("a", "1996-01-02"), headline("b", "1996-02-02")];
        let mut buf = Vec::new();
        write_headlines(&mut buf, &hs).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap().lines().next().unwrap(),
            r#"{"id":"a","date":"1996-01-02","text":"headline a"}"#
        );
        assert_eq!(read_headlines(&buf[..]).unwrap(), hs);

        let ls = vec![label("a", Label::Up), label("b", Label::Unknown)];
        let mut buf = Vec::new();
        write_labels(&mut buf, &ls).unwrap();
        assert!(String::from_utf8(buf.clone()).unwrap().starts_with("headline_id,label,source,prompt_id\n"));
        assert_eq!(read_labels(&buf[..]).unwrap(), ls);

        let counts = aggregate(&hs, &ls, Frequency::Monthly, None).unwrap();
        let mut buf = Vec::new();
        write_counts(&mut buf, &counts).unwrap();
        assert_eq!(read_counts(&buf[..]).unwrap(), counts);

        let r = ratios(&counts).unwrap();
        let mut buf = Vec::new();
        write_ratios(&mut buf, &r).unwrap();
        assert_eq!(read_ratios(&buf[..]).unwrap(), r);
    }

    #[test]
    fn labels_are_case_sensitive() {
        let csv = "headline_id,label,source,prompt_id\na,up,gpt,baseline\n";
        assert!(read_labels(csv.as_bytes()).is_err());
        let bad_header = "id,label,source,prompt_id\na,UP,gpt,baseline\n";
        assert!(read_labels(bad_header.as_bytes()).is_err());
    }

    #[test]
    fn empty_text_rejected() {
        let line = r#"{"id":"a","date":"1996-01-02","text":"   "}"#;
        assert!(read_headlines(line.as_bytes()).is_err());
    }

    mod props {
        use super::*;
        use proptest::prelude::*;

        proptest! {
            #[test]
            fn ordering_does_not_matter(
                days in proptest::collection::vec((0u32..90, 0u8..4), 1..40),
                seed in any::<u64>(),
            ) {
                let base = NaiveDate::from_ymd_opt(2000, 1, 1).unwrap();
                let hs: Vec<HeadlineRecord> = days.iter().enumerate().map(|(i, (d, _))| HeadlineRecord {
                    id: format!("h{i}"),
                    date: base + chrono::Duration::days(*d as i64),
                    text: "x".into(),
                }).collect();
                let ls: Vec<LabelRecord> = days.iter().enumerate().filter(|(_, (_, l))| *l < 3).map(|(i, (_, l))| {
                    label(&format!("h{i}"), [Label::Up, Label::Down, Label::Unknown][*l as usize])
                }).collect();
                let base_counts = aggregate(&hs, &ls, Frequency::Monthly, None).unwrap();
                let total: u64 = base_counts.iter().map(|c| c.n_total).sum();
                prop_assert_eq!(total as usize, hs.len());

                let mut hs2 = hs.clone();
                let mut ls2 = ls.clone();
                let k = (seed % 97) as usize;
                let n = hs2.len();
                hs2.rotate_left(k % n);
                hs2.reverse();
                if !ls2.is_empty() {
                    let n = ls2.len();
                    ls2.rotate_right(k % n);
                }
                prop_assert_eq!(aggregate(&hs2, &ls2, Frequency::Monthly, None).unwrap(), base_counts);
            }
        }
    }
}
