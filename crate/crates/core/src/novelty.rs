//! Embedding-based news novelty.
//!
//! Each period's headline embeddings are averaged into one vector; novelty
//! is one minus the highest similarity between that vector and the vectors
//! of up to `lookback` preceding periods. Similarity is the Pearson
//! correlation across vector components by default.

use std::collections::{BTreeMap, HashSet};
use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::corpus::HeadlineRecord;
use crate::error::{Error, Result};
use crate::timeseries::{trailing_mean_dummy, Period, PeriodSeries, StateDummy};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EmbeddingRecord {
    pub headline_id: String,
    pub period: Period,
    pub vector: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PeriodEmbedding {
    pub period: Period,
    pub mean: Vec<f64>,
    pub count: usize,
}

/// Checks dimension (inferred from the first record, at least 2), finiteness
/// and id uniqueness.
pub fn validate_embeddings(records: &[EmbeddingRecord]) -> Result<usize> {
    let first = records
        .first()
        .ok_or_else(|| Error::InsufficientData("no embeddings".into()))?;
    let d = first.vector.len();
    if d < 2 {
        return Err(Error::Parse(format!("embedding dimension {d} is below 2")));
    }
    let mut seen = HashSet::new();
    for r in records {
        if r.vector.len() != d {
            return Err(Error::Parse(format!(
                "embedding `{}` has dimension {}, expected {d}",
                r.headline_id,
                r.vector.len()
            )));
        }
        if r.vector.iter().any(|v| !v.is_finite()) {
            return Err(Error::Parse(format!("embedding `{}` has a non-finite component", r.headline_id)));
        }
        if !seen.insert(r.headline_id.as_str()) {
            return Err(Error::Duplicate(format!("embedding for headline `{}`", r.headline_id)));
        }
    }
    Ok(d)
}

/// JSON-lines: `{"headline_id": .., "period": "YYYY-MM", "vector": [..]}`.
pub fn read_embeddings_jsonl(reader: impl Read) -> Result<Vec<EmbeddingRecord>> {
    let mut out = Vec::new();
    for (i, line) in BufReader::new(reader).lines().enumerate() {
        let line = line.map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        if line.trim().is_empty() {
            continue;
        }
        let rec: EmbeddingRecord =
            serde_json::from_str(&line).map_err(|e| Error::Parse(format!("line {}: {e}", i + 1)))?;
        out.push(rec);
    }
    validate_embeddings(&out)?;
    Ok(out)
}

pub fn write_embeddings_jsonl(mut writer: impl Write, records: &[EmbeddingRecord]) -> Result<()> {
    for r in records {
        serde_json::to_writer(&mut writer, r)?;
        writeln!(writer).map_err(|e| Error::io("<embeddings>", e))?;
    }
    Ok(())
}

/// Sidecar header of the binary format.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BinaryHeader {
    pub dim: usize,
    pub rows: usize,
    pub headline_ids: Vec<String>,
    pub periods: Vec<Period>,
}

/// Path of the JSON sidecar for a binary embedding file (`x.f32` -> `x.f32.json`).
pub fn sidecar_path(path: &Path) -> PathBuf {
    let mut s = path.as_os_str().to_owned();
    s.push(".json");
    PathBuf::from(s)
}

/// Little-endian f32 rows plus a JSON sidecar. Values are rounded to f32.
pub fn write_embeddings_binary(path: &Path, records: &[EmbeddingRecord]) -> Result<()> {
    let dim = validate_embeddings(records)?;
    let header = BinaryHeader {
        dim,
        rows: records.len(),
        headline_ids: records.iter().map(|r| r.headline_id.clone()).collect(),
        periods: records.iter().map(|r| r.period).collect(),
    };
    let f = File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = BufWriter::new(f);
    for r in records {
        for v in &r.vector {
            w.write_all(&(*v as f32).to_le_bytes()).map_err(|e| Error::io(path, e))?;
        }
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    let side = sidecar_path(path);
    let f = File::create(&side).map_err(|e| Error::io(&side, e))?;
    serde_json::to_writer_pretty(f, &header)?;
    Ok(())
}

pub fn read_embeddings_binary(path: &Path) -> Result<Vec<EmbeddingRecord>> {
    let side = sidecar_path(path);
    let f = File::open(&side).map_err(|e| Error::io(&side, e))?;
    let header: BinaryHeader = serde_json::from_reader(BufReader::new(f))?;
    if header.headline_ids.len() != header.rows || header.periods.len() != header.rows {
        return Err(Error::Parse("sidecar ids/periods do not match the row count".into()));
    }
    let bytes = std::fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != header.rows * header.dim * 4 {
        return Err(Error::Parse(format!(
            "{} bytes for {} rows of dimension {}",
            bytes.len(),
            header.rows,
            header.dim
        )));
    }
    let values: Vec<f64> = bytes
        .chunks_exact(4)
        .map(|c| f32::from_le_bytes([c[0], c[1], c[2], c[3]]) as f64)
        .collect();
    let out: Vec<EmbeddingRecord> = header
        .headline_ids
        .into_iter()
        .zip(header.periods)
        .enumerate()
        .map(|(i, (headline_id, period))| EmbeddingRecord {
            headline_id,
            period,
            vector: values[i * header.dim..(i + 1) * header.dim].to_vec(),
        })
        .collect();
    validate_embeddings(&out)?;
    Ok(out)
}

/// Componentwise mean per period. Periods between the first and last that
/// have no embeddings are an error. Records are summed in headline-id order,
/// so the result does not depend on input order.
pub fn period_mean(records: &[EmbeddingRecord]) -> Result<Vec<PeriodEmbedding>> {
    let d = validate_embeddings(records)?;
    let mut groups: BTreeMap<Period, Vec<&EmbeddingRecord>> = BTreeMap::new();
    for r in records {
        groups.entry(r.period).or_default().push(r);
    }
    let freq = records[0].period.frequency;
    if groups.keys().any(|p| p.frequency != freq) {
        return Err(Error::Frequency("embedding periods mix frequencies".into()));
    }
    let first = *groups.keys().next().expect("non-empty");
    let last = *groups.keys().next_back().expect("non-empty");
    let mut out = Vec::new();
    let mut p = first;
    while p <= last {
        let mut members = groups
            .remove(&p)
            .ok_or_else(|| Error::InsufficientData(format!("period {p} has no embeddings")))?;
        members.sort_by(|a, b| a.headline_id.cmp(&b.headline_id));
        let mut mean = vec![0.0; d];
        for m in &members {
            for (acc, v) in mean.iter_mut().zip(&m.vector) {
                *acc += v;
            }
        }
        let n = members.len() as f64;
        mean.iter_mut().for_each(|v| *v /= n);
        if mean.iter().all(|v| *v == 0.0) {
            log::warn!("mean embedding of {p} is the zero vector");
        }
        out.push(PeriodEmbedding {
            period: p,
            mean,
            count: members.len(),
        });
        p = p.next();
    }
    Ok(out)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Similarity {
    #[default]
    Pearson,
    Cosine,
}

impl std::str::FromStr for Similarity {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "pearson" | "correlation" => Ok(Similarity::Pearson),
            "cosine" => Ok(Similarity::Cosine),
            other => Err(Error::Parse(format!("unknown similarity `{other}`"))),
        }
    }
}

/// Vectors prepared so that similarity is a plain dot product.
fn normalized(v: &[f64], sim: Similarity, period: Period) -> Result<Vec<f64>> {
    let centered: Vec<f64> = match sim {
        Similarity::Pearson => {
            let m = v.iter().sum::<f64>() / v.len() as f64;
            v.iter().map(|x| x - m).collect()
        }
        Similarity::Cosine => v.to_vec(),
    };
    let norm = centered.iter().map(|x| x * x).sum::<f64>().sqrt();
    if !(norm > 0.0) {
        return Err(Error::Degenerate(format!("mean embedding of {period} has no variation")));
    }
    Ok(centered.into_iter().map(|x| x / norm).collect())
}

pub fn similarity(a: &[f64], b: &[f64], sim: Similarity) -> Result<f64> {
    let p = Period::monthly(1970, 1);
    let (a, b) = (normalized(a, sim, p)?, normalized(b, sim, p)?);
    Ok(a.iter().zip(&b).map(|(x, y)| x * y).sum())
}

fn check_contiguous(means: &[PeriodEmbedding]) -> Result<()> {
    for w in means.windows(2) {
        if w[1].period != w[0].period.next() {
            return Err(Error::Alignment(format!("mean embeddings jump from {} to {}", w[0].period, w[1].period)));
        }
    }
    Ok(())
}

/// Highest similarity to up to `lookback` predecessors, from the second
/// period on.
pub fn max_similarity(means: &[PeriodEmbedding], lookback: usize, sim: Similarity) -> Result<PeriodSeries> {
    if lookback == 0 {
        return Err(Error::Domain("lookback must be positive".into()));
    }
    if means.len() < lookback + 1 {
        return Err(Error::InsufficientData(format!(
            "{} periods for a lookback of {lookback}",
            means.len()
        )));
    }
    check_contiguous(means)?;
    let unit: Vec<Vec<f64>> = means
        .iter()
        .map(|m| normalized(&m.mean, sim, m.period))
        .collect::<Result<_>>()?;
    let values = (1..unit.len())
        .map(|t| {
            (1..=lookback.min(t))
                .map(|j| unit[t].iter().zip(&unit[t - j]).map(|(x, y)| x * y).sum::<f64>())
                .fold(f64::NEG_INFINITY, f64::max)
        })
        .collect();
    Ok(PeriodSeries::new(means[1].period, values))
}

/// Novelty_t = 1 - max_{1<=j<=lookback} sim(e_t, e_{t-j}).
pub fn novelty_score(means: &[PeriodEmbedding], lookback: usize, sim: Similarity) -> Result<PeriodSeries> {
    Ok(max_similarity(means, lookback, sim)?.map(|s| 1.0 - s))
}

/// High-similarity state: similarity above its trailing `window` mean.
pub fn similarity_dummy(
    means: &[PeriodEmbedding],
    lookback: usize,
    window: usize,
    sim: Similarity,
) -> Result<StateDummy> {
    let s = novelty_score(means, lookback, sim)?.map(|n| 1.0 - n);
    trailing_mean_dummy(&s, window)
}

/// Economic keyword list used to select economically relevant headlines.
pub const ECONOMIC_KEYWORDS: &[&str] = &[
    "dow jones",
    "stock exchange",
    "stock prices",
    "stock market",
    "nasdaq market",
    "nasdaq stock",
    "security exchange",
    "security price",
    "security market",
    "interest rate",
    "debt market",
    "security",
    "market",
    "economy",
    "fed",
    "bank",
    "finance",
    "monetary",
];

fn words(text: &str) -> Vec<String> {
    text.split(|c: char| !c.is_alphanumeric())
        .filter(|w| !w.is_empty())
        .map(str::to_lowercase)
        .collect()
}

/// True when the headline contains a keyword as a whole-token sequence,
/// ignoring case.
pub fn is_economic(text: &str) -> bool {
    let toks = words(text);
    ECONOMIC_KEYWORDS.iter().any(|k| {
        let kw: Vec<&str> = k.split(' ').collect();
        toks.windows(kw.len()).any(|w| w.iter().zip(&kw).all(|(a, b)| a == b))
    })
}

pub fn economic_headline_ids(headlines: &[HeadlineRecord]) -> HashSet<String> {
    headlines
        .iter()
        .filter(|h| is_economic(&h.text))
        .map(|h| h.id.clone())
        .collect()
}
