//! Report tables written by the command-line tool.
//!
//! Every table starts with one `#` comment line carrying the units and the
//! format version, followed by a CSV header. Percentages appear only here;
//! JSON summaries and series files hold decimals.

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use serde::de::DeserializeOwned;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::table::{write_table, FORMAT_VERSION};
use crate::timeseries::PeriodSeries;

pub fn comment(units: &str) -> String {
    format!("units: {units}; format_version={FORMAT_VERSION}")
}

fn create(path: &Path) -> Result<BufWriter<File>> {
    Ok(BufWriter::new(File::create(path).map_err(|e| Error::io(path, e))?))
}

/// Writes typed rows under a units comment.
pub fn write_rows<T: Serialize>(path: &Path, units: &str, rows: &[T]) -> Result<()> {
    let mut out = create(path)?;
    writeln!(out, "# {}", comment(units)).map_err(|e| Error::io(path, e))?;
    let mut w = csv::Writer::from_writer(out);
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io(path, e))?;
    Ok(())
}

/// Reads rows written by [`write_rows`].
pub fn read_rows<T: DeserializeOwned>(path: &Path) -> Result<Vec<T>> {
    let f = File::open(path).map_err(|e| Error::io(path, e))?;
    let mut rdr = csv::ReaderBuilder::new().comment(Some(b'#')).from_reader(f);
    rdr.deserialize()
        .map(|r| r.map_err(|e| Error::Parse(format!("{}: {e}", path.display()))))
        .collect()
}

pub fn write_series_table(path: &Path, units: &str, columns: &[(&str, &PeriodSeries)]) -> Result<()> {
    let mut out = create(path)?;
    write_table(&mut out, Some(&comment(units)), columns)?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut out = create(path)?;
    serde_json::to_writer_pretty(&mut out, value)?;
    out.write_all(b"\n").map_err(|e| Error::io(path, e))?;
    out.flush().map_err(|e| Error::io(path, e))
}

pub const PCT: f64 = 100.0;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InsampleRow {
    pub signal: String,
    pub horizon: usize,
    pub beta_pct: f64,
    pub t_nw: f64,
    pub t_hodrick: Option<f64>,
    pub r2_pct: f64,
    pub n_obs: usize,
}

pub const INSAMPLE_UNITS: &str = "beta_pct and r2_pct in percent; t statistics unitless";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OosRow {
    pub forecast: String,
    pub first_target: String,
    pub last_target: String,
    pub n_eval: usize,
    pub n_fallback: usize,
    pub r2_os_pct: f64,
    pub msfe_adjusted: f64,
    pub p_value: f64,
}

pub const OOS_UNITS: &str = "r2_os_pct in percent; msfe_adjusted unitless; p_value one-sided";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestRow {
    pub forecast: String,
    pub gamma: f64,
    pub tc_bp: f64,
    pub cer_gain_gross_pct: f64,
    pub cer_gain_net_pct: f64,
    pub sharpe_model_gross: f64,
    pub sharpe_model_net: f64,
    pub sharpe_benchmark_gross: f64,
    pub sharpe_benchmark_net: f64,
    pub market_sharpe: f64,
    pub mean_turnover: f64,
}

pub const BACKTEST_UNITS: &str =
    "cer gains in annualized percent; sharpe ratios annualized; tc_bp in basis points; turnover decimal";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroRow {
    pub proxy: String,
    pub signal: String,
    pub flavor: String,
    pub beta: f64,
    pub t_nw: f64,
    pub r2_pct: f64,
    pub n_obs: usize,
}

pub const MACRO_UNITS: &str = "beta in standard deviations of the proxy per standard deviation of the signal; r2_pct in percent";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct InteractRow {
    pub state: String,
    pub signal: String,
    pub horizon: usize,
    pub b_high_pct: Option<f64>,
    pub t_high: Option<f64>,
    pub b_low_pct: Option<f64>,
    pub t_low: Option<f64>,
    pub b_state_pct: Option<f64>,
    pub t_state: Option<f64>,
    pub r2_pct: f64,
    pub n_obs: usize,
    pub dropped: String,
}

pub const INTERACT_UNITS: &str =
    "coefficients and r2_pct in percent; t statistics use Hodrick for horizon >= 1 and Newey-West at horizon 0";

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermRow {
    pub label: String,
    pub term: String,
    pub count: u64,
    pub relative: f64,
}

pub const TERM_UNITS: &str = "count of stems; relative as decimal share of the class";

pub const SUMMARY_UNITS: &str = "headline counts per period";
