//! Wide CSV tables of period series: `period,<col>,<col>,...`.
//!
//! Lines starting with `#` are comments; report tables use one to carry
//! units and the format version.

use std::io::{Read, Write};
use std::path::Path;

use crate::error::{Error, Result};
use crate::timeseries::{Period, PeriodSeries};

/// Output format version stamped into every report table.
pub const FORMAT_VERSION: &str = "1";

#[derive(Debug, Clone, PartialEq)]
pub struct SeriesTable {
    pub columns: Vec<(String, PeriodSeries)>,
}

impl SeriesTable {
    pub fn column(&self, name: &str) -> Result<&PeriodSeries> {
        self.columns
            .iter()
            .find(|(n, _)| n == name)
            .map(|(_, s)| s)
            .ok_or_else(|| {
                Error::Parse(format!(
                    "column `{name}` not found (have: {})",
                    self.names().join(", ")
                ))
            })
    }

    pub fn names(&self) -> Vec<&str> {
        self.columns.iter().map(|(n, _)| n.as_str()).collect()
    }
}

/// Reads a wide table. Rows must be contiguous periods of one frequency;
/// empty cells are rejected.
pub fn read_table(reader: impl Read) -> Result<SeriesTable> {
    let mut rdr = csv::ReaderBuilder::new()
        .comment(Some(b'#'))
        .from_reader(reader);
    let headers = rdr.headers()?.clone();
    if headers.get(0) != Some("period") {
        return Err(Error::Parse("first column must be `period`".into()));
    }
    let names: Vec<String> = headers.iter().skip(1).map(str::to_string).collect();
    let mut periods = Vec::new();
    let mut cols: Vec<Vec<f64>> = vec![Vec::new(); names.len()];
    for rec in rdr.records() {
        let rec = rec?;
        let p = Period::parse(rec.get(0).unwrap_or_default())?;
        for (j, col) in cols.iter_mut().enumerate() {
            let cell = rec.get(j + 1).unwrap_or_default().trim();
            let v: f64 = cell
                .parse()
                .map_err(|_| Error::Parse(format!("bad value `{cell}` for `{}` at {p}", names[j])))?;
            col.push(v);
        }
        periods.push(p);
    }
    let columns = names
        .into_iter()
        .zip(cols)
        .map(|(name, values)| {
            let pairs: Vec<(Period, f64)> = periods.iter().copied().zip(values).collect();
            Ok((name, PeriodSeries::from_pairs(&pairs)?))
        })
        .collect::<Result<_>>()?;
    Ok(SeriesTable { columns })
}

pub fn read_table_file(path: &Path) -> Result<SeriesTable> {
    let f = std::fs::File::open(path).map_err(|e| Error::io(path, e))?;
    read_table(f).map_err(|e| match e {
        Error::Parse(m) => Error::Parse(format!("{}: {m}", path.display())),
        other => other,
    })
}

/// Writes series that share one period range as a wide table.
pub fn write_table(
    mut writer: impl Write,
    comment: Option<&str>,
    columns: &[(&str, &PeriodSeries)],
) -> Result<()> {
    let first = columns
        .first()
        .ok_or_else(|| Error::InsufficientData("no columns to write".into()))?
        .1;
    for (name, s) in columns {
        if s.start() != first.start() || s.len() != first.len() {
            return Err(Error::Alignment(format!("column `{name}` is not aligned")));
        }
    }
    if let Some(c) = comment {
        writeln!(writer, "# {c}").map_err(|e| Error::io("<table>", e))?;
    }
    let mut w = csv::Writer::from_writer(writer);
    let mut header = vec!["period".to_string()];
    header.extend(columns.iter().map(|(n, _)| n.to_string()));
    w.write_record(&header)?;
    for i in 0..first.len() {
        let mut row = vec![first.period_at(i).to_string()];
        row.extend(columns.iter().map(|(_, s)| s.values()[i].to_string()));
        w.write_record(&row)?;
    }
    w.flush().map_err(|e| Error::io("<table>", e))?;
    Ok(())
}
