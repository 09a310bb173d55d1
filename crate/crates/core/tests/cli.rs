mod common;

use std::path::Path;

use common::*;
use newsratio::cli::report::{
    read_rows, write_rows, BacktestRow, InsampleRow, InteractRow, MacroRow, OosRow, TermRow, BACKTEST_UNITS,
    INSAMPLE_UNITS, INTERACT_UNITS, MACRO_UNITS, OOS_UNITS, SUMMARY_UNITS, TERM_UNITS,
};
use newsratio::corpus::{read_counts, read_labels_file, read_ratios, write_counts, write_labels, write_ratios, SummaryRow};
use newsratio::simgen::oracles;
use newsratio::table::{read_table_file, write_table};

const SUBCOMMANDS: [&str; 11] = [
    "ingest", "classify", "ratios", "insample", "oos", "backtest", "macro", "interact", "novelty", "simulate",
    "oracle",
];

#[test]
fn help_succeeds_everywhere() {
    ok(&["--help"]);
    for cmd in SUBCOMMANDS {
        let out = ok(&[cmd, "--help"]);
        assert!(String::from_utf8_lossy(&out.stdout).contains("Usage"), "{cmd}");
    }
}

#[test]
fn unknown_subcommand_exits_2_with_usage() {
    let out = newsratio(&["regress-everything"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("Usage"));
}

#[test]
fn config_problems_are_all_reported() {
    let dir = tempfile::tempdir().unwrap();
    let out = newsratio(&[
        "backtest", "--returns", "/missing/returns.csv", "--gamma=-1", "--bounds", "2,1", "--out",
        s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "config");
    let problems: Vec<String> = err["problems"]
        .as_array()
        .unwrap()
        .iter()
        .map(|v| v.as_str().unwrap().to_string())
        .collect();
    for needle in ["returns", "ratios", "train_end", "gamma", "bound"] {
        assert!(problems.iter().any(|p| p.contains(needle)), "{needle} missing from {problems:?}");
    }
}

#[test]
fn runtime_errors_are_json() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture("insample");
    let out = newsratio(&[
        "insample", "--returns", s(&fx.join("returns.csv")), "--ratios", s(&fx.join("ratios.csv")), "--signal",
        "nr_ugly", "--out", s(dir.path()),
    ]);
    assert_eq!(out.status.code(), Some(1));
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(err["error"], "parse");
    assert!(err["message"].as_str().unwrap().contains("nr_ugly"));
}

#[test]
fn golden_insample_is_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture("insample");
    ok(&["insample", "--config", s(&fx.join("run.toml")), "--out", s(dir.path())]);
    let got = std::fs::read(dir.path().join("insample.csv")).unwrap();
    let want = std::fs::read(fx.join("expected_insample.csv")).unwrap();
    assert_eq!(String::from_utf8(got).unwrap(), String::from_utf8(want).unwrap());
}

fn close(a: f64, b: f64, tol: f64) -> bool {
    (a - b).abs() <= tol * b.abs().max(1.0)
}

#[test]
fn golden_insample_agrees_with_oracles() {
    let fx = fixture("insample");
    let rows: Vec<InsampleRow> = read_rows(&fx.join("expected_insample.csv")).unwrap();
    let r = read_table_file(&fx.join("returns.csv")).unwrap();
    let r = r.column("ret").unwrap().values().to_vec();
    let signals = read_table_file(&fx.join("ratios.csv")).unwrap();
    assert_eq!(rows.len(), 8);
    for row in rows {
        let x = signals.column(&row.signal).unwrap().values();
        assert_eq!(x.len(), r.len());
        let h = row.horizon;
        let n = r.len() - h;
        let y: Vec<f64> = if h == 0 {
            r.clone()
        } else {
            (0..n).map(|t| r[t + 1..=t + h].iter().sum::<f64>() / h as f64).collect()
        };
        let xs = &x[..n];
        let m = xs.iter().sum::<f64>() / n as f64;
        let sd = (xs.iter().map(|v| (v - m).powi(2)).sum::<f64>() / (n as f64 - 1.0)).sqrt();
        let z: Vec<f64> = xs.iter().map(|v| (v - m) / sd).collect();
        let rows_x = oracles::rows_with_intercept(&[z]);
        let beta = oracles::normal_equations(&rows_x, &y).unwrap();
        let e = oracles::residuals(&rows_x, &y, &beta);
        let ybar = y.iter().sum::<f64>() / n as f64;
        let sst: f64 = y.iter().map(|v| (v - ybar).powi(2)).sum();
        let r2 = 1.0 - e.iter().map(|v| v * v).sum::<f64>() / sst;
        let nw = oracles::newey_west(&rows_x, &e, h.max(1)).unwrap();

        assert_eq!(row.n_obs, n);
        assert!(close(row.beta_pct, beta[1] * 100.0, 1e-8), "{row:?} vs {}", beta[1]);
        assert!(close(row.r2_pct, r2 * 100.0, 1e-8), "{row:?}");
        assert!(close(row.t_nw, beta[1] / nw[1][1].sqrt(), 1e-8), "{row:?}");
        if h == 0 {
            assert!(row.t_hodrick.is_none());
        } else {
            let future = &r[1..];
            let fm = future.iter().sum::<f64>() / future.len() as f64;
            let e1: Vec<f64> = future.iter().map(|v| v - fm).collect();
            let v = oracles::hodrick(&rows_x, &e1, h).unwrap();
            assert!(close(row.t_hodrick.unwrap(), beta[1] / v[1][1].sqrt(), 1e-8), "{row:?}");
        }
    }
}

#[test]
fn flags_override_config_values() {
    let dir = tempfile::tempdir().unwrap();
    let fx = fixture("insample");
    ok(&[
        "insample", "--config", s(&fx.join("run.toml")), "--horizons", "6", "--signal", "nr_bad", "--out",
        s(&dir.path().join("t.csv")),
    ]);
    let rows: Vec<InsampleRow> = read_rows(&dir.path().join("t.csv")).unwrap();
    assert_eq!(rows.len(), 1);
    assert_eq!((rows[0].signal.as_str(), rows[0].horizon), ("nr_bad", 6));
    assert!(dir.path().join("insample.json").is_file());
}

#[test]
fn simulate_accepts_dgp_and_run_configs() {
    let dir = tempfile::tempdir().unwrap();
    let dgp = dir.path().join("dgp.toml");
    std::fs::write(&dgp, "seed = 4\nperiods = 64\nbeta = 0.01\nnoise_sd = 0.04\nsignal_persistence = 0.5\n").unwrap();
    ok(&["simulate", "--config", s(&dgp), "--out-dir", s(&dir.path().join("a"))]);
    let run = dir.path().join("run.toml");
    std::fs::write(&run, "[paths]\ndgp = \"dgp.toml\"\n").unwrap();
    ok(&["simulate", "--config", s(&run), "--out-dir", s(&dir.path().join("b"))]);
    assert_eq!(snapshot(&dir.path().join("a")), snapshot(&dir.path().join("b")));
    let ret = read_table_file(&dir.path().join("a/returns.csv")).unwrap();
    assert_eq!(ret.column("ret").unwrap().len(), 64);

    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "seed = 4\nperiods = 1\nbeta = 0.01\nnoise_sd = -1\nsignal_persistence = 1.5\n").unwrap();
    let out = newsratio(&["simulate", "--config", s(&bad), "--out-dir", s(&dir.path().join("c"))]);
    let err: serde_json::Value = serde_json::from_slice(&out.stderr).unwrap();
    assert!(err["problems"].as_array().unwrap().len() >= 3, "{err}");
}

#[test]
fn novelty_reads_both_embedding_formats() {
    let dir = tempfile::tempdir().unwrap();
    ok(&["simulate", "--periods", "60", "--out-dir", s(dir.path())]);
    let (jsonl, binary) = write_embeddings(&dir.path().join("headlines.jsonl"), dir.path());
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    ok(&["novelty", "--embeddings", s(&jsonl), "--out", s(&a)]);
    ok(&["novelty", "--embeddings", s(&binary), "--out", s(&b)]);
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
    let t = read_table_file(&a).unwrap();
    assert_eq!(t.names(), ["novelty", "similarity", "similarity_high", "n_headlines"]);
    assert_eq!(t.column("novelty").unwrap().len(), 59);

    // synthetic headlines carry no economic keywords
    let out = newsratio(&[
        "novelty", "--embeddings", s(&jsonl), "--economic", "--headlines", s(&dir.path().join("headlines.jsonl")),
        "--out", s(&dir.path().join("c.csv")),
    ]);
    assert_eq!(out.status.code(), Some(1));
}

fn rewrite_rows<T: serde::Serialize + serde::de::DeserializeOwned>(path: &Path, units: &str) -> Vec<u8> {
    let rows: Vec<T> = read_rows(path).unwrap();
    let tmp = tempfile::NamedTempFile::new().unwrap();
    write_rows(tmp.path(), units, &rows).unwrap();
    std::fs::read(tmp.path()).unwrap()
}

/// Reads a file with the project's reader and writes it back; the bytes must match.
fn round_trip(path: &Path) -> Vec<u8> {
    let name = path.file_name().unwrap().to_str().unwrap();
    let text = std::fs::read_to_string(path).unwrap();
    let mut buf = Vec::new();
    match name {
        "labels.csv" => write_labels(&mut buf, &read_labels_file(path).unwrap()).unwrap(),
        "counts.csv" => write_counts(&mut buf, &read_counts(text.as_bytes()).unwrap()).unwrap(),
        "ratios.csv" => write_ratios(&mut buf, &read_ratios(text.as_bytes()).unwrap()).unwrap(),
        "insample.csv" => buf = rewrite_rows::<InsampleRow>(path, INSAMPLE_UNITS),
        "oos.csv" => buf = rewrite_rows::<OosRow>(path, OOS_UNITS),
        "backtest.csv" => buf = rewrite_rows::<BacktestRow>(path, BACKTEST_UNITS),
        "macro.csv" => buf = rewrite_rows::<MacroRow>(path, MACRO_UNITS),
        "interact.csv" => buf = rewrite_rows::<InteractRow>(path, INTERACT_UNITS),
        "terms.csv" => buf = rewrite_rows::<TermRow>(path, TERM_UNITS),
        "summary.csv" => buf = rewrite_rows::<SummaryRow>(path, SUMMARY_UNITS),
        _ => {
            let table = read_table_file(path).unwrap();
            let comment = text.lines().next().unwrap().strip_prefix("# ").map(str::to_string);
            let cols: Vec<(&str, &newsratio::timeseries::PeriodSeries)> =
                table.columns.iter().map(|(n, s)| (n.as_str(), s)).collect();
            write_table(&mut buf, comment.as_deref(), &cols).unwrap();
        }
    }
    buf
}

#[test]
fn every_emitted_csv_round_trips() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), 2);
    let files = snapshot(dir.path());
    let mut checked = 0;
    for (rel, bytes) in &files {
        if rel.extension().and_then(|e| e.to_str()) != Some("csv") {
            continue;
        }
        let again = round_trip(&dir.path().join(rel));
        assert_eq!(
            String::from_utf8_lossy(&again),
            String::from_utf8_lossy(bytes),
            "{}",
            rel.display()
        );
        checked += 1;
    }
    assert!(checked >= 30, "only {checked} csv files");
}

#[test]
fn report_tables_carry_units_and_version() {
    let dir = tempfile::tempdir().unwrap();
    pipeline(dir.path(), 1);
    for (rel, bytes) in snapshot(dir.path()) {
        let top = rel.components().next().unwrap().as_os_str().to_str().unwrap().to_string();
        let is_report = rel.extension().and_then(|e| e.to_str()) == Some("csv")
            && !matches!(top.as_str(), "ingest" | "ratios" | "classify")
            && rel.file_name().unwrap() != "labels.csv";
        if is_report {
            let first = String::from_utf8(bytes).unwrap().lines().next().unwrap().to_string();
            assert!(first.starts_with("# units: ") && first.ends_with("format_version=1"), "{}", rel.display());
        }
    }
}
