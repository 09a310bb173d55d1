#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use newsratio::corpus::read_headlines_file;
use newsratio::novelty::{write_embeddings_binary, write_embeddings_jsonl, EmbeddingRecord};
use newsratio::timeseries::{Frequency, Period};

pub fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_newsratio")
}

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

pub fn newsratio(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

/// Runs and panics with stderr on a nonzero exit.
pub fn ok(args: &[&str]) -> Output {
    let out = newsratio(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

pub fn s(p: &Path) -> &str {
    p.to_str().expect("utf-8 path")
}

/// Random embeddings, one per headline, so the novelty command has input.
pub fn write_embeddings(headlines: &Path, dir: &Path) -> (PathBuf, PathBuf) {
    let hs = read_headlines_file(headlines).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let records: Vec<EmbeddingRecord> = hs
        .iter()
        .map(|h| EmbeddingRecord {
            headline_id: h.id.clone(),
            period: Period::containing(Frequency::Monthly, h.date),
            vector: (0..8).map(|_| rng.random_range(-1.0f32..1.0) as f64).collect(),
        })
        .collect();
    let jsonl = dir.join("emb.jsonl");
    write_embeddings_jsonl(std::fs::File::create(&jsonl).unwrap(), &records).unwrap();
    let binary = dir.join("emb.f32");
    write_embeddings_binary(&binary, &records).unwrap();
    (jsonl, binary)
}

/// Every subcommand except the LLM backend, writing into `work/<cmd>`.
pub fn pipeline(work: &Path, threads: usize) {
    let t = threads.to_string();
    let sim = work.join("simulate");
    ok(&["simulate", "--threads", &t, "--seed", "3", "--periods", "150", "--out-dir", s(&sim)]);
    let h = sim.join("headlines.jsonl");
    let ing = work.join("ingest");
    ok(&["ingest", "--threads", &t, "--headlines", s(&h), "--labels", s(&sim.join("labels.csv")), "--out", s(&ing)]);
    let cls = work.join("classify");
    ok(&["classify", "--threads", &t, "--headlines", s(&h), "--terms", "--out", s(&cls)]);
    let rat = work.join("ratios");
    ok(&["ratios", "--threads", &t, "--counts", s(&ing.join("counts.csv")), "--out", s(&rat)]);

    let returns = sim.join("returns.csv");
    let latent = sim.join("latent.csv");
    let ratios = ing.join("ratios.csv");
    let series = ["--returns", s(&returns), "--ratios", s(&ratios)];
    let mut args = vec!["insample", "--threads", &t, "--horizons", "0,1,3,12"];
    args.extend(series);
    let ins = work.join("insample");
    args.extend(["--controls", s(&latent), "--out", s(&ins)]);
    ok(&args);

    let oos_dir = work.join("oos");
    let mut args = vec!["oos", "--threads", &t, "--train-end", "2001-12", "--combine", "mc,imc,iwc"];
    args.extend(series);
    args.extend(["--out", s(&oos_dir)]);
    ok(&args);

    let bt = work.join("backtest");
    let mut args = vec![
        "backtest", "--threads", &t, "--train-end", "2001-12", "--gamma", "3,5", "--tc-bp", "50", "--bounds", "0,1.5",
        "--window", "60", "--forecast", "imc",
    ];
    args.extend(series);
    args.extend(["--out", s(&bt)]);
    ok(&args);

    let mac = work.join("macro");
    ok(&["macro", "--threads", &t, "--macro", s(&latent), "--ratios", s(&ratios), "--out", s(&mac)]);

    let int = work.join("interact");
    let mut args = vec!["interact", "--threads", &t, "--state", s(&latent), "--horizons", "1,3", "--window", "24"];
    args.extend(series);
    args.extend(["--out", s(&int)]);
    ok(&args);

    let inputs = work.join("embeddings");
    std::fs::create_dir_all(&inputs).unwrap();
    let (jsonl, _) = write_embeddings(&h, &inputs);
    ok(&[
        "novelty", "--threads", &t, "--embeddings", s(&jsonl), "--lookback", "5", "--window", "24", "--out",
        s(&work.join("novelty").join("novelty.csv")),
    ]);

    ok(&["oracle", "--threads", &t, "--fixtures", "4", "--out", s(&work.join("oracle"))]);
}

/// Relative path -> bytes for every file below `dir`.
pub fn snapshot(dir: &Path) -> BTreeMap<PathBuf, Vec<u8>> {
    let mut out = BTreeMap::new();
    let mut stack = vec![dir.to_path_buf()];
    while let Some(d) = stack.pop() {
        for entry in std::fs::read_dir(&d).unwrap() {
            let p = entry.unwrap().path();
            if p.is_dir() {
                stack.push(p);
            } else {
                out.insert(p.strip_prefix(dir).unwrap().to_path_buf(), std::fs::read(&p).unwrap());
            }
        }
    }
    out
}
