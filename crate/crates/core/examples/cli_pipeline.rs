//! The command-line workflow driven in-process: simulate a corpus, count
//! headlines into news ratios, then run the in-sample regressions.
//! Output lands in a temporary directory that is printed at the end.

fn run(args: &[&str]) {
    let argv: Vec<&str> = std::iter::once("newsratio").chain(args.iter().copied()).collect();
    let code = newsratio::cli::run(argv);
    assert_eq!(code, 0, "{args:?}");
}

fn main() {
    let dir = std::env::temp_dir().join(format!("newsratio-cli-{}", std::process::id()));
    let p = |name: &str| dir.join(name).to_string_lossy().into_owned();

    run(&["simulate", "--seed", "4", "--periods", "120", "--out", &p("sim")]);
    run(&[
        "ingest",
        "--headlines",
        &p("sim/headlines.jsonl"),
        "--labels",
        &p("sim/labels.csv"),
        "--out",
        &p("ingest"),
    ]);
    run(&[
        "insample",
        "--returns",
        &p("sim/returns.csv"),
        "--ratios",
        &p("ingest/ratios.csv"),
        "--horizons",
        "1,3",
        "--out",
        &p("insample"),
    ]);
    print!("{}", std::fs::read_to_string(dir.join("insample/insample.csv")).unwrap());
    println!("outputs in {}", dir.display());
}
