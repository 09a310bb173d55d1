use std::collections::HashMap;
use std::path::{Path, PathBuf};

use serde::Serialize;

use super::config::{Problems, RunConfig};
use super::report::{self, *};
use super::{
    Backend, BacktestArgs, ClassifyArgs, Cli, Command, IngestArgs, InsampleArgs, InteractArgs, MacroArgs,
    NoveltyArgs, OosArgs, OracleArgs, OutputTarget, Preset, RatiosArgs, SeriesArgs, SimulateArgs,
};
use crate::alloc::{backtest, BacktestConfig, BacktestSummary};
use crate::classify::{
    lexicon_classify, llm_classify, term_frequency_report, EndpointConfig, GatewayOptions, HttpTransport,
    LabelCache, Lexicon, PromptTemplate,
};
use crate::corpus::{self, aggregate, ratios, summary_stats, Label, LabelSelector};
use crate::econo::{
    interaction_regression, macro_link_regression, predictive_regression, principal_components, CovFlavor,
    DesignMatrix, FitReport, MacroFlavor, HIGH, HIGH_X_SIGNAL, LOW_X_SIGNAL, SIGNAL,
};
use crate::error::{Error, Result};
use crate::novelty::{
    economic_headline_ids, novelty_score, period_mean, read_embeddings_binary, read_embeddings_jsonl,
    similarity_dummy, Similarity,
};
use crate::oos::{
    combine, csfe_difference, recursive_forecast, CombineMethod, CombineOptions, ForecastOptions, ForecastPath,
    OosReport,
};
use crate::simgen::{self, oracle_suite, simulate_corpus, DgpConfig, LabelLink, OracleSettings};
use crate::table::{read_table_file, SeriesTable};
use crate::timeseries::{trailing_mean_dummy, Frequency, Period, PeriodSeries};

const DEFAULT_SIGNALS: [&str; 2] = ["nr_good", "nr_bad"];
const DEFAULT_HORIZONS: [usize; 6] = [0, 1, 3, 6, 9, 12];
const DEFAULT_STATE_WINDOW: usize = 60;

pub(super) fn dispatch(cli: &Cli) -> Result<()> {
    if let Command::Simulate(a) = &cli.command {
        return simulate(cli, a);
    }
    let cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    let out = OutputTarget::resolve(cli.out.as_deref(), cfg.output.dir.as_deref());
    match &cli.command {
        Command::Ingest(a) => ingest(&cfg, &out, a),
        Command::Classify(a) => classify(&cfg, &out, a),
        Command::Ratios(a) => ratios_cmd(&cfg, &out, a),
        Command::Insample(a) => insample(&cfg, &out, a),
        Command::Oos(a) => oos(&cfg, &out, a),
        Command::Backtest(a) => backtest_cmd(&cfg, &out, a),
        Command::Macro(a) => macro_cmd(&cfg, &out, a),
        Command::Interact(a) => interact(&cfg, &out, a),
        Command::Novelty(a) => novelty(&cfg, &out, a),
        Command::Oracle(a) => oracle(cli, &cfg, &out, a),
        Command::Simulate(_) => unreachable!("handled above"),
    }
}

fn write_with<F>(path: &Path, f: F) -> Result<()>
where
    F: FnOnce(&mut std::io::BufWriter<std::fs::File>) -> Result<()>,
{
    let file = std::fs::File::create(path).map_err(|e| Error::io(path, e))?;
    let mut w = std::io::BufWriter::new(file);
    f(&mut w)?;
    std::io::Write::flush(&mut w).map_err(|e| Error::io(path, e))
}

fn list<T: Clone>(flag: &[T], cfg: Option<&Vec<T>>, default: &[T]) -> Vec<T> {
    if !flag.is_empty() {
        flag.to_vec()
    } else {
        cfg.cloned().unwrap_or_else(|| default.to_vec())
    }
}

fn frequency(p: &mut Problems, flag: Option<&String>, cfg: &RunConfig) -> Option<Frequency> {
    let raw = flag.or(cfg.analysis.frequency.as_ref()).map_or("monthly", String::as_str);
    p.parse("frequency", raw)
}

fn period(p: &mut Problems, what: &str, flag: Option<&String>, cfg: Option<&String>) -> Option<Period> {
    match flag.or(cfg) {
        None => {
            p.push(format!("{what}: no value given"));
            None
        }
        Some(raw) => p.parse(what, raw),
    }
}

fn selector(p: &mut Problems, source: Option<&String>, prompt: Option<&String>) -> Option<LabelSelector> {
    match (source, prompt) {
        (Some(s), Some(q)) => Some(LabelSelector {
            source: s.clone(),
            prompt_id: q.clone(),
        }),
        (None, None) => None,
        _ => {
            p.push("source and prompt_id must be given together");
            None
        }
    }
}

// ---- shared series inputs ----

struct SeriesInputs {
    returns: PeriodSeries,
    rf: Option<PeriodSeries>,
    signals: Vec<(String, PeriodSeries)>,
}

struct SeriesPaths {
    returns: Option<PathBuf>,
    ratios: Option<PathBuf>,
    signals: Vec<String>,
    returns_column: String,
    rf_column: String,
}

fn series_paths(p: &mut Problems, a: &SeriesArgs, cfg: &RunConfig) -> SeriesPaths {
    let default_signals: Vec<String> = DEFAULT_SIGNALS.iter().map(|s| s.to_string()).collect();
    let signals = list(&a.signal, cfg.analysis.signals.as_ref(), &default_signals);
    p.check(!signals.is_empty(), "signals: at least one signal column is required");
    SeriesPaths {
        returns: p.input("returns", a.returns.as_ref(), cfg.paths.returns.as_ref()),
        ratios: p.input("ratios", a.ratios.as_ref(), cfg.paths.ratios.as_ref()),
        signals,
        returns_column: a
            .returns_column
            .clone()
            .or_else(|| cfg.analysis.returns_column.clone())
            .unwrap_or_else(|| "ret".into()),
        rf_column: a
            .rf_column
            .clone()
            .or_else(|| cfg.analysis.rf_column.clone())
            .unwrap_or_else(|| "rf".into()),
    }
}

fn load_series(sp: &SeriesPaths) -> Result<SeriesInputs> {
    let rt = read_table_file(sp.returns.as_deref().expect("validated"))?;
    let returns = rt.column(&sp.returns_column)?.clone();
    let rf = rt.names().contains(&sp.rf_column.as_str()).then(|| rt.column(&sp.rf_column).cloned()).transpose()?;
    let st = read_table_file(sp.ratios.as_deref().expect("validated"))?;
    let signals = sp
        .signals
        .iter()
        .map(|s| Ok((s.clone(), st.column(s)?.clone())))
        .collect::<Result<_>>()?;
    Ok(SeriesInputs { returns, rf, signals })
}

fn columns(table: &SeriesTable, wanted: &[String]) -> Result<Vec<(String, PeriodSeries)>> {
    if wanted.is_empty() {
        return Ok(table.columns.clone());
    }
    wanted.iter().map(|n| Ok((n.clone(), table.column(n)?.clone()))).collect()
}

// ---- ingest / classify / ratios ----

fn ingest(cfg: &RunConfig, out: &OutputTarget, a: &IngestArgs) -> Result<()> {
    let mut p = Problems::default();
    let headlines = p.input("headlines", a.headlines.as_ref(), cfg.paths.headlines.as_ref());
    let labels = p.input("labels", a.labels.as_ref(), cfg.paths.labels.as_ref());
    let freq = frequency(&mut p, a.frequency.as_ref(), cfg);
    let sel = selector(
        &mut p,
        a.source.as_ref().or(cfg.analysis.source.as_ref()),
        a.prompt_id.as_ref().or(cfg.analysis.prompt_id.as_ref()),
    );
    p.finish()?;

    let headlines = corpus::read_headlines_file(&headlines.expect("validated"))?;
    let labels = corpus::read_labels_file(&labels.expect("validated"))?;
    let counts = aggregate(&headlines, &labels, freq.expect("validated"), sel.as_ref())?;
    let nr = ratios(&counts)?;
    out.create()?;
    write_with(&out.aux("counts.csv"), |w| corpus::write_counts(w, &counts))?;
    write_with(&out.primary("ratios.csv"), |w| corpus::write_ratios(w, &nr))?;
    match summary_stats(&counts) {
        Ok(rows) => {
            write_rows(&out.aux("summary.csv"), SUMMARY_UNITS, &rows)?;
        }
        Err(Error::InsufficientData(m)) => log::warn!("summary statistics skipped: {m}"),
        Err(e) => return Err(e),
    }
    Ok(())
}

fn classify(cfg: &RunConfig, out: &OutputTarget, a: &ClassifyArgs) -> Result<()> {
    let mut p = Problems::default();
    let headlines = p.input("headlines", a.headlines.as_ref(), cfg.paths.headlines.as_ref());
    let pos = p.optional_input(
        "lexicon-positive",
        a.lexicon_positive.as_ref(),
        cfg.paths.lexicon_positive.as_ref(),
    );
    let neg = p.optional_input(
        "lexicon-negative",
        a.lexicon_negative.as_ref(),
        cfg.paths.lexicon_negative.as_ref(),
    );
    let prompt = a.prompt.clone().or_else(|| cfg.analysis.prompt_id.clone());
    let mut endpoint = None;
    let mut template = None;
    match a.backend {
        Backend::Lexicon => {
            p.check(
                pos.is_some() == neg.is_some(),
                "lexicon-positive and lexicon-negative must be given together",
            );
        }
        Backend::Llm => {
            endpoint = p.input("endpoint", a.endpoint.as_ref(), cfg.paths.endpoint.as_ref());
            let id = prompt.clone().unwrap_or_else(|| "baseline".into());
            template = PromptTemplate::builtin(&id);
            p.check(
                template.is_some(),
                format!(
                    "prompt: unknown prompt `{id}` (known: {})",
                    PromptTemplate::builtin_ids().join(", ")
                ),
            );
        }
    }
    p.finish()?;

    let headlines = corpus::read_headlines_file(&headlines.expect("validated"))?;
    out.create()?;
    let labels = match a.backend {
        Backend::Lexicon => {
            let lex = match (&pos, &neg) {
                (Some(pp), Some(nn)) => Lexicon::from_files(pp, nn)?,
                _ => Lexicon::bundled(),
            };
            let id = prompt.unwrap_or_else(|| "lexicon".into());
            headlines.iter().map(|h| lexicon_classify(h, &lex, &id)).collect::<Vec<_>>()
        }
        Backend::Llm => {
            let ep = EndpointConfig::from_file(&endpoint.expect("validated"))?;
            let transport = HttpTransport::new(&ep)?;
            let cache_path = a
                .cache
                .clone()
                .or_else(|| cfg.paths.cache.clone())
                .unwrap_or_else(|| out.aux("llm_cache.jsonl"));
            let cache = LabelCache::open(&cache_path)?;
            let opts = GatewayOptions::from_endpoint(&ep);
            llm_classify(&headlines, &template.expect("validated"), &transport, &cache, &opts)?
        }
    };
    write_with(&out.primary("labels.csv"), |w| corpus::write_labels(w, &labels))?;

    if a.terms {
        let by_id: HashMap<String, Label> = labels.iter().map(|l| (l.headline_id.clone(), l.label)).collect();
        let rows: Vec<TermRow> = term_frequency_report(&headlines, &by_id, a.min_count)
            .into_iter()
            .flat_map(|(label, terms)| {
                terms.into_iter().map(move |t| TermRow {
                    label: label.to_string(),
                    term: t.term,
                    count: t.count,
                    relative: t.relative,
                })
            })
            .collect();
        write_rows(&out.aux("terms.csv"), TERM_UNITS, &rows)?;
    }
    Ok(())
}

fn ratios_cmd(cfg: &RunConfig, out: &OutputTarget, a: &RatiosArgs) -> Result<()> {
    let mut p = Problems::default();
    let counts = p.input("counts", a.counts.as_ref(), cfg.paths.counts.as_ref());
    p.finish()?;
    let path = counts.expect("validated");
    let f = std::fs::File::open(&path).map_err(|e| Error::io(&path, e))?;
    let nr = ratios(&corpus::read_counts(f)?)?;
    out.create()?;
    write_with(&out.primary("ratios.csv"), |w| corpus::write_ratios(w, &nr))
}

// ---- regressions ----

fn insample(cfg: &RunConfig, out: &OutputTarget, a: &InsampleArgs) -> Result<()> {
    let mut p = Problems::default();
    let sp = series_paths(&mut p, &a.series, cfg);
    let horizons = list(&a.horizons, cfg.analysis.horizons.as_ref(), &DEFAULT_HORIZONS);
    p.check(!horizons.is_empty(), "horizons: at least one horizon is required");
    let controls = p.optional_input("controls", a.controls.as_ref(), cfg.paths.controls.as_ref());
    let pcs = a.pcs.or(cfg.analysis.pcs).filter(|k| *k > 0);
    p.check(
        pcs.is_none() || controls.is_some(),
        "pcs: principal components need a controls table",
    );
    p.finish()?;

    let inputs = load_series(&sp)?;
    let controls = match controls {
        None => None,
        Some(path) => {
            let t = read_table_file(&path)?;
            let cols: Vec<(&str, &PeriodSeries)> = t.columns.iter().map(|(n, s)| (n.as_str(), s)).collect();
            let design = DesignMatrix::from_series(&cols)?;
            Some(match pcs {
                Some(k) => principal_components(&design, k)?.scores,
                None => design,
            })
        }
    };
    let control_names = controls.as_ref().map(|c| c.names().join("+")).unwrap_or_default();

    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (name, signal) in &inputs.signals {
        for &h in &horizons {
            let fit = predictive_regression(signal, &inputs.returns, h, controls.as_ref())?;
            rows.push(InsampleRow {
                signal: name.clone(),
                horizon: h,
                beta_pct: fit.coefficient(SIGNAL).expect("signal column") * PCT,
                t_nw: fit.t_stat(SIGNAL, CovFlavor::NeweyWest).expect("signal column"),
                t_hodrick: fit.t_stat(SIGNAL, CovFlavor::Hodrick),
                r2_pct: fit.r_squared * PCT,
                n_obs: fit.n_obs,
            });
            let mut spec = format!("insample signal={name} horizon={h}");
            if !control_names.is_empty() {
                spec.push_str(&format!(" controls={control_names}"));
            }
            reports.push(FitReport::from_fit(spec, &fit));
        }
    }
    out.create()?;
    write_rows(&out.primary("insample.csv"), INSAMPLE_UNITS, &rows)?;
    write_json(&out.aux("insample.json"), &reports)
}

fn macro_cmd(cfg: &RunConfig, out: &OutputTarget, a: &MacroArgs) -> Result<()> {
    let mut p = Problems::default();
    let proxies = p.input("macro", a.macro_proxies.as_ref(), cfg.paths.macro_proxies.as_ref());
    let ratios_path = p.input("ratios", a.ratios.as_ref(), cfg.paths.ratios.as_ref());
    let default_signals: Vec<String> = DEFAULT_SIGNALS.iter().map(|s| s.to_string()).collect();
    let signals = list(&a.signal, cfg.analysis.signals.as_ref(), &default_signals);
    p.finish()?;

    let proxies = columns(&read_table_file(&proxies.expect("validated"))?, &a.proxies)?;
    let st = read_table_file(&ratios_path.expect("validated"))?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (proxy, y) in &proxies {
        for s in &signals {
            let x = st.column(s)?;
            for (flavor, label) in [(MacroFlavor::Simple, "simple"), (MacroFlavor::ArControlled, "ar")] {
                let fit = macro_link_regression(y, x, flavor)?;
                rows.push(MacroRow {
                    proxy: proxy.clone(),
                    signal: s.clone(),
                    flavor: label.into(),
                    beta: fit.coefficient(SIGNAL).expect("signal column"),
                    t_nw: fit.t_stat(SIGNAL, CovFlavor::NeweyWest).expect("signal column"),
                    r2_pct: fit.r_squared * PCT,
                    n_obs: fit.n_obs,
                });
                reports.push(FitReport::from_fit(
                    format!("macro proxy={proxy} signal={s} flavor={label}"),
                    &fit,
                ));
            }
        }
    }
    out.create()?;
    write_rows(&out.primary("macro.csv"), MACRO_UNITS, &rows)?;
    write_json(&out.aux("macro.json"), &reports)
}

fn interact(cfg: &RunConfig, out: &OutputTarget, a: &InteractArgs) -> Result<()> {
    let mut p = Problems::default();
    let sp = series_paths(&mut p, &a.series, cfg);
    let state = p.input("state", a.state.as_ref(), cfg.paths.state.as_ref());
    let horizons = list(&a.horizons, cfg.analysis.horizons.as_ref(), &DEFAULT_HORIZONS);
    let window = a.window.or(cfg.analysis.dummy_window).unwrap_or(DEFAULT_STATE_WINDOW);
    p.check(window > 0, "window: must be positive");
    p.finish()?;

    let inputs = load_series(&sp)?;
    let states = columns(&read_table_file(&state.expect("validated"))?, &a.states)?;
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    let mut dummies = Vec::new();
    for (state_name, base) in &states {
        let dummy = trailing_mean_dummy(base, window)?;
        for (name, signal) in &inputs.signals {
            for &h in &horizons {
                let fit = interaction_regression(signal, &inputs.returns, &dummy, h)?;
                let flavor = if h >= 1 { CovFlavor::Hodrick } else { CovFlavor::NeweyWest };
                let b = |n: &str| fit.coefficient(n).map(|v| v * PCT);
                let t = |n: &str| fit.t_stat(n, flavor);
                rows.push(InteractRow {
                    state: state_name.clone(),
                    signal: name.clone(),
                    horizon: h,
                    b_high_pct: b(HIGH_X_SIGNAL),
                    t_high: t(HIGH_X_SIGNAL),
                    b_low_pct: b(LOW_X_SIGNAL),
                    t_low: t(LOW_X_SIGNAL),
                    b_state_pct: b(HIGH),
                    t_state: t(HIGH),
                    r2_pct: fit.r_squared * PCT,
                    n_obs: fit.n_obs,
                    dropped: fit.dropped.join("+"),
                });
                reports.push(FitReport::from_fit(
                    format!("interact state={state_name} window={window} signal={name} horizon={h}"),
                    &fit,
                ));
            }
        }
        dummies.push((format!("{state_name}_high"), dummy.high()));
    }
    out.create()?;
    write_rows(&out.primary("interact.csv"), INTERACT_UNITS, &rows)?;
    write_json(&out.aux("interact.json"), &reports)?;
    // dummies share the state table's period range
    let cols: Vec<(&str, &PeriodSeries)> = dummies.iter().map(|(n, s)| (n.as_str(), s)).collect();
    write_series_table(&out.aux("state_dummies.csv"), "indicator 0/1", &cols)
}

// ---- out-of-sample and allocation ----

struct OosSetup {
    inputs: SeriesInputs,
    train_end: Period,
    opts: ForecastOptions,
    combine: CombineOptions,
}

fn oos_setup(
    p: &mut Problems,
    cfg: &RunConfig,
    series: &SeriesArgs,
    train_end: Option<&String>,
    min_train: Option<usize>,
    discount: Option<f64>,
) -> (SeriesPaths, Option<Period>, ForecastOptions, CombineOptions) {
    let sp = series_paths(p, series, cfg);
    let te = period(p, "train_end", train_end, cfg.analysis.train_end.as_ref());
    let opts = ForecastOptions {
        min_train: min_train.or(cfg.analysis.min_train).unwrap_or(ForecastOptions::default().min_train),
    };
    let discount = discount.or(cfg.analysis.discount).unwrap_or(1.0);
    p.check(
        discount > 0.0 && discount <= 1.0,
        format!("discount: must be in (0, 1], got {discount}"),
    );
    let combine = CombineOptions {
        discount,
        ..CombineOptions::default()
    };
    (sp, te, opts, combine)
}

fn forecast_paths(s: &OosSetup) -> Result<Vec<(String, ForecastPath)>> {
    s.inputs
        .signals
        .iter()
        .map(|(name, signal)| Ok((name.clone(), recursive_forecast(signal, &s.inputs.returns, s.train_end, s.opts)?)))
        .collect()
}

fn fallback_series(path: &ForecastPath) -> PeriodSeries {
    PeriodSeries::new(path.start(), path.fallback.iter().map(|&f| if f { 1.0 } else { 0.0 }).collect())
}

#[derive(Serialize)]
struct NamedOos {
    forecast: String,
    #[serde(flatten)]
    report: OosReport,
}

fn oos(cfg: &RunConfig, out: &OutputTarget, a: &OosArgs) -> Result<()> {
    let mut p = Problems::default();
    let (sp, te, opts, copts) = oos_setup(&mut p, cfg, &a.series, a.train_end.as_ref(), a.min_train, a.discount);
    let methods: Vec<CombineMethod> = list(&a.combine, cfg.analysis.combine.as_ref(), &[])
        .iter()
        .filter_map(|m| p.parse("combine", m))
        .collect();
    p.finish()?;

    let setup = OosSetup {
        inputs: load_series(&sp)?,
        train_end: te.expect("validated"),
        opts,
        combine: copts,
    };
    let members = forecast_paths(&setup)?;
    let mut all: Vec<(String, ForecastPath)> = members.clone();
    out.create()?;
    let member_paths: Vec<ForecastPath> = members.iter().map(|(_, p)| p.clone()).collect();
    for m in methods {
        let c = combine(&member_paths, m, setup.combine)?;
        let theta = PeriodSeries::new(c.path.start(), c.theta.clone());
        let weights: Vec<(String, PeriodSeries)> = members
            .iter()
            .enumerate()
            .map(|(j, (n, _))| {
                (
                    format!("w_{n}"),
                    PeriodSeries::new(c.path.start(), c.weights.iter().map(|w| w[j]).collect()),
                )
            })
            .collect();
        let mut cols: Vec<(&str, &PeriodSeries)> = vec![("theta", &theta)];
        cols.extend(weights.iter().map(|(n, s)| (n.as_str(), s)));
        write_series_table(&out.aux(&format!("combination_{m}.csv")), "decimal weights", &cols)?;
        all.push((m.to_string(), c.path));
    }

    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for (name, path) in &all {
        let rep = OosReport::from_path(path)?;
        let fb = fallback_series(path);
        write_series_table(
            &out.aux(&format!("forecasts_{name}.csv")),
            "decimal returns; fallback 0/1",
            &[
                ("realized", &path.realized),
                ("benchmark", &path.benchmark),
                ("model", &path.model),
                ("fallback", &fb),
            ],
        )?;
        write_series_table(
            &out.aux(&format!("csfe_{name}.csv")),
            "cumulative squared forecast error difference, decimal returns squared",
            &[("csfe", &csfe_difference(path))],
        )?;
        rows.push(OosRow {
            forecast: name.clone(),
            first_target: rep.first_target.to_string(),
            last_target: rep.last_target.to_string(),
            n_eval: rep.n_eval,
            n_fallback: rep.n_fallback,
            r2_os_pct: rep.r2_os * PCT,
            msfe_adjusted: rep.msfe_adjusted,
            p_value: rep.p_value,
        });
        reports.push(NamedOos {
            forecast: name.clone(),
            report: rep,
        });
    }
    write_rows(&out.primary("oos.csv"), OOS_UNITS, &rows)?;
    write_json(&out.aux("oos.json"), &reports)
}

fn parse_bounds(raw: &str) -> std::result::Result<(f64, f64), String> {
    let parts: Vec<&str> = raw.split(',').map(str::trim).collect();
    match parts.as_slice() {
        [lo, hi] => Ok((
            lo.parse().map_err(|_| format!("bad lower bound `{lo}`"))?,
            hi.parse().map_err(|_| format!("bad upper bound `{hi}`"))?,
        )),
        _ => Err(format!("expected `lo,hi`, got `{raw}`")),
    }
}

#[derive(Serialize)]
struct NamedBacktest {
    forecast: String,
    #[serde(flatten)]
    summary: BacktestSummary,
}

fn backtest_cmd(cfg: &RunConfig, out: &OutputTarget, a: &BacktestArgs) -> Result<()> {
    let mut p = Problems::default();
    let (sp, te, opts, copts) = oos_setup(&mut p, cfg, &a.series, a.train_end.as_ref(), a.min_train, a.discount);
    let forecast = a.forecast.clone().or_else(|| sp.signals.first().cloned()).unwrap_or_default();
    let combination: Option<CombineMethod> = forecast.parse().ok();
    p.check(
        combination.is_some() || sp.signals.contains(&forecast),
        format!("forecast: `{forecast}` is neither a signal nor mc, imc, iwc"),
    );
    let base = BacktestConfig::default();
    let gammas = list(&a.gamma, cfg.analysis.gammas.as_ref(), &[base.gamma]);
    p.check(!gammas.is_empty(), "gamma: at least one value is required");
    let tc_bp = a.tc_bp.or(cfg.analysis.tc_bp).unwrap_or(base.tc_rate * 1e4);
    let bounds = match a.bounds.as_deref() {
        Some(raw) => match parse_bounds(raw) {
            Ok(b) => Some(b),
            Err(m) => {
                p.push(format!("bounds: {m}"));
                None
            }
        },
        None => Some(cfg.analysis.bounds.unwrap_or(base.weight_bounds)),
    };
    let window = a.window.or(cfg.analysis.variance_window).unwrap_or(base.variance_window);
    let configs: Vec<BacktestConfig> = gammas
        .iter()
        .map(|&gamma| BacktestConfig {
            gamma,
            weight_bounds: bounds.unwrap_or(base.weight_bounds),
            variance_window: window,
            tc_rate: tc_bp / 1e4,
            ..base
        })
        .collect();
    for c in &configs {
        for m in c.problems() {
            p.push(format!("backtest (gamma {}): {m}", c.gamma));
        }
    }
    p.finish()?;

    let setup = OosSetup {
        inputs: load_series(&sp)?,
        train_end: te.expect("validated"),
        opts,
        combine: copts,
    };
    let members = forecast_paths(&setup)?;
    let path = match combination {
        Some(m) => {
            let paths: Vec<ForecastPath> = members.into_iter().map(|(_, p)| p).collect();
            combine(&paths, m, setup.combine)?.path
        }
        None => members.into_iter().find(|(n, _)| *n == forecast).expect("validated").1,
    };

    let ppy = setup.inputs.returns.frequency().periods_per_year();
    out.create()?;
    let mut rows = Vec::new();
    let mut summaries = Vec::new();
    for c in configs {
        let c = BacktestConfig {
            periods_per_year: ppy,
            ..c
        };
        let cmp = backtest(&path, &setup.inputs.returns, setup.inputs.rf.as_ref(), &c)?;
        let s = BacktestSummary::new(&cmp, &c);
        write_series_table(
            &out.aux(&format!("backtest_paths_gamma{}.csv", c.gamma)),
            "weights decimal; returns decimal per period",
            &[
                ("w_model", &cmp.model.weights),
                ("w_benchmark", &cmp.benchmark.weights),
                ("gross_model", &cmp.model.gross),
                ("net_model", &cmp.model.net),
                ("gross_benchmark", &cmp.benchmark.gross),
                ("net_benchmark", &cmp.benchmark.net),
            ],
        )?;
        rows.push(BacktestRow {
            forecast: forecast.clone(),
            gamma: c.gamma,
            tc_bp,
            cer_gain_gross_pct: s.cer_gain_gross * PCT,
            cer_gain_net_pct: s.cer_gain_net * PCT,
            sharpe_model_gross: s.sharpe_model_gross,
            sharpe_model_net: s.sharpe_model_net,
            sharpe_benchmark_gross: s.sharpe_benchmark_gross,
            sharpe_benchmark_net: s.sharpe_benchmark_net,
            market_sharpe: s.market_sharpe,
            mean_turnover: s.mean_turnover_model,
        });
        summaries.push(NamedBacktest {
            forecast: forecast.clone(),
            summary: s,
        });
    }
    write_rows(&out.primary("backtest.csv"), BACKTEST_UNITS, &rows)?;
    write_json(&out.aux("backtest.json"), &summaries)
}

// ---- novelty ----

fn novelty(cfg: &RunConfig, out: &OutputTarget, a: &NoveltyArgs) -> Result<()> {
    let mut p = Problems::default();
    let emb = p.input("embeddings", a.embeddings.as_ref(), cfg.paths.embeddings.as_ref());
    let lookback = a.lookback.or(cfg.analysis.lookback).unwrap_or(5);
    p.check(lookback > 0, "lookback: must be positive");
    let sim: Option<Similarity> = p.parse(
        "similarity",
        a.similarity.as_deref().or(cfg.analysis.similarity.as_deref()).unwrap_or("pearson"),
    );
    let window = a.window.or(cfg.analysis.dummy_window).unwrap_or(DEFAULT_STATE_WINDOW);
    p.check(window > 0, "window: must be positive");
    let headlines = if a.economic {
        p.input("headlines", a.headlines.as_ref(), cfg.paths.headlines.as_ref())
    } else {
        None
    };
    p.finish()?;

    let emb = emb.expect("validated");
    let jsonl = matches!(emb.extension().and_then(|e| e.to_str()), Some("jsonl" | "json"));
    let mut records = if jsonl {
        let f = std::fs::File::open(&emb).map_err(|e| Error::io(&emb, e))?;
        read_embeddings_jsonl(f)?
    } else {
        read_embeddings_binary(&emb)?
    };
    if let Some(h) = headlines {
        let keep = economic_headline_ids(&corpus::read_headlines_file(&h)?);
        records.retain(|r| keep.contains(&r.headline_id));
    }
    let sim = sim.expect("validated");
    let means = period_mean(&records)?;
    let nov = novelty_score(&means, lookback, sim)?;
    let similarity = nov.map(|v| 1.0 - v);
    let high = similarity_dummy(&means, lookback, window, sim)?.high();
    let counts = PeriodSeries::new(nov.start(), means[1..].iter().map(|m| m.count as f64).collect());
    out.create()?;
    write_series_table(
        &out.primary("novelty.csv"),
        "novelty and similarity unitless; similarity_high 0/1; n_headlines count",
        &[
            ("novelty", &nov),
            ("similarity", &similarity),
            ("similarity_high", &high),
            ("n_headlines", &counts),
        ],
    )
}

// ---- simulation and oracles ----

fn load_dgp(path: &Path) -> Result<DgpConfig> {
    match DgpConfig::load(path) {
        Ok(c) => Ok(c),
        Err(dgp_err) => {
            let run = RunConfig::load(path).map_err(|_| dgp_err)?;
            let dgp = run.paths.dgp.ok_or_else(|| {
                Error::Config(vec![format!(
                    "{}: neither a DGP config nor a run config with [paths].dgp",
                    path.display()
                )])
            })?;
            DgpConfig::load(&dgp)
        }
    }
}

fn simulate(cli: &Cli, a: &SimulateArgs) -> Result<()> {
    let mut dgp = match &cli.config {
        Some(path) => load_dgp(path)?,
        None => match a.preset {
            Preset::Default => DgpConfig::default(),
            Preset::Strong => DgpConfig::strong_link(1),
            Preset::Null => DgpConfig {
                label_link: LabelLink::default().null(),
                ..DgpConfig::strong_link(1)
            },
        },
    };
    if let Some(s) = cli.seed {
        dgp.seed = s;
    }
    if let Some(n) = a.periods {
        dgp.periods = n;
    }
    let mut p = Problems::default();
    for m in dgp.problems() {
        p.push(m);
    }
    p.finish()?;

    let out = OutputTarget::resolve(a.out_dir.as_deref().or(cli.out.as_deref()), None);
    let corpus = simulate_corpus(&dgp)?;
    let market = simgen::simulate_market(&dgp)?;
    out.create()?;
    write_with(&out.aux("headlines.jsonl"), |w| corpus::write_headlines(w, &corpus.headlines))?;
    write_with(&out.aux("labels.csv"), |w| corpus::write_labels(w, &corpus.labels))?;
    write_series_table(&out.aux("returns.csv"), "decimal excess returns", &[("ret", &market.returns)])?;
    write_series_table(&out.aux("latent.csv"), "unit-variance latent signal", &[("signal", &market.signal)])?;
    let path = out.aux("dgp.toml");
    std::fs::write(&path, dgp.to_toml()).map_err(|e| Error::io(&path, e))
}

fn oracle(cli: &Cli, _cfg: &RunConfig, out: &OutputTarget, a: &OracleArgs) -> Result<()> {
    let base = OracleSettings::default();
    let settings = OracleSettings {
        fixtures: a.fixtures.unwrap_or(base.fixtures),
        tolerance_scale: a.tolerance_scale.unwrap_or(base.tolerance_scale),
        seed: cli.seed.unwrap_or(base.seed),
    };
    let mut p = Problems::default();
    p.check(settings.fixtures > 0, "fixtures: must be positive");
    p.check(
        settings.tolerance_scale >= 0.0,
        "tolerance_scale: must be non-negative",
    );
    p.finish()?;
    let rep = oracle_suite(&settings)?;
    out.create()?;
    report::write_json(&out.primary("oracle.json"), &rep)?;
    rep.into_result().map(|_| ())
}
