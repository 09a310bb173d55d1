//! Mean-variance market-timing backtest.
//!
//! An investor holds `w_t` in the market and the rest in the risk-free
//! asset, with `w_t = clamp(fcst / (gamma * var), bounds)`. The variance is
//! the sample variance of the trailing `variance_window` realized excess
//! returns. Weights and forecasts are indexed by the period they are held
//! over (the forecast target), so `R^p_t = w_t R_t + R^f_t`.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::oos::ForecastPath;
use crate::timeseries::{mean, sample_variance, Period, PeriodSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BacktestConfig {
    pub gamma: f64,
    pub weight_bounds: (f64, f64),
    pub variance_window: usize,
    /// Proportional cost per unit of turnover, decimal (50bp = 0.005).
    pub tc_rate: f64,
    pub periods_per_year: u32,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        Self {
            gamma: 3.0,
            weight_bounds: (0.0, 1.5),
            variance_window: 60,
            tc_rate: 0.005,
            periods_per_year: 12,
        }
    }
}

impl BacktestConfig {
    /// Every violated constraint, not just the first.
    pub fn problems(&self) -> Vec<String> {
        let mut out = Vec::new();
        if !(self.gamma > 0.0 && self.gamma.is_finite()) {
            out.push(format!("gamma must be positive, got {}", self.gamma));
        }
        let (lo, hi) = self.weight_bounds;
        if !(lo < hi) {
            out.push(format!("weight bounds must satisfy low < high, got [{lo}, {hi}]"));
        }
        if self.variance_window < 12 {
            out.push(format!("variance window must be at least 12, got {}", self.variance_window));
        }
        if !(self.tc_rate >= 0.0 && self.tc_rate.is_finite()) {
            out.push(format!("transaction cost must be non-negative, got {}", self.tc_rate));
        }
        if self.periods_per_year == 0 {
            out.push("periods per year must be positive".into());
        }
        out
    }

    pub fn validate(&self) -> Result<()> {
        let p = self.problems();
        if p.is_empty() {
            Ok(())
        } else {
            Err(Error::Config(p))
        }
    }
}

/// Portfolio weights for every forecast target that has a full variance
/// window of realized returns before it; earlier targets are skipped.
pub fn weights_from_forecasts(
    forecasts: &PeriodSeries,
    realized: &PeriodSeries,
    cfg: &BacktestConfig,
) -> Result<PeriodSeries> {
    cfg.validate()?;
    if forecasts.frequency() != realized.frequency() {
        return Err(Error::Frequency("forecasts and realized returns differ in frequency".into()));
    }
    let (lo, hi) = cfg.weight_bounds;
    let mut pairs = Vec::new();
    for (period, fcst) in forecasts.iter() {
        let p = period.ordinal - realized.start().ordinal;
        if p < cfg.variance_window as i64 || p > realized.len() as i64 {
            continue;
        }
        let p = p as usize;
        let window = &realized.values()[p - cfg.variance_window..p];
        let var = sample_variance(window);
        if window.iter().all(|v| *v == window[0]) || !(var > 0.0) {
            return Err(Error::Degenerate(format!("trailing return variance is zero before {period}")));
        }
        pairs.push((period, (fcst / (cfg.gamma * var)).clamp(lo, hi)));
    }
    if pairs.is_empty() {
        return Err(Error::InsufficientData(format!(
            "no forecast has {} prior realized returns",
            cfg.variance_window
        )));
    }
    PeriodSeries::from_pairs(&pairs)
}

/// One strategy's path and annualized summary.
#[derive(Debug, Clone, PartialEq)]
pub struct BacktestReport {
    pub weights: PeriodSeries,
    pub gross: PeriodSeries,
    pub net: PeriodSeries,
    pub turnover: PeriodSeries,
    pub cer_gross: f64,
    pub cer_net: f64,
    pub sharpe_gross: f64,
    pub sharpe_net: f64,
}

/// Annualized certainty-equivalent return, (mean - gamma/2 var) * ppy.
pub fn cer(portfolio: &[f64], gamma: f64, periods_per_year: u32) -> f64 {
    (mean(portfolio) - 0.5 * gamma * sample_variance(portfolio)) * periods_per_year as f64
}

/// Annualized Sharpe ratio of excess returns; 0 when they do not vary.
pub fn sharpe(excess: &[f64], periods_per_year: u32) -> f64 {
    let sd = sample_variance(excess).sqrt();
    if sd > 0.0 {
        mean(excess) / sd * (periods_per_year as f64).sqrt()
    } else {
        0.0
    }
}

fn covering(series: &PeriodSeries, from: Period, to: Period, what: &str) -> Result<Vec<f64>> {
    let s = series.slice(from, to)?;
    if s.start() != from || s.end() != to {
        return Err(Error::Alignment(format!("{what} does not cover {from}..{to}")));
    }
    Ok(s.into_values())
}

impl BacktestReport {
    /// Evaluates fixed weights against excess returns and risk-free rates
    /// covering the weight periods.
    pub fn evaluate(
        weights: &PeriodSeries,
        excess: &PeriodSeries,
        rf: Option<&PeriodSeries>,
        cfg: &BacktestConfig,
    ) -> Result<Self> {
        cfg.validate()?;
        let (from, to) = (weights.start(), weights.end());
        let r = covering(excess, from, to, "returns")?;
        let rf = match rf {
            Some(s) => covering(s, from, to, "risk-free rates")?,
            None => vec![0.0; weights.len()],
        };
        let w = weights.values();
        let mut prev = 0.0;
        let turnover: Vec<f64> = w
            .iter()
            .map(|&wt| {
                let d = (wt - prev).abs();
                prev = wt;
                d
            })
            .collect();
        let gross: Vec<f64> = (0..w.len()).map(|t| w[t] * r[t] + rf[t]).collect();
        let net: Vec<f64> = (0..w.len()).map(|t| gross[t] - cfg.tc_rate * turnover[t]).collect();
        let excess_of = |p: &[f64]| -> Vec<f64> { p.iter().zip(&rf).map(|(a, b)| a - b).collect() };
        let ppy = cfg.periods_per_year;
        Ok(Self {
            cer_gross: cer(&gross, cfg.gamma, ppy),
            cer_net: cer(&net, cfg.gamma, ppy),
            sharpe_gross: sharpe(&excess_of(&gross), ppy),
            sharpe_net: sharpe(&excess_of(&net), ppy),
            weights: weights.clone(),
            gross: PeriodSeries::new(from, gross),
            net: PeriodSeries::new(from, net),
            turnover: PeriodSeries::new(from, turnover),
        })
    }
}

/// Model against benchmark, both charged the same costs.
#[derive(Debug, Clone, PartialEq)]
pub struct BacktestComparison {
    pub model: BacktestReport,
    pub benchmark: BacktestReport,
    pub cer_gain_gross: f64,
    pub cer_gain_net: f64,
    /// Sharpe ratio of holding the market (w = 1) over the same periods.
    pub market_sharpe: f64,
}

/// Runs the strategy on the model and the benchmark forecasts of `path`.
/// `returns` must cover the variance window before the first target.
pub fn backtest(
    path: &ForecastPath,
    returns: &PeriodSeries,
    rf: Option<&PeriodSeries>,
    cfg: &BacktestConfig,
) -> Result<BacktestComparison> {
    let realized = covering(returns, path.start(), path.end(), "returns")?;
    if realized != path.realized.values() {
        return Err(Error::Alignment("returns disagree with the realized values of the forecast path".into()));
    }
    let wm = weights_from_forecasts(&path.model, returns, cfg)?;
    let wb = weights_from_forecasts(&path.benchmark, returns, cfg)?;
    let model = BacktestReport::evaluate(&wm, returns, rf, cfg)?;
    let benchmark = BacktestReport::evaluate(&wb, returns, rf, cfg)?;
    let market = covering(returns, wm.start(), wm.end(), "returns")?;
    Ok(BacktestComparison {
        cer_gain_gross: model.cer_gross - benchmark.cer_gross,
        cer_gain_net: model.cer_net - benchmark.cer_net,
        market_sharpe: sharpe(&market, cfg.periods_per_year),
        model,
        benchmark,
    })
}

/// Flat JSON summary of a comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BacktestSummary {
    pub gamma: f64,
    pub tc_rate: f64,
    pub first: Period,
    pub last: Period,
    pub n_periods: usize,
    pub cer_model_gross: f64,
    pub cer_model_net: f64,
    pub cer_benchmark_gross: f64,
    pub cer_benchmark_net: f64,
    pub cer_gain_gross: f64,
    pub cer_gain_net: f64,
    pub sharpe_model_gross: f64,
    pub sharpe_model_net: f64,
    pub sharpe_benchmark_gross: f64,
    pub sharpe_benchmark_net: f64,
    pub market_sharpe: f64,
    pub mean_turnover_model: f64,
}

impl BacktestSummary {
    pub fn new(cmp: &BacktestComparison, cfg: &BacktestConfig) -> Self {
        Self {
            gamma: cfg.gamma,
            tc_rate: cfg.tc_rate,
            first: cmp.model.weights.start(),
            last: cmp.model.weights.end(),
            n_periods: cmp.model.weights.len(),
            cer_model_gross: cmp.model.cer_gross,
            cer_model_net: cmp.model.cer_net,
            cer_benchmark_gross: cmp.benchmark.cer_gross,
            cer_benchmark_net: cmp.benchmark.cer_net,
            cer_gain_gross: cmp.cer_gain_gross,
            cer_gain_net: cmp.cer_gain_net,
            sharpe_model_gross: cmp.model.sharpe_gross,
            sharpe_model_net: cmp.model.sharpe_net,
            sharpe_benchmark_gross: cmp.benchmark.sharpe_gross,
            sharpe_benchmark_net: cmp.benchmark.sharpe_net,
            market_sharpe: cmp.market_sharpe,
            mean_turnover_model: mean(cmp.model.turnover.values()),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::simgen::oracles;
    use proptest::prelude::*;

    fn start() -> Period {
        Period::monthly(2000, 1)
    }

    fn cfg(window: usize) -> BacktestConfig {
        BacktestConfig {
            variance_window: window,
            ..BacktestConfig::default()
        }
    }

    /// Trailing window whose sample variance is exactly `var` (two values
    /// m +- d repeated, even length n: var = d^2 n / (n - 1)).
    fn window_with_variance(n: usize, var: f64) -> Vec<f64> {
        let d = (var * (n as f64 - 1.0) / n as f64).sqrt();
        (0..n).map(|i| if i % 2 == 0 { d } else { -d }).collect()
    }

    #[test]
    fn weight_rule_and_clamps() {
        let mut r = window_with_variance(12, 0.02);
        r.push(0.0);
        let realized = PeriodSeries::new(start(), r);
        let target = start().offset(12);
        for (fcst, expected) in [(0.06, 1.0), (-0.01, 0.0), (5.0, 1.5)] {
            let f = PeriodSeries::new(target, vec![fcst]);
            let w = weights_from_forecasts(&f, &realized, &cfg(12)).unwrap();
            assert_eq!(w.start(), target);
            assert!((w.values()[0] - expected).abs() < 1e-12, "{fcst}: {}", w.values()[0]);
        }
    }

    #[test]
    fn early_targets_are_skipped() {
        let realized = PeriodSeries::new(start(), (0..30).map(|i| ((i * 7) % 5) as f64 * 0.01).collect());
        let f = PeriodSeries::new(start().offset(5), vec![0.01; 25]);
        let w = weights_from_forecasts(&f, &realized, &cfg(12)).unwrap();
        assert_eq!(w.start(), start().offset(12));
        assert_eq!(w.len(), 18);
        let early = PeriodSeries::new(start(), vec![0.01; 5]);
        assert!(matches!(weights_from_forecasts(&early, &realized, &cfg(12)), Err(Error::InsufficientData(_))));
    }

    #[test]
    fn zero_variance_is_an_error() {
        let realized = PeriodSeries::new(start(), vec![0.01; 20]);
        let f = PeriodSeries::new(start().offset(15), vec![0.01]);
        assert!(matches!(weights_from_forecasts(&f, &realized, &cfg(12)), Err(Error::Degenerate(_))));
    }

    #[test]
    fn config_lists_every_problem() {
        let bad = BacktestConfig {
            gamma: 0.0,
            weight_bounds: (1.0, 1.0),
            variance_window: 3,
            tc_rate: -1.0,
            periods_per_year: 0,
        };
        assert_eq!(bad.problems().len(), 5);
        assert!(BacktestConfig::default().validate().is_ok());
    }

    #[test]
    fn constant_portfolio_cer() {
        assert!((cer(&[0.004; 10], 3.0, 12) - 0.048).abs() < 1e-15);
        assert_eq!(sharpe(&[0.01; 5], 12), 0.0);
    }

    #[test]
    fn hand_fixture_matches_oracle() {
        let w = PeriodSeries::new(start(), vec![0.5, 1.0, 1.5, 1.5, 0.0, 0.25]);
        let r = PeriodSeries::new(start(), vec![0.02, -0.01, 0.03, -0.02, 0.01, 0.04]);
        let rf = PeriodSeries::new(start(), vec![0.001; 6]);
        let c = BacktestConfig {
            variance_window: 12,
            ..BacktestConfig::default()
        };
        let rep = BacktestReport::evaluate(&w, &r, Some(&rf), &c).unwrap();
        let gross = [0.011, -0.009, 0.046, -0.029, 0.001, 0.011];
        let turnover = [0.5, 0.5, 0.5, 0.0, 1.5, 0.25];
        assert!(oracles::max_abs_diff(rep.gross.values(), &gross) < 1e-15);
        assert!(oracles::max_abs_diff(rep.turnover.values(), &turnover) < 1e-15);
        let net: Vec<f64> = gross.iter().zip(turnover).map(|(g, t)| g - 0.005 * t).collect();
        assert!(oracles::max_abs_diff(rep.net.values(), &net) < 1e-15);
        assert!((rep.cer_gross - oracles::cer(&gross, 3.0, 12.0)).abs() < 1e-12);
        assert!((rep.cer_net - oracles::cer(&net, 3.0, 12.0)).abs() < 1e-12);
        let ex: Vec<f64> = gross.iter().map(|g| g - 0.001).collect();
        assert!((rep.sharpe_gross - oracles::sharpe(&ex, 12.0)).abs() < 1e-12);
    }

    fn path_and_returns(seed: u64) -> (ForecastPath, PeriodSeries) {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        let r: Vec<f64> = (0..90).map(|_| rng.random_range(-0.08..0.08)).collect();
        let model: Vec<f64> = (0..30).map(|_| rng.random_range(-0.02..0.03)).collect();
        let bench: Vec<f64> = (0..30).map(|_| rng.random_range(0.0..0.01)).collect();
        let returns = PeriodSeries::new(start(), r);
        let first = start().offset(60);
        let path = ForecastPath::new(
            returns.slice(first, returns.end()).unwrap(),
            PeriodSeries::new(first, bench),
            PeriodSeries::new(first, model),
        )
        .unwrap();
        (path, returns)
    }

    #[test]
    fn identical_forecasts_have_zero_gain() {
        let (p, r) = path_and_returns(1);
        let same = p.with_model(p.benchmark.values().to_vec()).unwrap();
        let cmp = backtest(&same, &r, None, &BacktestConfig::default()).unwrap();
        assert_eq!(cmp.cer_gain_gross, 0.0);
        assert_eq!(cmp.cer_gain_net, 0.0);
    }

    #[test]
    fn zero_costs_make_net_equal_gross() {
        let (p, r) = path_and_returns(2);
        let c = BacktestConfig {
            tc_rate: 0.0,
            ..BacktestConfig::default()
        };
        let cmp = backtest(&p, &r, None, &c).unwrap();
        assert_eq!(cmp.model.gross, cmp.model.net);
        assert_eq!(cmp.model.cer_gross, cmp.model.cer_net);
    }

    #[test]
    fn mismatched_realized_is_rejected() {
        let (p, r) = path_and_returns(3);
        let shifted = r.map(|v| v + 1.0);
        assert!(matches!(backtest(&p, &shifted, None, &BacktestConfig::default()), Err(Error::Alignment(_))));
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn weights_bounded_and_costs_only_hurt(seed in 0u64..100_000, tc in 0.0f64..0.02) {
            let (p, r) = path_and_returns(seed);
            let free = BacktestConfig { tc_rate: 0.0, ..BacktestConfig::default() };
            let costly = BacktestConfig { tc_rate: tc, ..BacktestConfig::default() };
            let a = backtest(&p, &r, None, &free).unwrap();
            let b = backtest(&p, &r, None, &costly).unwrap();
            for w in b.model.weights.values() {
                prop_assert!((0.0..=1.5).contains(w));
            }
            for (g, n) in b.model.gross.values().iter().zip(b.model.net.values()) {
                prop_assert!(n <= g);
            }
            prop_assert!(b.model.cer_net <= a.model.cer_net + 1e-15);
            prop_assert!(b.model.turnover.values().iter().all(|t| *t >= 0.0));
        }

        #[test]
        fn sharpe_ignores_the_risk_free_rate(seed in 0u64..100_000, level in 0.0f64..0.01) {
            let (p, r) = path_and_returns(seed);
            let rf = PeriodSeries::new(start(), vec![level; 90]);
            let c = BacktestConfig { tc_rate: 0.0, ..BacktestConfig::default() };
            let a = backtest(&p, &r, None, &c).unwrap();
            let b = backtest(&p, &r, Some(&rf), &c).unwrap();
            prop_assert!((a.model.sharpe_gross - b.model.sharpe_gross).abs() < 1e-9);
            prop_assert!((a.market_sharpe - b.market_sharpe).abs() < 1e-12);
        }
    }
}
