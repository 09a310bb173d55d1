use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use super::{oracles, stream_rng};
use crate::alloc::{BacktestConfig, BacktestReport};
use crate::econo::{
    hodrick_covariance, newey_west_covariance, ols, principal_components, white_covariance, DesignMatrix,
};
use crate::error::{Error, Result};
use crate::novelty::{novelty_score, PeriodEmbedding, Similarity};
use crate::oos::{recursive_forecast, ForecastOptions};
use crate::timeseries::{Period, PeriodSeries};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct OracleSettings {
    /// Number of random regression fixtures (sizes cycle through 60, 120, 324).
    pub fixtures: usize,
    /// Multiplies every tolerance; 0 makes every check fail.
    pub tolerance_scale: f64,
    pub seed: u64,
}

impl Default for OracleSettings {
    fn default() -> Self {
        Self {
            fixtures: 25,
            tolerance_scale: 1.0,
            seed: 20_240_601,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleCheck {
    pub name: String,
    pub cases: usize,
    /// Largest deviation over all cases (relative to the largest oracle
    /// entry for matrix checks, absolute otherwise).
    pub max_deviation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OracleReport {
    pub passed: bool,
    pub checks: Vec<OracleCheck>,
}

impl OracleReport {
    pub fn failures(&self) -> Vec<String> {
        self.checks.iter().filter(|c| !c.passed).map(|c| c.name.clone()).collect()
    }

    /// `Err(OracleFailure)` naming every failed check.
    pub fn into_result(self) -> Result<Self> {
        let f = self.failures();
        if f.is_empty() {
            Ok(self)
        } else {
            Err(Error::OracleFailure(f))
        }
    }
}

struct Tracker {
    name: &'static str,
    tolerance: f64,
    cases: usize,
    worst: f64,
}

impl Tracker {
    fn new(name: &'static str, tolerance: f64) -> Self {
        Self {
            name,
            tolerance,
            cases: 0,
            worst: 0.0,
        }
    }

    fn record(&mut self, deviation: f64) {
        self.cases += 1;
        // NaN counts as a failure
        self.worst = if deviation.is_nan() { f64::INFINITY } else { self.worst.max(deviation) };
    }

    fn finish(self, scale: f64) -> OracleCheck {
        let tolerance = self.tolerance * scale;
        OracleCheck {
            name: self.name.into(),
            cases: self.cases,
            max_deviation: self.worst,
            tolerance,
            passed: self.worst < tolerance,
        }
    }
}

fn rel(a: &[f64], b: &[f64]) -> f64 {
    let scale = b.iter().fold(0.0f64, |m, v| m.max(v.abs())).max(1e-300);
    oracles::max_abs_diff(a, b) / scale
}

fn flat(m: &nalgebra::DMatrix<f64>) -> Vec<f64> {
    (0..m.nrows())
        .flat_map(|i| (0..m.ncols()).map(move |j| m[(i, j)]))
        .collect()
}

fn flat_rows(m: &oracles::Matrix) -> Vec<f64> {
    m.iter().flatten().copied().collect()
}

struct Fixture {
    design: DesignMatrix,
    columns: Vec<Vec<f64>>,
    y: PeriodSeries,
}

const SIZES: [usize; 3] = [60, 120, 324];

fn fixture(seed: u64, i: usize) -> Fixture {
    let mut rng = stream_rng(seed, 100 + i as u64);
    let n = SIZES[i % SIZES.len()];
    let mut draw = |n: usize| -> Vec<f64> { (0..n).map(|_| StandardNormal.sample(&mut rng)).collect() };
    let common = draw(n);
    let columns: Vec<Vec<f64>> = (0..3)
        .map(|j| {
            let own = draw(n);
            // mildly correlated, persistent regressors on different scales
            let mut x: Vec<f64> = own.iter().zip(&common).map(|(o, c)| o + 0.4 * c).collect();
            for t in 1..n {
                x[t] += 0.3 * x[t - 1];
            }
            x.iter().map(|v| v * (1.0 + j as f64) + j as f64).collect()
        })
        .collect();
    let e = draw(n);
    let y: Vec<f64> = (0..n)
        .map(|t| 0.02 + 0.5 * columns[0][t] - 0.2 * columns[1][t] + 0.05 * columns[2][t] + e[t] * (1.0 + columns[0][t].abs()))
        .collect();
    let start = Period::monthly(1990, 1);
    Fixture {
        design: DesignMatrix::new(start, vec!["a".into(), "b".into(), "c".into()], columns.clone()).expect("valid"),
        columns,
        y: PeriodSeries::new(start, y),
    }
}

/// Runs every production estimator against its brute-force oracle on
/// seeded fixtures.
pub fn oracle_suite(settings: &OracleSettings) -> Result<OracleReport> {
    let mut coef = Tracker::new("ols_coefficients", 1e-8);
    let mut white = Tracker::new("white_covariance", 1e-8);
    let mut nw = Tracker::new("newey_west_covariance", 1e-8);
    let mut hodrick = Tracker::new("hodrick_covariance", 1e-8);
    let mut pca = Tracker::new("pca_eigenvalues", 1e-8);
    let mut refit = Tracker::new("recursive_refit", 1e-8);
    let mut novelty = Tracker::new("novelty_correlation", 1e-10);
    let mut cer = Tracker::new("cer_hand", 1e-10);
    let mut sharpe = Tracker::new("sharpe_hand", 1e-10);

    for i in 0..settings.fixtures {
        let f = fixture(settings.seed, i);
        let rows = oracles::rows_with_intercept(&f.columns);
        let fit = ols(&f.design, &f.y)?;
        let beta = oracles::normal_equations(&rows, f.y.values())
            .ok_or_else(|| Error::SingularDesign("oracle fixture".into()))?;
        coef.record(rel(&fit.coefficients, &beta));

        let resid = oracles::residuals(&rows, f.y.values(), &beta);
        let w = white_covariance(&f.design, &resid)?;
        white.record(rel(&flat(&w), &flat_rows(&oracles::white(&rows, &resid).expect("regular"))));

        for lags in 0..=12 {
            let v = newey_west_covariance(&f.design, &resid, lags)?;
            nw.record(rel(&flat(&v), &flat_rows(&oracles::newey_west(&rows, &resid, lags).expect("regular"))));
        }

        let n = f.y.len();
        for h in [1usize, 3, 6, 12] {
            let rows_h = &rows[..n - h + 1];
            let design_h = f.design.rows(f.design.start(), f.design.start().offset((n - h) as i64))?;
            let v = hodrick_covariance(&design_h, &resid, h)?;
            let o = oracles::hodrick(&rows_h.to_vec(), &resid, h).expect("regular");
            hodrick.record(rel(&flat(&v), &flat_rows(&o)));
        }

        let mut pcols = f.columns.clone();
        pcols.push(f.y.values().to_vec());
        pcols.push(resid.clone());
        let names = (0..pcols.len()).map(|j| format!("v{j}")).collect();
        let pd = DesignMatrix::new(f.design.start(), names, pcols.clone())?;
        let pc = principal_components(&pd, 2)?;
        let ev = oracles::jacobi_eigenvalues(&oracles::correlation_matrix(&pcols));
        pca.record(rel(&pc.eigenvalues, &ev));

        let signal = f.design.column_series(0);
        let first = n / 2;
        let path = recursive_forecast(&signal, &f.y, f.y.period_at(first - 1), ForecastOptions::default())?;
        let (b, m) = oracles::recursive_forecasts(signal.values(), f.y.values(), first);
        refit.record(rel(path.model.values(), &m).max(rel(path.benchmark.values(), &b)));
    }

    let mut rng = stream_rng(settings.seed, 7);
    for case in 0..5 {
        let vs: Vec<Vec<f64>> = (0..10)
            .map(|_| (0..24).map(|_| rng.random_range(-1.0..1.0)).collect())
            .collect();
        let means: Vec<PeriodEmbedding> = vs
            .iter()
            .enumerate()
            .map(|(t, v)| PeriodEmbedding {
                period: Period::monthly(2000, 1).offset(t as i64),
                mean: v.clone(),
                count: 1,
            })
            .collect();
        let lookback = 1 + case;
        let got = novelty_score(&means, lookback, Similarity::Pearson)?;
        novelty.record(oracles::max_abs_diff(got.values(), &oracles::novelty(&vs, lookback)));
    }

    for _ in 0..10 {
        let n = 6;
        let start = Period::monthly(2000, 1);
        let w: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..1.5)).collect();
        let r: Vec<f64> = (0..n).map(|_| rng.random_range(-0.1..0.1)).collect();
        let rf: Vec<f64> = (0..n).map(|_| rng.random_range(0.0..0.005)).collect();
        let cfg = BacktestConfig {
            gamma: rng.random_range(1.0..10.0),
            tc_rate: 0.005,
            ..BacktestConfig::default()
        };
        let rep = BacktestReport::evaluate(
            &PeriodSeries::new(start, w.clone()),
            &PeriodSeries::new(start, r.clone()),
            Some(&PeriodSeries::new(start, rf.clone())),
            &cfg,
        )?;
        let mut prev = 0.0;
        let mut gross = Vec::new();
        let mut net = Vec::new();
        for t in 0..n {
            gross.push(w[t] * r[t] + rf[t]);
            net.push(w[t] * r[t] + rf[t] - cfg.tc_rate * (w[t] - prev).abs());
            prev = w[t];
        }
        cer.record(
            (rep.cer_gross - oracles::cer(&gross, cfg.gamma, 12.0))
                .abs()
                .max((rep.cer_net - oracles::cer(&net, cfg.gamma, 12.0)).abs()),
        );
        let ex: Vec<f64> = gross.iter().zip(&rf).map(|(g, f)| g - f).collect();
        sharpe.record((rep.sharpe_gross - oracles::sharpe(&ex, 12.0)).abs());
    }

    let checks: Vec<OracleCheck> = [coef, white, nw, hodrick, pca, refit, novelty, cer, sharpe]
        .into_iter()
        .map(|t| t.finish(settings.tolerance_scale))
        .collect();
    Ok(OracleReport {
        passed: checks.iter().all(|c| c.passed),
        checks,
    })
}
