//! Mean-variance allocation driven by the forecasts: certainty-equivalent
//! gains over the benchmark and Sharpe ratios, before and after costs.

use newsratio::alloc::{backtest, BacktestConfig};
use newsratio::oos::{recursive_forecast, ForecastOptions};
use newsratio::simgen::{simulate_market, DgpConfig};
use newsratio::timeseries::Period;

fn main() -> newsratio::Result<()> {
    let m = simulate_market(&DgpConfig {
        seed: 11,
        beta: 0.012,
        ..DgpConfig::default()
    })?;
    let path = recursive_forecast(&m.signal, &m.returns, Period::monthly(2005, 12), ForecastOptions::default())?;

    println!("gamma  tc(bp)  cer gain gross  cer gain net  sharpe model  sharpe bench  turnover");
    for gamma in [3.0, 5.0] {
        for tc_bp in [0.0, 50.0] {
            let cfg = BacktestConfig {
                gamma,
                tc_rate: tc_bp / 1e4,
                ..BacktestConfig::default()
            };
            let r = backtest(&path, &m.returns, None, &cfg)?;
            let turnover = r.model.turnover.values().iter().sum::<f64>() / r.model.turnover.len() as f64;
            println!(
                "{gamma:>5}  {tc_bp:>6}  {:>13.2}%  {:>11.2}%  {:>12.2}  {:>12.2}  {turnover:>8.3}",
                r.cer_gain_gross * 100.0,
                r.cer_gain_net * 100.0,
                r.model.sharpe_net,
                r.benchmark.sharpe_net
            );
        }
    }
    Ok(())
}
