//! Recursive out-of-sample forecasts against the historical mean, the
//! Clark-West test, and the three forecast combinations.

use newsratio::oos::{
    combine, csfe_difference, msfe_adjusted, r2_os, recursive_forecast, CombineMethod, CombineOptions,
    ForecastOptions,
};
use newsratio::simgen::{simulate_market, DgpConfig};
use newsratio::timeseries::{Period, PeriodSeries};

fn main() -> newsratio::Result<()> {
    let m = simulate_market(&DgpConfig {
        seed: 5,
        beta: 0.012,
        ..DgpConfig::default()
    })?;
    // a second, noisier predictor built from the same latent signal
    let noisy = PeriodSeries::new(
        m.signal.start(),
        m.signal.values().iter().enumerate().map(|(t, s)| s + ((t * 7919) % 13) as f64 / 6.0 - 1.0).collect(),
    );
    let train_end = Period::monthly(2005, 12);
    let opts = ForecastOptions::default();
    let members = vec![
        recursive_forecast(&m.signal, &m.returns, train_end, opts)?,
        recursive_forecast(&noisy, &m.returns, train_end, opts)?,
    ];

    println!("targets {} to {}", members[0].start(), members[0].end());
    for (name, p) in ["signal", "noisy"].iter().zip(&members) {
        let cw = msfe_adjusted(p)?;
        println!("{name:<7} R2_OS {:>6.2}%  CW {:.2} (p {:.3})", r2_os(p)? * 100.0, cw.statistic, cw.p_value);
    }
    for method in [CombineMethod::Mc, CombineMethod::Imc, CombineMethod::Iwc] {
        let c = combine(&members, method, CombineOptions::default())?;
        println!(
            "{:<7} R2_OS {:>6.2}%  last theta {:.3}  last weights {:.3?}",
            format!("{method:?}"),
            r2_os(&c.path)? * 100.0,
            c.theta.last().unwrap(),
            c.weights.last().unwrap()
        );
    }

    // the cumulative squared-error gap ends positive exactly when R2_OS > 0
    let csfe = csfe_difference(&members[0]);
    for (period, v) in csfe.iter().step_by(36) {
        println!("{period}  csfe difference {v:+.5}");
    }
    Ok(())
}
