//! Does the news signal lead a macro proxy? Simple and AR-controlled
//! versions of the one-step-ahead regression.

use newsratio::econo::{macro_link_regression, CovFlavor, MacroFlavor, SIGNAL};
use newsratio::simgen::{simulate_market, DgpConfig};
use newsratio::timeseries::PeriodSeries;

fn main() -> newsratio::Result<()> {
    let m = simulate_market(&DgpConfig {
        seed: 3,
        ..DgpConfig::default()
    })?;
    let s = m.signal.values();
    // a persistent proxy that loads on last period's signal
    let mut proxy = vec![0.0; s.len()];
    for t in 1..s.len() {
        proxy[t] = 0.5 * proxy[t - 1] + 0.3 * s[t - 1] + 0.2 * ((t * 37 % 11) as f64 - 5.0) / 5.0;
    }
    let proxy = PeriodSeries::new(m.signal.start(), proxy);

    for flavor in [MacroFlavor::Simple, MacroFlavor::ArControlled] {
        let fit = macro_link_regression(&proxy, &m.signal, flavor)?;
        println!(
            "{flavor:?}: beta {:.3}, NW t {:.2}, R2 {:.3}, n {}",
            fit.coefficient(SIGNAL).unwrap(),
            fit.t_stat(SIGNAL, CovFlavor::NeweyWest).unwrap(),
            fit.r_squared,
            fit.n_obs
        );
    }
    Ok(())
}
