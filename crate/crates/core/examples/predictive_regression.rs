//! In-sample predictive regressions across horizons, comparing Newey-West
//! and Hodrick standard errors on overlapping long-horizon returns.

use newsratio::econo::{predictive_regression, CovFlavor, FitReport, SIGNAL};
use newsratio::simgen::{simulate_market, DgpConfig};

fn main() -> newsratio::Result<()> {
    let m = simulate_market(&DgpConfig {
        seed: 2024,
        beta: 0.008,
        ..DgpConfig::default()
    })?;
    println!("  h   beta(%)   t_nw   t_hodrick   r2(%)    n");
    for h in [0, 1, 3, 6, 12] {
        let fit = predictive_regression(&m.signal, &m.returns, h, None)?;
        let hod = fit
            .t_stat(SIGNAL, CovFlavor::Hodrick)
            .map_or("-".to_string(), |t| format!("{t:.2}"));
        println!(
            "{h:>3}   {:>7.3}   {:>5.2}   {hod:>9}   {:>5.2}   {:>3}",
            fit.coefficient(SIGNAL).unwrap() * 100.0,
            fit.t_stat(SIGNAL, CovFlavor::NeweyWest).unwrap(),
            fit.r_squared * 100.0,
            fit.n_obs
        );
    }

    let fit = predictive_regression(&m.signal, &m.returns, 3, None)?;
    println!("\n{}", serde_json::to_string_pretty(&FitReport::from_fit("signal, h=3", &fit)).unwrap());
    Ok(())
}
