use newsratio::econo::{interaction_regression, CovFlavor, HIGH, HIGH_X_SIGNAL, LOW_X_SIGNAL};
use newsratio::simgen::{simulate_market, DgpConfig};
use newsratio::timeseries::{trailing_mean_dummy, PeriodSeries};

/// Slopes that differ between high and low states of a conditioning series.
fn main() -> newsratio::Result<()> {
    let m = simulate_market(&DgpConfig {
        seed: 8,
        beta: 0.0,
        ..DgpConfig::default()
    })?;
    let state = PeriodSeries::new(
        m.signal.start(),
        (0..m.signal.len()).map(|t| (t as f64 / 18.0).sin()).collect(),
    );
    let dummy = trailing_mean_dummy(&state, 24)?;
    let high_share = dummy.high().values().iter().sum::<f64>() / dummy.len() as f64;
    println!("state is high in {:.0}% of periods", high_share * 100.0);

    // returns respond to the signal only in the high state
    let s = m.signal.values();
    let mut r = m.returns.values().to_vec();
    for t in 1..r.len() {
        if dummy.is_high(t - 1) {
            r[t] += 0.02 * s[t - 1];
        }
    }
    let returns = PeriodSeries::new(m.returns.start(), r);

    for h in [1, 3] {
        let fit = interaction_regression(&m.signal, &returns, &dummy, h)?;
        for name in [HIGH_X_SIGNAL, LOW_X_SIGNAL, HIGH] {
            println!(
                "h={h} {name:<14} {:>8.4}  t_hodrick {:>5.2}",
                fit.coefficient(name).unwrap(),
                fit.t_stat(name, CovFlavor::Hodrick).unwrap()
            );
        }
    }
    Ok(())
}
