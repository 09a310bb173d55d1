//! Draws a synthetic market from the data-generating process and checks that
//! the planted slope shows up in a plain regression.

use newsratio::econo::{predictive_regression, CovFlavor, SIGNAL};
use newsratio::simgen::{simulate_market, DgpConfig};

fn main() -> newsratio::Result<()> {
    let cfg = DgpConfig {
        seed: 42,
        beta: 0.01,
        ..DgpConfig::default()
    };
    let m = simulate_market(&cfg)?;
    println!(
        "{} periods from {} to {}, noise sd {}",
        m.returns.len(),
        m.returns.start(),
        m.returns.end(),
        cfg.noise_sd
    );

    let fit = predictive_regression(&m.signal, &m.returns, 1, None)?;
    println!(
        "slope {:.4} (planted {}), Hodrick t {:.2}",
        fit.coefficient(SIGNAL).unwrap(),
        cfg.beta,
        fit.t_stat(SIGNAL, CovFlavor::Hodrick).unwrap()
    );

    // the same config round-trips through TOML, which is what `simulate --config` reads
    let text = cfg.to_toml();
    assert_eq!(DgpConfig::from_toml(&text)?, cfg);
    println!("\n{text}");
    Ok(())
}
