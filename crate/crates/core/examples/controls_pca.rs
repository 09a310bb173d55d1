//! Adds controls to the predictive regression, either directly or through
//! their first principal components.

use newsratio::econo::{predictive_regression, principal_components, CovFlavor, DesignMatrix, SIGNAL};
use newsratio::simgen::{simulate_market, DgpConfig};
use newsratio::timeseries::PeriodSeries;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> newsratio::Result<()> {
    let m = simulate_market(&DgpConfig {
        seed: 9,
        beta: 0.01,
        ..DgpConfig::default()
    })?;
    let n = m.signal.len();
    let mut rng = ChaCha8Rng::seed_from_u64(1);

    // five noisy controls, two of them correlated with the signal
    let columns: Vec<Vec<f64>> = (0..5)
        .map(|j| {
            (0..n)
                .map(|t| {
                    let load = if j < 2 { 0.7 } else { 0.0 };
                    load * m.signal.values()[t] + rng.random_range(-1.0..1.0)
                })
                .collect()
        })
        .collect();
    let named: Vec<(String, PeriodSeries)> = columns
        .into_iter()
        .enumerate()
        .map(|(j, c)| (format!("c{}", j + 1), PeriodSeries::new(m.signal.start(), c)))
        .collect();
    let refs: Vec<(&str, &PeriodSeries)> = named.iter().map(|(k, v)| (k.as_str(), v)).collect();
    let controls = DesignMatrix::from_series(&refs)?;

    let pcs = principal_components(&controls, 2)?;
    println!("eigenvalues {:.3?}", pcs.eigenvalues);
    println!("explained by pc1, pc2 {:.3?}", pcs.explained);

    for (label, ctl) in [("none", None), ("raw", Some(&controls)), ("2 PCs", Some(&pcs.scores))] {
        let fit = predictive_regression(&m.signal, &m.returns, 1, ctl)?;
        println!(
            "controls {label:<6} beta {:.4}  t_hodrick {:.2}  r2 {:.4}",
            fit.coefficient(SIGNAL).unwrap(),
            fit.t_stat(SIGNAL, CovFlavor::Hodrick).unwrap(),
            fit.r_squared
        );
    }
    Ok(())
}
