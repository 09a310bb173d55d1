//! Size of the t-tests on long-horizon returns under the null of no
//! predictability. Overlap makes Newey-West over-reject; Hodrick does not.
//!
//! Run with `--release`; 500 seeds take a few seconds.

use newsratio::econo::{predictive_regression, CovFlavor, SIGNAL};
use newsratio::simgen::{monte_carlo, rejection_rate, simulate_market, DgpConfig};

fn main() {
    let seeds = 0..500;
    for h in [1, 6, 12] {
        let t: Vec<(f64, f64)> = monte_carlo(seeds.clone(), |seed| {
            let m = simulate_market(&DgpConfig {
                seed,
                beta: 0.0,
                ..DgpConfig::default()
            })
            .unwrap();
            let fit = predictive_regression(&m.signal, &m.returns, h, None).unwrap();
            (
                fit.t_stat(SIGNAL, CovFlavor::NeweyWest).unwrap(),
                fit.t_stat(SIGNAL, CovFlavor::Hodrick).unwrap(),
            )
        });
        let nw: Vec<f64> = t.iter().map(|x| x.0).collect();
        let hod: Vec<f64> = t.iter().map(|x| x.1).collect();
        println!(
            "h={h:>2}: 5% test rejects {:.1}% with Newey-West, {:.1}% with Hodrick",
            rejection_rate(&nw, 1.96) * 100.0,
            rejection_rate(&hod, 1.96) * 100.0
        );
    }
}
