//! Cross-checks the production kernels against the independent textbook
//! implementations in `simgen::oracles`.

use newsratio::simgen::{oracle_suite, OracleSettings};

fn main() -> newsratio::Result<()> {
    let report = oracle_suite(&OracleSettings::default())?;
    for c in &report.checks {
        println!(
            "{:<24} {:>4} cases  max deviation {:.2e}  tolerance {:.0e}  {}",
            c.name,
            c.cases,
            c.max_deviation,
            c.tolerance,
            if c.passed { "ok" } else { "FAILED" }
        );
    }
    report.into_result().map(|_| ())
}
