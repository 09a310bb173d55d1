//! Headlines to labels to monthly counts to the good and bad news ratios.

use newsratio::classify::{lexicon_classify, Lexicon};
use newsratio::corpus::{aggregate, ratios, summary_stats};
use newsratio::simgen::{simulate_corpus, DgpConfig};
use newsratio::timeseries::Frequency;

fn main() -> newsratio::Result<()> {
    let corpus = simulate_corpus(&DgpConfig {
        seed: 7,
        periods: 60,
        headlines_per_period: 40,
        ..DgpConfig::default()
    })?;

    let lex = Lexicon::bundled();
    let labels: Vec<_> = corpus.headlines.iter().map(|h| lexicon_classify(h, &lex, "lexicon")).collect();
    let agree = labels.iter().zip(&corpus.labels).filter(|(a, b)| a.label == b.label).count();
    println!("lexicon reproduces {agree} of {} planted labels", labels.len());

    let counts = aggregate(&corpus.headlines, &labels, Frequency::Monthly, None)?;
    let nr = ratios(&counts)?;
    println!("period    up  down  unknown  nr_good  nr_bad");
    for (c, (g, b)) in counts.iter().zip(nr.nr_good.values().iter().zip(nr.nr_bad.values())).take(6) {
        println!("{}  {:>3}  {:>4}  {:>7}  {g:>7.3}  {b:>6.3}", c.period, c.n_up, c.n_down, c.n_unknown);
    }

    for row in summary_stats(&counts)? {
        println!("{:?}: mean {:.1}, sd {:.1}, median {}", row.category, row.mean, row.std, row.median);
    }
    Ok(())
}
