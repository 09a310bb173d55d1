//! Classifies a handful of headlines with the bundled word lists and prints
//! the most frequent stems in each class.

use std::collections::HashMap;

use chrono::NaiveDate;
use newsratio::classify::{lexicon_classify, term_frequency_report, Lexicon};
use newsratio::corpus::HeadlineRecord;

fn main() {
    let texts = [
        "Stocks rally as profits surge",
        "Shares plunge on weak earnings",
        "Banks gain after strong results",
        "Oil prices fall amid losses",
        "Central bank meets on Tuesday",
        "Markets rally, investors gain confidence",
    ];
    let headlines: Vec<HeadlineRecord> = texts
        .iter()
        .enumerate()
        .map(|(i, t)| HeadlineRecord {
            id: format!("h{i}"),
            date: NaiveDate::from_ymd_opt(2021, 3, 1 + i as u32).unwrap(),
            text: (*t).to_string(),
        })
        .collect();

    let lex = Lexicon::bundled();
    let mut labels = HashMap::new();
    for h in &headlines {
        let rec = lexicon_classify(h, &lex, "lexicon");
        let (pos, neg) = lex.score(&h.text);
        println!("{:<8} +{pos} -{neg}  {}", rec.label.as_str(), h.text);
        labels.insert(h.id.clone(), rec.label);
    }

    for (label, terms) in term_frequency_report(&headlines, &labels, 1) {
        let top: Vec<String> = terms.iter().take(5).map(|t| format!("{} ({})", t.term, t.count)).collect();
        println!("{}: {}", label.as_str(), top.join(", "));
    }
}
