//! Headline tokenization and term-frequency reports.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::sync::OnceLock;

use rust_stemmers::{Algorithm, Stemmer};
use serde::{Deserialize, Serialize};

use crate::corpus::{HeadlineRecord, Label};

static STOPWORDS_TXT: &str = include_str!("../../data/stopwords.txt");

/// Bundled English function-word list (versioned with the crate).
pub fn stopwords() -> &'static HashSet<&'static str> {
    static SET: OnceLock<HashSet<&'static str>> = OnceLock::new();
    SET.get_or_init(|| {
        STOPWORDS_TXT
            .lines()
            .map(str::trim)
            .filter(|l| !l.is_empty())
            .collect()
    })
}

/// Lowercases, replaces every non-letter with a separator, and drops stop-words.
pub fn tokenize(text: &str) -> Vec<String> {
    let stop = stopwords();
    text.to_lowercase()
        .split(|c: char| !c.is_alphabetic())
        .filter(|t| !t.is_empty() && !stop.contains(t))
        .map(str::to_string)
        .collect()
}

pub fn stem(token: &str) -> String {
    static STEMMER: OnceLock<Stemmer> = OnceLock::new();
    STEMMER
        .get_or_init(|| Stemmer::create(Algorithm::English))
        .stem(token)
        .into_owned()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TermFrequency {
    pub term: String,
    pub count: u64,
    /// Share of all retained-or-not stems in the class.
    pub relative: f64,
}

pub const DEFAULT_MIN_COUNT: u64 = 3;

/// Ranked stem frequencies for each label class.
///
/// Relative frequencies are computed before the `min_count` cutoff. Rows
/// are ordered by count descending, then term ascending.
pub fn term_frequency_report(
    headlines: &[HeadlineRecord],
    labels: &HashMap<String, Label>,
    min_count: u64,
) -> BTreeMap<Label, Vec<TermFrequency>> {
    let mut counts: BTreeMap<Label, HashMap<String, u64>> = BTreeMap::new();
    for label in [Label::Up, Label::Down, Label::Unknown] {
        counts.insert(label, HashMap::new());
    }
    for h in headlines {
        let label = labels.get(&h.id).copied().unwrap_or(Label::Unknown);
        let bucket = counts.get_mut(&label).expect("all classes present");
        for tok in tokenize(&h.text) {
            *bucket.entry(stem(&tok)).or_default() += 1;
        }
    }
    counts
        .into_iter()
        .map(|(label, terms)| {
            let total: u64 = terms.values().sum();
            let mut rows: Vec<TermFrequency> = terms
                .into_iter()
                .filter(|(_, c)| *c >= min_count)
                .map(|(term, count)| TermFrequency {
                    relative: count as f64 / total as f64,
                    term,
                    count,
                })
                .collect();
            rows.sort_by(|a, b| b.count.cmp(&a.count).then_with(|| a.term.cmp(&b.term)));
            (label, rows)
        })
        .collect()
}
