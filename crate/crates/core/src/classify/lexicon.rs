use std::collections::BTreeSet;
use std::path::Path;

use crate::corpus::{HeadlineRecord, Label, LabelRecord};
use crate::error::{Error, Result};

use super::text::tokenize;

pub const LEXICON_SOURCE: &str = "lexicon";

static DEFAULT_POSITIVE: &str = include_str!("../../data/lexicon_positive.txt");
static DEFAULT_NEGATIVE: &str = include_str!("../../data/lexicon_negative.txt");

/// Positive and negative word lists for bag-of-words classification.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    positive: BTreeSet<String>,
    negative: BTreeSet<String>,
}

impl Lexicon {
    pub fn new<I, J, S, T>(positive: I, negative: J) -> Result<Self>
    where
        I: IntoIterator<Item = S>,
        J: IntoIterator<Item = T>,
        S: Into<String>,
        T: Into<String>,
    {
        let positive: BTreeSet<String> = positive.into_iter().map(Into::into).collect();
        let negative: BTreeSet<String> = negative.into_iter().map(Into::into).collect();
        let mut problems = Vec::new();
        for t in positive.iter().chain(&negative) {
            if t.is_empty() || !t.chars().all(|c| c.is_alphabetic() && !c.is_uppercase()) {
                problems.push(format!("term `{t}` must be a single lowercase word"));
            }
        }
        if let Some(t) = positive.intersection(&negative).next() {
            problems.push(format!("term `{t}` is both positive and negative"));
        }
        if positive.is_empty() && negative.is_empty() {
            problems.push("lexicon is empty".into());
        }
        if !problems.is_empty() {
            return Err(Error::Config(problems));
        }
        Ok(Self { positive, negative })
    }

    /// Small finance word list shipped with the crate.
    pub fn bundled() -> Self {
        Self::new(lines(DEFAULT_POSITIVE), lines(DEFAULT_NEGATIVE)).expect("bundled lexicon is valid")
    }

    /// Loads two plain-text files with one term per line.
    pub fn from_files(positive: &Path, negative: &Path) -> Result<Self> {
        let read = |p: &Path| std::fs::read_to_string(p).map_err(|e| Error::io(p, e));
        let (pos, neg) = (read(positive)?, read(negative)?);
        Self::new(lines(&pos), lines(&neg))
    }

    pub fn swapped(&self) -> Self {
        Self {
            positive: self.negative.clone(),
            negative: self.positive.clone(),
        }
    }

    pub fn positive(&self) -> &BTreeSet<String> {
        &self.positive
    }

    pub fn negative(&self) -> &BTreeSet<String> {
        &self.negative
    }

    /// Positive and negative hit counts over the tokenized text.
    pub fn score(&self, text: &str) -> (usize, usize) {
        tokenize(text).iter().fold((0, 0), |(p, n), tok| {
            (
                p + self.positive.contains(tok) as usize,
                n + self.negative.contains(tok) as usize,
            )
        })
    }

    pub fn classify_text(&self, text: &str) -> Label {
        let (p, n) = self.score(text);
        match p.cmp(&n) {
            std::cmp::Ordering::Greater => Label::Up,
            std::cmp::Ordering::Less => Label::Down,
            std::cmp::Ordering::Equal => Label::Unknown,
        }
    }
}

fn lines(s: &str) -> Vec<String> {
    s.lines()
        .map(|l| l.trim().to_string())
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect()
}

pub fn lexicon_classify(headline: &HeadlineRecord, lex: &Lexicon, prompt_id: &str) -> LabelRecord {
    LabelRecord {
        headline_id: headline.id.clone(),
        label: lex.classify_text(&headline.text),
        source: LEXICON_SOURCE.into(),
        prompt_id: prompt_id.into(),
    }
}
