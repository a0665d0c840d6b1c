//! Language gate.
//!
//! The production language identifier is external; records arrive with a
//! label, or the simple stopword/Latin-1 heuristic below stands in for it.

use std::collections::HashSet;
use std::sync::LazyLock;

use serde::{Deserialize, Serialize};

use super::PageRecord;

/// Built-in English stopword list (150 words) used by the heuristic gate.
pub const ENGLISH_STOPWORDS: [&str; 150] = [
    "a", "about", "after", "again", "all", "also", "although", "always", "am", "an", "and",
    "any", "are", "as", "at", "back", "be", "because", "been", "before", "being", "between",
    "both", "but", "by", "can", "cannot", "could", "did", "do", "does", "down", "during",
    "each", "even", "ever", "every", "few", "for", "from", "get", "go", "had", "has", "have",
    "he", "her", "here", "him", "his", "how", "however", "i", "if", "in", "into", "is", "it",
    "its", "just", "know", "let", "like", "made", "make", "many", "may", "me", "might", "more",
    "most", "much", "must", "my", "myself", "need", "never", "new", "no", "nor", "not", "now",
    "of", "off", "on", "once", "one", "only", "or", "other", "our", "out", "over", "own",
    "said", "same", "say", "see", "shall", "she", "should", "since", "so", "some", "still",
    "such", "than", "that", "the", "their", "them", "then", "there", "these", "they", "this",
    "those", "though", "through", "to", "too", "under", "until", "up", "upon", "us", "use",
    "very", "want", "was", "we", "well", "were", "what", "when", "where", "whether", "which",
    "while", "who", "whom", "why", "will", "with", "within", "without", "would", "yet", "you",
    "your",
];

static STOPWORD_SET: LazyLock<HashSet<&'static str>> = LazyLock::new(|| ENGLISH_STOPWORDS.into_iter().collect());

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LanguageMode {
    /// Keep pages whose language label equals the accepted language.
    #[default]
    TrustLabel,
    /// Stopword and Latin-1 ratio test on the text itself.
    Heuristic,
    AcceptAll,
}

impl std::str::FromStr for LanguageMode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().replace('-', "_").as_str() {
            "trust_label" | "label" => Ok(LanguageMode::TrustLabel),
            "heuristic" => Ok(LanguageMode::Heuristic),
            "accept_all" | "all" => Ok(LanguageMode::AcceptAll),
            other => Err(format!("unknown language mode {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct LanguagePolicy {
    pub mode: LanguageMode,
    pub accept_language: String,
    pub heuristic_threshold: f64,
}

impl Default for LanguagePolicy {
    fn default() -> Self {
        Self { mode: LanguageMode::TrustLabel, accept_language: "en".to_string(), heuristic_threshold: 0.40 }
    }
}

#[derive(Debug, thiserror::Error, PartialEq)]
#[error("heuristic threshold {0} is outside [0, 1]")]
pub struct InvalidThreshold(pub f64);

impl LanguagePolicy {
    pub fn new(mode: LanguageMode) -> Self {
        Self { mode, ..Self::default() }
    }

    pub fn validate(&self) -> Result<(), InvalidThreshold> {
        if (0.0..=1.0).contains(&self.heuristic_threshold) {
            Ok(())
        } else {
            Err(InvalidThreshold(self.heuristic_threshold))
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GateOutcome {
    Keep,
    Reject,
    /// Label-trusting mode met a record without a label.
    Unlabeled,
}

impl GateOutcome {
    pub fn keeps(self) -> bool {
        self == GateOutcome::Keep
    }
}

/// Ratios the heuristic gate compares against its threshold.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LanguageScores {
    /// Fraction of non-whitespace characters at or below U+00FF.
    pub latin1_fraction: f64,
    /// Fraction of word tokens found in [`ENGLISH_STOPWORDS`].
    pub stopword_fraction: f64,
}

/// Lowercased words with surrounding punctuation trimmed; punctuation-only
/// tokens are dropped.
fn word_tokens(text: &str) -> impl Iterator<Item = String> + '_ {
    text.split_whitespace()
        .map(|t| t.trim_matches(|c: char| !c.is_alphanumeric()).to_lowercase())
        .filter(|t| !t.is_empty())
}

pub fn language_scores(text: &str) -> LanguageScores {
    let (mut latin, mut total) = (0usize, 0usize);
    for c in text.chars().filter(|c| !c.is_whitespace()) {
        total += 1;
        if c <= '\u{FF}' {
            latin += 1;
        }
    }
    let (mut stop, mut words) = (0usize, 0usize);
    for w in word_tokens(text) {
        words += 1;
        if STOPWORD_SET.contains(w.as_str()) {
            stop += 1;
        }
    }
    let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
    LanguageScores { latin1_fraction: ratio(latin, total), stopword_fraction: ratio(stop, words) }
}

/// Decides whether a page passes the language gate.
pub fn language_gate(record: &PageRecord, policy: &LanguagePolicy) -> GateOutcome {
    match policy.mode {
        LanguageMode::AcceptAll => GateOutcome::Keep,
        LanguageMode::TrustLabel => match record.lang_label.as_deref() {
            None => GateOutcome::Unlabeled,
            Some(label) if label.trim().eq_ignore_ascii_case(&policy.accept_language) => GateOutcome::Keep,
            Some(_) => GateOutcome::Reject,
        },
        LanguageMode::Heuristic => {
            let scores = language_scores(&record.text);
            let t = policy.heuristic_threshold;
            if scores.latin1_fraction >= t && scores.stopword_fraction >= t {
                GateOutcome::Keep
            } else {
                GateOutcome::Reject
            }
        }
    }
}

/// Running tallies of gate outcomes.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct GateTally {
    pub kept: u64,
    pub rejected: u64,
    pub unlabeled: u64,
}

impl GateTally {
    pub fn record(&mut self, outcome: GateOutcome) {
        match outcome {
            GateOutcome::Keep => self.kept += 1,
            GateOutcome::Reject => self.rejected += 1,
            GateOutcome::Unlabeled => self.unlabeled += 1,
        }
    }

    pub fn total(&self) -> u64 {
        self.kept + self.rejected + self.unlabeled
    }
}
