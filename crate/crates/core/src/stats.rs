//! Corpus statistics: character-count quartiles, unique word lengths, and
//! the deduplication/reduction report.
//!
//! The accumulators merge associatively, so shards can be summarized
//! independently and combined before the final extraction.

use std::borrow::Borrow;
use std::collections::{BTreeMap, HashSet};

use serde::{Deserialize, Serialize};

use crate::balance::{Category, CategoryDistribution, CategoryStats};
use crate::ingest::PageRecord;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum StatsError {
    #[error("empty corpus")]
    EmptyCorpus,
    #[error("category {category} grows from {before} to {after} {unit} between stages")]
    Growth { category: String, unit: &'static str, before: u64, after: u64 },
}

/// Nearest-rank quartiles of per-page character counts.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CharCountQuartiles {
    pub n: u64,
    pub q1: u64,
    pub q2: u64,
    pub q3: u64,
    pub min: u64,
    pub max: u64,
    pub sum: u64,
    pub mean: f64,
}

/// Collects character counts for [`CharCountQuartiles`].
#[derive(Debug, Clone, Default)]
pub struct QuartileAccumulator {
    counts: Vec<u64>,
}

impl QuartileAccumulator {
    pub fn push(&mut self, char_count: u64) {
        self.counts.push(char_count);
    }

    pub fn merge(&mut self, other: QuartileAccumulator) {
        self.counts.extend(other.counts);
    }

    pub fn len(&self) -> usize {
        self.counts.len()
    }

    pub fn is_empty(&self) -> bool {
        self.counts.is_empty()
    }

    pub fn finish(mut self) -> Result<CharCountQuartiles, StatsError> {
        if self.counts.is_empty() {
            return Err(StatsError::EmptyCorpus);
        }
        self.counts.sort_unstable();
        let n = self.counts.len();
        // 1-based rank ceil(p * n) for p = 1/4, 2/4, 3/4.
        let rank = |num: usize| (num * n).div_ceil(4);
        let at = |r: usize| self.counts[r - 1];
        let sum: u64 = self.counts.iter().sum();
        Ok(CharCountQuartiles {
            n: n as u64,
            q1: at(rank(1)),
            q2: at(rank(2)),
            q3: at(rank(3)),
            min: self.counts[0],
            max: self.counts[n - 1],
            sum,
            mean: sum as f64 / n as f64,
        })
    }
}

pub fn char_quartiles<I>(pages: I) -> Result<CharCountQuartiles, StatsError>
where
    I: IntoIterator,
    I::Item: Borrow<PageRecord>,
{
    let mut acc = QuartileAccumulator::default();
    for p in pages {
        acc.push(p.borrow().char_count);
    }
    acc.finish()
}

/// Word length (in characters) → number of distinct words of that length.
pub type WordLengthHistogram = BTreeMap<u64, u64>;

/// Distinct whitespace-delimited words seen so far.
#[derive(Debug, Clone, Default)]
pub struct WordLengthAccumulator {
    words: HashSet<Box<str>>,
}

impl WordLengthAccumulator {
    pub fn add_text(&mut self, text: &str) {
        for w in text.split_whitespace() {
            if !self.words.contains(w) {
                self.words.insert(w.into());
            }
        }
    }

    pub fn merge(&mut self, other: WordLengthAccumulator) {
        self.words.extend(other.words);
    }

    pub fn finish(&self) -> WordLengthHistogram {
        let mut hist = WordLengthHistogram::new();
        for w in &self.words {
            *hist.entry(w.chars().count() as u64).or_insert(0) += 1;
        }
        hist
    }
}

pub fn word_length_histogram<I>(pages: I) -> WordLengthHistogram
where
    I: IntoIterator,
    I::Item: Borrow<PageRecord>,
{
    let mut acc = WordLengthAccumulator::default();
    for p in pages {
        acc.add_text(&p.borrow().text);
    }
    acc.finish()
}

/// Size reduction for one category (or the total).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CategoryReduction {
    pub pages_initial: u64,
    pub pages_after_dedup: u64,
    pub pages_final: u64,
    pub bytes_initial: u64,
    pub bytes_after_dedup: u64,
    pub bytes_final: u64,
    /// `1 - bytes_after_dedup / bytes_initial`
    pub dedup_rate: f64,
    /// `1 - bytes_final / bytes_initial`
    pub total_reduction_rate: f64,
    /// Percentages with two decimals, e.g. `"5.37"`.
    pub dedup_rate_pct: String,
    pub total_reduction_rate_pct: String,
}

impl CategoryReduction {
    fn new(initial: CategoryStats, after_dedup: CategoryStats, fin: CategoryStats) -> Self {
        let rate = |b: u64| if initial.bytes == 0 { 0.0 } else { 1.0 - b as f64 / initial.bytes as f64 };
        let dedup_rate = rate(after_dedup.bytes);
        let total_reduction_rate = rate(fin.bytes);
        CategoryReduction {
            pages_initial: initial.pages,
            pages_after_dedup: after_dedup.pages,
            pages_final: fin.pages,
            bytes_initial: initial.bytes,
            bytes_after_dedup: after_dedup.bytes,
            bytes_final: fin.bytes,
            dedup_rate,
            total_reduction_rate,
            dedup_rate_pct: format_pct(dedup_rate),
            total_reduction_rate_pct: format_pct(total_reduction_rate),
        }
    }
}

pub fn format_pct(rate: f64) -> String {
    format!("{:.2}", rate * 100.0)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReductionReport {
    pub categories: BTreeMap<Category, CategoryReduction>,
    pub total: CategoryReduction,
}

fn check_shrinks(category: &str, a: CategoryStats, b: CategoryStats) -> Result<(), StatsError> {
    if b.bytes > a.bytes {
        return Err(StatsError::Growth { category: category.to_string(), unit: "bytes", before: a.bytes, after: b.bytes });
    }
    if b.pages > a.pages {
        return Err(StatsError::Growth { category: category.to_string(), unit: "pages", before: a.pages, after: b.pages });
    }
    Ok(())
}

/// Per-category and total deduplication and reduction rates over byte sizes.
pub fn reduction_report(
    initial: &CategoryDistribution,
    after_dedup: &CategoryDistribution,
    fin: &CategoryDistribution,
) -> Result<ReductionReport, StatsError> {
    let mut cats: Vec<Category> = initial.categories.keys().copied().collect();
    cats.extend(after_dedup.categories.keys().chain(fin.categories.keys()).copied());
    cats.sort();
    cats.dedup();

    let mut categories = BTreeMap::new();
    for c in cats {
        let (i, d, f) = (initial.get(c), after_dedup.get(c), fin.get(c));
        check_shrinks(c.name(), i, d)?;
        check_shrinks(c.name(), d, f)?;
        categories.insert(c, CategoryReduction::new(i, d, f));
    }
    let total = CategoryReduction::new(initial.total(), after_dedup.total(), fin.total());
    Ok(ReductionReport { categories, total })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn pages_with_counts(counts: &[u64]) -> Vec<PageRecord> {
        counts
            .iter()
            .enumerate()
            .map(|(i, &c)| PageRecord::from_text(i.to_string(), "", &"a".repeat(c as usize)))
            .collect()
    }

    fn dist(entries: &[(Category, u64)]) -> CategoryDistribution {
        let mut d = CategoryDistribution::default();
        for &(c, b) in entries {
            d.categories.insert(c, CategoryStats { pages: 1, bytes: b });
        }
        d
    }

    #[test]
    fn quartiles_small() {
        let q = char_quartiles(pages_with_counts(&[4, 2, 1, 3])).unwrap();
        assert_eq!((q.q1, q.q2, q.q3), (1, 2, 3));
        assert_eq!((q.min, q.max, q.n), (1, 4, 4));
        assert_eq!(q.mean, 2.5);
        let q = char_quartiles(pages_with_counts(&[5, 5, 5])).unwrap();
        assert_eq!((q.q1, q.q2, q.q3), (5, 5, 5));
        let q = char_quartiles(pages_with_counts(&[9])).unwrap();
        assert_eq!((q.q1, q.q2, q.q3), (9, 9, 9));
    }

    #[test]
    fn quartiles_empty_is_error() {
        assert_eq!(char_quartiles(Vec::<PageRecord>::new()), Err(StatsError::EmptyCorpus));
    }

    #[test]
    fn quartile_merge_matches_single_pass() {
        let mut a = QuartileAccumulator::default();
        let mut b = QuartileAccumulator::default();
        let mut all = QuartileAccumulator::default();
        for i in 0..50u64 {
            let v = (i * 37) % 101;
            if i % 3 == 0 { a.push(v) } else { b.push(v) }
            all.push(v);
        }
        a.merge(b);
        assert_eq!(a.finish(), all.finish());
    }

    #[test]
    fn histogram_counts_distinct_words() {
        let pages = [PageRecord::from_text("0", "", "aa aa bbb")];
        assert_eq!(word_length_histogram(&pages), BTreeMap::from([(2, 1), (3, 1)]));
        assert!(word_length_histogram([PageRecord::from_text("0", "", "")]).is_empty());
    }

    #[test]
    fn histogram_uses_characters() {
        let pages = [PageRecord::from_text("0", "", "héé ✓✓")];
        assert_eq!(word_length_histogram(&pages), BTreeMap::from([(2, 1), (3, 1)]));
    }

    #[test]
    fn reduction_halvings() {
        let r = reduction_report(
            &dist(&[(Category::Drugs, 100)]),
            &dist(&[(Category::Drugs, 50)]),
            &dist(&[(Category::Drugs, 25)]),
        )
        .unwrap();
        let d = &r.categories[&Category::Drugs];
        assert_eq!(d.dedup_rate_pct, "50.00");
        assert_eq!(d.total_reduction_rate_pct, "75.00");
        assert_eq!(r.total.total_reduction_rate, 0.75);
    }

    #[test]
    fn reduction_noop() {
        let d = dist(&[(Category::Drugs, 100)]);
        let r = reduction_report(&d, &d, &d).unwrap();
        assert_eq!(r.total.dedup_rate_pct, "0.00");
        assert_eq!(r.total.total_reduction_rate_pct, "0.00");
    }

    #[test]
    fn gambling_row_identity() {
        // Dedup removes 5.37% of the bytes and balancing leaves the category alone.
        let initial = dist(&[(Category::Gambling, 1_000_000), (Category::Drugs, 1_000)]);
        let after = dist(&[(Category::Gambling, 946_300), (Category::Drugs, 900)]);
        let fin = dist(&[(Category::Gambling, 946_300), (Category::Drugs, 500)]);
        let r = reduction_report(&initial, &after, &fin).unwrap();
        let g = &r.categories[&Category::Gambling];
        assert_eq!(g.dedup_rate_pct, "5.37");
        assert_eq!(g.dedup_rate, g.total_reduction_rate);
        let d = &r.categories[&Category::Drugs];
        assert!(d.dedup_rate < d.total_reduction_rate);
    }

    #[test]
    fn growth_is_an_integrity_error() {
        let err = reduction_report(
            &dist(&[(Category::Hacking, 10)]),
            &dist(&[(Category::Hacking, 11)]),
            &dist(&[(Category::Hacking, 11)]),
        )
        .unwrap_err();
        assert!(matches!(err, StatsError::Growth { ref category, .. } if category == "Hacking"));
        let err = reduction_report(&dist(&[]), &dist(&[]), &dist(&[(Category::Violence, 1)])).unwrap_err();
        assert!(err.to_string().contains("Violence"));
    }
}
