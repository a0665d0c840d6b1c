//! Character-count filtering of low-information pages.

use serde::{Deserialize, Serialize};

use crate::ingest::PageRecord;
use crate::stats::CharCountQuartiles;

pub const DEFAULT_MIN_CHARS: u64 = 500;
pub const DEFAULT_MAX_CHARS: u64 = 10_000;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum DensityError {
    #[error("min_chars must be positive and below max_chars (got {min}..{max})")]
    InvalidRange { min: u64, max: u64 },
    #[error("degenerate corpus: half of q1 ({q1}) rounds down to zero")]
    Degenerate { q1: u64 },
}

/// Inclusive character-count window a page must fall in to be kept.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityThresholds {
    pub min_chars: u64,
    pub max_chars: u64,
}

impl Default for DensityThresholds {
    fn default() -> Self {
        Self { min_chars: DEFAULT_MIN_CHARS, max_chars: DEFAULT_MAX_CHARS }
    }
}

impl DensityThresholds {
    pub fn new(min_chars: u64, max_chars: u64) -> Result<Self, DensityError> {
        let t = Self { min_chars, max_chars };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<(), DensityError> {
        if self.min_chars == 0 || self.min_chars >= self.max_chars {
            return Err(DensityError::InvalidRange { min: self.min_chars, max: self.max_chars });
        }
        Ok(())
    }

    pub fn classify(&self, char_count: u64) -> DensityVerdict {
        if char_count < self.min_chars {
            DensityVerdict::TooShort
        } else if char_count > self.max_chars {
            DensityVerdict::TooLong
        } else {
            DensityVerdict::Keep
        }
    }

    pub fn keeps(&self, page: &PageRecord) -> bool {
        self.classify(page.char_count) == DensityVerdict::Keep
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DensityVerdict {
    Keep,
    TooShort,
    TooLong,
}

/// Suggested thresholds: half of q1 and double q3.
pub fn derive_thresholds(q: &CharCountQuartiles) -> Result<DensityThresholds, DensityError> {
    let min = q.q1 / 2;
    if min == 0 {
        return Err(DensityError::Degenerate { q1: q.q1 });
    }
    DensityThresholds::new(min, q.q3.saturating_mul(2))
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct DensityTally {
    pub kept: u64,
    pub dropped_low: u64,
    pub dropped_high: u64,
}

impl DensityTally {
    pub fn record(&mut self, verdict: DensityVerdict) {
        match verdict {
            DensityVerdict::Keep => self.kept += 1,
            DensityVerdict::TooShort => self.dropped_low += 1,
            DensityVerdict::TooLong => self.dropped_high += 1,
        }
    }

    pub fn merge(&mut self, other: DensityTally) {
        self.kept += other.kept;
        self.dropped_low += other.dropped_low;
        self.dropped_high += other.dropped_high;
    }

    pub fn total(&self) -> u64 {
        self.kept + self.dropped_low + self.dropped_high
    }
}

/// Keeps pages with `min_chars <= char_count <= max_chars`, in order.
pub fn filter_by_density<I>(pages: I, t: &DensityThresholds) -> (Vec<PageRecord>, DensityTally)
where
    I: IntoIterator<Item = PageRecord>,
{
    let mut tally = DensityTally::default();
    let kept = pages
        .into_iter()
        .filter(|p| {
            let v = t.classify(p.char_count);
            tally.record(v);
            v == DensityVerdict::Keep
        })
        .collect();
    (kept, tally)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quartiles(q1: u64, q3: u64) -> CharCountQuartiles {
        CharCountQuartiles { n: 4, q1, q2: q1, q3, min: q1, max: q3, sum: 0, mean: 0.0 }
    }

    fn page(chars: usize) -> PageRecord {
        PageRecord::from_text(chars.to_string(), "", &"a".repeat(chars))
    }

    #[test]
    fn boundaries_are_inclusive() {
        let t = DensityThresholds::default();
        assert_eq!(t.classify(499), DensityVerdict::TooShort);
        assert_eq!(t.classify(500), DensityVerdict::Keep);
        assert_eq!(t.classify(10_000), DensityVerdict::Keep);
        assert_eq!(t.classify(10_001), DensityVerdict::TooLong);
    }

    #[test]
    fn derived_thresholds() {
        assert_eq!(derive_thresholds(&quartiles(1318, 5753)), Ok(DensityThresholds { min_chars: 659, max_chars: 11506 }));
        assert_eq!(derive_thresholds(&quartiles(2, 10)), Ok(DensityThresholds { min_chars: 1, max_chars: 20 }));
        assert_eq!(derive_thresholds(&quartiles(1, 10)), Err(DensityError::Degenerate { q1: 1 }));
    }

    #[test]
    fn one_each_side() {
        let (kept, tally) = filter_by_density(vec![page(100), page(5000), page(20000)], &DensityThresholds::default());
        assert_eq!(kept.len(), 1);
        assert_eq!(kept[0].char_count, 5000);
        assert_eq!(tally, DensityTally { kept: 1, dropped_low: 1, dropped_high: 1 });
    }

    #[test]
    fn rejects_inverted_range() {
        assert!(DensityThresholds::new(0, 10).is_err());
        assert!(DensityThresholds::new(10, 10).is_err());
        assert!(DensityThresholds::new(1, u64::MAX).is_ok());
    }
}
