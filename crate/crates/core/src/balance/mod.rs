//! Category assignment and random down-sampling of over-represented categories.

mod classify;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::ingest::PageRecord;
use crate::rng;

pub use classify::{
    default_lexicon, keyword_classify, ClassifierSpec, DEFAULT_FALLBACK, ClassifyError, ExecClassifier, KeywordClassifier,
    LabelClassifier, Lexicon, PageClassifier,
};

/// Default per-category size cap: 1 GB.
pub const DEFAULT_CAP_BYTES: u64 = 1_000_000_000;

/// Activity categories used for balancing. Declared in lexicographic order of
/// their display names, so `Ord` is name order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Category {
    #[serde(rename = "Arms/Weapons")]
    ArmsWeapons,
    Cryptocurrency,
    Drugs,
    Electronics,
    Financial,
    Gambling,
    Hacking,
    Pornography,
    Violence,
}

impl Category {
    pub const ALL: [Category; 9] = [
        Category::ArmsWeapons,
        Category::Cryptocurrency,
        Category::Drugs,
        Category::Electronics,
        Category::Financial,
        Category::Gambling,
        Category::Hacking,
        Category::Pornography,
        Category::Violence,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Category::ArmsWeapons => "Arms/Weapons",
            Category::Cryptocurrency => "Cryptocurrency",
            Category::Drugs => "Drugs",
            Category::Electronics => "Electronics",
            Category::Financial => "Financial",
            Category::Gambling => "Gambling",
            Category::Hacking => "Hacking",
            Category::Pornography => "Pornography",
            Category::Violence => "Violence",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown category {0:?}")]
pub struct UnknownCategory(pub String);

impl FromStr for Category {
    type Err = UnknownCategory;

    /// Case-insensitive; punctuation and spaces are ignored, so
    /// `"Arms / Weapons"` and `"arms_weapons"` both parse.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let key: String = s.chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect();
        Category::ALL
            .into_iter()
            .find(|c| {
                let name: String = c.name().chars().filter(|c| c.is_alphanumeric()).flat_map(char::to_lowercase).collect();
                name == key
            })
            .ok_or_else(|| UnknownCategory(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CategoryStats {
    pub pages: u64,
    pub bytes: u64,
}

/// Page counts and byte sizes per category.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CategoryDistribution {
    pub categories: BTreeMap<Category, CategoryStats>,
}

impl CategoryDistribution {
    pub fn add(&mut self, category: Category, bytes: u64) {
        let entry = self.categories.entry(category).or_default();
        entry.pages += 1;
        entry.bytes += bytes;
    }

    pub fn get(&self, category: Category) -> CategoryStats {
        self.categories.get(&category).copied().unwrap_or_default()
    }

    pub fn total(&self) -> CategoryStats {
        self.categories.values().fold(CategoryStats::default(), |acc, s| CategoryStats {
            pages: acc.pages + s.pages,
            bytes: acc.bytes + s.bytes,
        })
    }

    /// Distribution of already-categorized pages.
    pub fn of_pages<'a>(pages: impl IntoIterator<Item = &'a PageRecord>) -> Result<Self, BalanceError> {
        let mut dist = Self::default();
        for p in pages {
            dist.add(page_category(p)?, p.byte_len());
        }
        Ok(dist)
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum BalanceError {
    #[error("page {id:?} has no category")]
    Uncategorized { id: String },
    #[error("page {id:?}: {source}")]
    BadCategory { id: String, source: UnknownCategory },
    #[error("cap must be positive")]
    ZeroCap,
}

pub(crate) fn page_category(page: &PageRecord) -> Result<Category, BalanceError> {
    let label = page.category.as_deref().ok_or_else(|| BalanceError::Uncategorized { id: page.id.clone() })?;
    label.parse().map_err(|source| BalanceError::BadCategory { id: page.id.clone(), source })
}

#[derive(Debug, Clone, PartialEq)]
pub struct BalanceOutcome {
    pub kept: Vec<PageRecord>,
    pub dist_before: CategoryDistribution,
    pub dist_after: CategoryDistribution,
}

/// Randomly removes whole pages from every category above `cap_bytes` until
/// it fits under the cap.
///
/// Each over-cap category's pages are shuffled with one generator seeded by
/// `seed` (categories visited in name order) and dropped in shuffled order
/// until the remaining size is at most `cap_bytes`. Categories at or under
/// the cap are untouched, and kept pages stay in input order.
pub fn balance(pages: Vec<PageRecord>, cap_bytes: u64, seed: u64) -> Result<BalanceOutcome, BalanceError> {
    if cap_bytes == 0 {
        return Err(BalanceError::ZeroCap);
    }
    let cats = pages.iter().map(page_category).collect::<Result<Vec<_>, _>>()?;
    let mut dist_before = CategoryDistribution::default();
    for (p, &c) in pages.iter().zip(&cats) {
        dist_before.add(c, p.byte_len());
    }

    let mut keep = vec![true; pages.len()];
    let mut rng = rng::seeded(seed);
    for (&category, stats) in &dist_before.categories {
        if stats.bytes <= cap_bytes {
            continue;
        }
        let mut members: Vec<usize> = (0..pages.len()).filter(|&i| cats[i] == category).collect();
        members.shuffle(&mut rng);
        let mut size = stats.bytes;
        for i in members {
            if size <= cap_bytes {
                break;
            }
            keep[i] = false;
            size -= pages[i].byte_len();
        }
    }

    let mut dist_after = CategoryDistribution::default();
    let kept: Vec<PageRecord> = pages
        .into_iter()
        .zip(keep)
        .zip(cats)
        .filter_map(|((p, k), c)| {
            k.then(|| {
                dist_after.add(c, p.byte_len());
                p
            })
        })
        .collect();
    Ok(BalanceOutcome { kept, dist_before, dist_after })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn page(id: usize, category: Category, bytes: usize) -> PageRecord {
        let mut p = PageRecord::from_text(id.to_string(), "", &"x".repeat(bytes));
        p.category = Some(category.name().to_string());
        p
    }

    #[test]
    fn category_names_parse_loosely() {
        assert_eq!("Arms / Weapons".parse(), Ok(Category::ArmsWeapons));
        assert_eq!("arms_weapons".parse(), Ok(Category::ArmsWeapons));
        assert_eq!("HACKING".parse(), Ok(Category::Hacking));
        assert!("Others".parse::<Category>().is_err());
        for c in Category::ALL {
            assert_eq!(c.name().parse(), Ok(c));
        }
    }

    #[test]
    fn ord_is_name_order() {
        let mut names: Vec<_> = Category::ALL.iter().map(|c| c.name()).collect();
        names.sort();
        let by_ord: Vec<_> = Category::ALL.iter().map(|c| c.name()).collect();
        assert_eq!(names, by_ord);
    }

    #[test]
    fn serde_uses_display_names() {
        assert_eq!(serde_json::to_string(&Category::ArmsWeapons).unwrap(), "\"Arms/Weapons\"");
        let mut d = CategoryDistribution::default();
        d.add(Category::Gambling, 10);
        assert_eq!(serde_json::to_string(&d).unwrap(), r#"{"Gambling":{"pages":1,"bytes":10}}"#);
    }

    #[test]
    fn all_under_cap_is_identity() {
        let pages: Vec<_> = (0..10).map(|i| page(i, Category::ALL[i % 9], 10)).collect();
        let out = balance(pages.clone(), 1_000, 7).unwrap();
        assert_eq!(out.kept, pages);
        assert_eq!(out.dist_before, out.dist_after);
    }

    #[test]
    fn double_cap_keeps_half() {
        let pages: Vec<_> = (0..20).map(|i| page(i, Category::Drugs, 10)).collect();
        let out = balance(pages, 100, 1).unwrap();
        assert_eq!(out.kept.len(), 10);
        assert_eq!(out.dist_after.get(Category::Drugs).bytes, 100);
        let ids: Vec<usize> = out.kept.iter().map(|p| p.id.parse().unwrap()).collect();
        assert!(ids.windows(2).all(|w| w[0] < w[1]), "order preserved");
    }

    #[test]
    fn untouched_categories_are_identical() {
        let mut pages: Vec<_> = (0..30).map(|i| page(i, Category::Pornography, 10)).collect();
        pages.extend((30..35).map(|i| page(i, Category::Gambling, 10)));
        let out = balance(pages.clone(), 100, 3).unwrap();
        let gamb_in: Vec<_> = pages.iter().filter(|p| p.category.as_deref() == Some("Gambling")).collect();
        let gamb_out: Vec<_> = out.kept.iter().filter(|p| p.category.as_deref() == Some("Gambling")).collect();
        assert_eq!(gamb_in, gamb_out);
        assert!(out.dist_after.get(Category::Pornography).bytes <= 100);
    }

    #[test]
    fn deterministic_per_seed() {
        let pages: Vec<_> = (0..50).map(|i| page(i, Category::Hacking, 5 + i % 7)).collect();
        let a = balance(pages.clone(), 120, 42).unwrap();
        let b = balance(pages.clone(), 120, 42).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn uncategorized_page_is_an_error() {
        let mut p = page(0, Category::Drugs, 3);
        p.category = None;
        assert_eq!(balance(vec![p], 10, 0), Err(BalanceError::Uncategorized { id: "0".into() }));
        assert_eq!(balance(vec![], 0, 0), Err(BalanceError::ZeroCap));
    }
}
