//! MinHash signatures over word shingles, and signature-based deduplication.
//!
//! A page's shingles are the contiguous `n`-word windows of its
//! whitespace-normalized, case-folded text. Each shingle gets one 64-bit base
//! hash (xxh3), and permutation `i` maps it to `a_i * x + b_i` (wrapping
//! 64-bit arithmetic, `a_i` odd) with `a_i`, `b_i` drawn from a seeded
//! generator. Odd multipliers make every map a bijection on 64-bit values.
//! Signature position `i` is the minimum of permutation `i` over the shingle
//! set.

use std::collections::{BTreeSet, HashSet};

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use xxhash_rust::xxh3::xxh3_64;

use crate::emit::case_fold;
use crate::ingest::PageRecord;
use crate::mask::normalize_whitespace;
use crate::rng;

pub const DEFAULT_SHINGLE_N: usize = 3;
pub const DEFAULT_NUM_PERMS: usize = 128;
pub const DEFAULT_MINHASH_SEED: u64 = 0x5EED_0001;

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum MinHashError {
    #[error("shingle size must be at least 1")]
    ZeroShingle,
    #[error("number of permutations must be at least 1")]
    ZeroPerms,
    #[error("cannot sign an empty shingle set")]
    EmptyShingleSet,
    #[error("page {id:?} has empty text")]
    EmptyPage { id: String },
    #[error("signatures are not comparable: {a_perms} perms/seed {a_seed} vs {b_perms} perms/seed {b_seed}")]
    Mismatch { a_perms: usize, a_seed: u64, b_perms: usize, b_seed: u64 },
    #[error("near-duplicate threshold must be in (0, 1], got {0}")]
    BadThreshold(f64),
}

pub type ShingleSet = BTreeSet<String>;

#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MinHashSignature {
    pub values: Vec<u64>,
    pub seed: u64,
}

impl MinHashSignature {
    pub fn num_perms(&self) -> usize {
        self.values.len()
    }
}

fn prepare(text: &str) -> String {
    case_fold(&normalize_whitespace(text))
}

/// Byte ranges of the `n`-word windows of already-normalized text. Text with
/// fewer than `n` words yields one range covering all of it; empty text
/// yields none.
fn shingle_spans(text: &str, n: usize) -> impl Iterator<Item = &str> + '_ {
    let mut starts = Vec::new();
    let mut ends = Vec::new();
    let mut in_word = false;
    for (i, b) in text.bytes().enumerate() {
        if b == b' ' {
            if in_word {
                ends.push(i);
            }
            in_word = false;
        } else if !in_word {
            starts.push(i);
            in_word = true;
        }
    }
    if in_word {
        ends.push(text.len());
    }
    let words = starts.len();
    let windows = if words == 0 { 0 } else { words.saturating_sub(n) + 1 };
    let short = words > 0 && words < n;
    (0..windows).map(move |w| if short { text } else { &text[starts[w]..ends[w + n - 1]] })
}

/// The set of `n`-word shingles of `text` after whitespace normalization and
/// case folding.
pub fn shingles(text: &str, n: usize) -> Result<ShingleSet, MinHashError> {
    if n == 0 {
        return Err(MinHashError::ZeroShingle);
    }
    let prepared = prepare(text);
    Ok(shingle_spans(&prepared, n).map(str::to_owned).collect())
}

/// A seeded family of `num_perms` hash permutations plus the shingle size.
#[derive(Debug, Clone)]
pub struct MinHasher {
    a: Vec<u64>,
    b: Vec<u64>,
    seed: u64,
    shingle_n: usize,
}

impl MinHasher {
    pub fn new(num_perms: usize, seed: u64, shingle_n: usize) -> Result<Self, MinHashError> {
        if num_perms == 0 {
            return Err(MinHashError::ZeroPerms);
        }
        if shingle_n == 0 {
            return Err(MinHashError::ZeroShingle);
        }
        let mut rng = rng::seeded(seed);
        let mut a = Vec::with_capacity(num_perms);
        let mut b = Vec::with_capacity(num_perms);
        for _ in 0..num_perms {
            a.push(rng.next_u64() | 1);
            b.push(rng.next_u64());
        }
        Ok(Self { a, b, seed, shingle_n })
    }

    pub fn num_perms(&self) -> usize {
        self.a.len()
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn shingle_n(&self) -> usize {
        self.shingle_n
    }

    /// Value of permutation `i` for one shingle.
    pub fn permuted(&self, i: usize, shingle: &str) -> u64 {
        permute(self.a[i], self.b[i], base_hash(shingle))
    }

    fn fold_into(&self, mins: &mut [u64], x: u64) {
        for ((m, &a), &b) in mins.iter_mut().zip(&self.a).zip(&self.b) {
            let h = permute(a, b, x);
            if h < *m {
                *m = h;
            }
        }
    }

    /// Signature of an explicit shingle set.
    pub fn sign_set<S: AsRef<str>>(&self, set: impl IntoIterator<Item = S>) -> Result<MinHashSignature, MinHashError> {
        let mut mins = vec![u64::MAX; self.num_perms()];
        let mut any = false;
        for s in set {
            any = true;
            self.fold_into(&mut mins, base_hash(s.as_ref()));
        }
        if !any {
            return Err(MinHashError::EmptyShingleSet);
        }
        Ok(MinHashSignature { values: mins, seed: self.seed })
    }

    /// Signature of a text's shingle set, without materializing the set.
    /// Repeated shingles do not change a minimum, so no deduplication is
    /// needed.
    pub fn sign_text(&self, text: &str) -> Result<MinHashSignature, MinHashError> {
        let prepared = prepare(text);
        self.sign_set(shingle_spans(&prepared, self.shingle_n))
    }

    pub fn sign_page(&self, page: &PageRecord) -> Result<MinHashSignature, MinHashError> {
        self.sign_text(&page.text).map_err(|e| match e {
            MinHashError::EmptyShingleSet => MinHashError::EmptyPage { id: page.id.clone() },
            other => other,
        })
    }
}

fn base_hash(shingle: &str) -> u64 {
    xxh3_64(shingle.as_bytes())
}

#[inline]
fn permute(a: u64, b: u64, x: u64) -> u64 {
    a.wrapping_mul(x).wrapping_add(b)
}

/// Signature of a shingle set with `num_perms` permutations drawn from `seed`.
pub fn signature(set: &ShingleSet, num_perms: usize, seed: u64) -> Result<MinHashSignature, MinHashError> {
    MinHasher::new(num_perms, seed, DEFAULT_SHINGLE_N)?.sign_set(set)
}

/// Fraction of positions where the two signatures agree.
pub fn estimate_jaccard(a: &MinHashSignature, b: &MinHashSignature) -> Result<f64, MinHashError> {
    if a.values.len() != b.values.len() || a.seed != b.seed {
        return Err(MinHashError::Mismatch {
            a_perms: a.values.len(),
            a_seed: a.seed,
            b_perms: b.values.len(),
            b_seed: b.seed,
        });
    }
    if a.values.is_empty() {
        return Ok(1.0);
    }
    let agree = a.values.iter().zip(&b.values).filter(|(x, y)| x == y).count();
    Ok(agree as f64 / a.values.len() as f64)
}

/// Sequential first-wins uniqueness filter over signatures.
#[derive(Debug, Default)]
pub struct Deduper {
    seen: HashSet<Vec<u64>>,
    near_dup: Option<f64>,
    kept: Vec<MinHashSignature>,
    removed: u64,
}

impl Deduper {
    pub fn new(near_dup_threshold: Option<f64>) -> Result<Self, MinHashError> {
        if let Some(t) = near_dup_threshold {
            if !(t > 0.0 && t <= 1.0) {
                return Err(MinHashError::BadThreshold(t));
            }
        }
        Ok(Self { near_dup: near_dup_threshold, ..Self::default() })
    }

    /// Returns whether the page with this signature is kept.
    pub fn offer(&mut self, sig: MinHashSignature) -> bool {
        if self.seen.contains(&sig.values) {
            self.removed += 1;
            return false;
        }
        if let Some(t) = self.near_dup {
            let near = self.kept.iter().any(|k| estimate_jaccard(k, &sig).is_ok_and(|j| j >= t));
            if near {
                self.removed += 1;
                return false;
            }
            self.kept.push(sig.clone());
        }
        self.seen.insert(sig.values);
        true
    }

    pub fn removed(&self) -> u64 {
        self.removed
    }

    pub fn unique(&self) -> usize {
        self.seen.len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DedupOutcome {
    pub kept: Vec<PageRecord>,
    pub removed: u64,
    pub removed_ids: Vec<String>,
}

/// Options for [`dedup_with`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DedupParams {
    pub shingle_n: usize,
    pub num_perms: usize,
    pub seed: u64,
    /// Also drop pages whose estimated Jaccard similarity to any kept page
    /// reaches this value.
    pub near_dup_threshold: Option<f64>,
}

impl Default for DedupParams {
    fn default() -> Self {
        Self {
            shingle_n: DEFAULT_SHINGLE_N,
            num_perms: DEFAULT_NUM_PERMS,
            seed: DEFAULT_MINHASH_SEED,
            near_dup_threshold: None,
        }
    }
}

/// Computes signatures for a batch of pages, in parallel when `parallel` is set.
pub fn sign_pages(
    hasher: &MinHasher,
    pages: &[PageRecord],
    parallel: bool,
) -> Result<Vec<MinHashSignature>, MinHashError> {
    if parallel {
        pages.par_iter().map(|p| hasher.sign_page(p)).collect()
    } else {
        pages.iter().map(|p| hasher.sign_page(p)).collect()
    }
}

/// Drops every page whose signature equals that of an earlier kept page.
pub fn dedup(pages: Vec<PageRecord>, num_perms: usize, seed: u64) -> Result<DedupOutcome, MinHashError> {
    dedup_with(pages, &DedupParams { num_perms, seed, ..DedupParams::default() }, false)
}

pub fn dedup_with(pages: Vec<PageRecord>, params: &DedupParams, parallel: bool) -> Result<DedupOutcome, MinHashError> {
    let hasher = MinHasher::new(params.num_perms, params.seed, params.shingle_n)?;
    let mut deduper = Deduper::new(params.near_dup_threshold)?;
    let sigs = sign_pages(&hasher, &pages, parallel)?;
    let mut kept = Vec::with_capacity(pages.len());
    let mut removed_ids = Vec::new();
    for (page, sig) in pages.into_iter().zip(sigs) {
        if deduper.offer(sig) {
            kept.push(page);
        } else {
            removed_ids.push(page.id);
        }
    }
    Ok(DedupOutcome { kept, removed: deduper.removed(), removed_ids })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn set(items: &[&str]) -> ShingleSet {
        items.iter().map(|s| s.to_string()).collect()
    }

    fn page(id: &str, text: &str) -> PageRecord {
        PageRecord::from_text(id, "", text)
    }

    #[test]
    fn shingle_examples() {
        assert_eq!(shingles("a b c d", 3).unwrap(), set(&["a b c", "b c d"]));
        assert_eq!(shingles("a b", 3).unwrap(), set(&["a b"]));
        assert_eq!(shingles("x x x x", 2).unwrap(), set(&["x x"]));
        assert_eq!(shingles("A  b\tC", 3).unwrap(), set(&["a b c"]));
        assert!(shingles("", 3).unwrap().is_empty());
        assert_eq!(shingles("a", 0), Err(MinHashError::ZeroShingle));
    }

    #[test]
    fn text_path_matches_set_path() {
        let h = MinHasher::new(32, 9, 3).unwrap();
        for text in ["one two three four five", "short", "Mixed CASE text  here", "a b a b a b"] {
            let via_set = h.sign_set(shingles(text, 3).unwrap()).unwrap();
            assert_eq!(h.sign_text(text).unwrap(), via_set, "{text}");
        }
    }

    #[test]
    fn singleton_signature_is_each_hash() {
        let h = MinHasher::new(16, 3, 3).unwrap();
        let sig = h.sign_set(["a"]).unwrap();
        for i in 0..16 {
            assert_eq!(sig.values[i], h.permuted(i, "a"));
        }
    }

    #[test]
    fn multipliers_are_odd() {
        let h = MinHasher::new(64, 17, 3).unwrap();
        assert!(h.a.iter().all(|a| a % 2 == 1));
        assert_ne!(h.a, MinHasher::new(64, 18, 3).unwrap().a);
    }

    #[test]
    fn estimator_tracks_overlap() {
        let h = MinHasher::new(128, 7, 3).unwrap();
        let mut total_err = 0.0;
        for t in 0..200usize {
            let shared = t % 101;
            let a: Vec<String> = (0..100).map(|i| format!("s{t}_{i}")).collect();
            let b: Vec<String> = (0..100).map(|i| if i < shared { format!("s{t}_{i}") } else { format!("o{t}_{i}") }).collect();
            let exact = shared as f64 / (200 - shared) as f64;
            let est = estimate_jaccard(&h.sign_set(&a).unwrap(), &h.sign_set(&b).unwrap()).unwrap();
            total_err += (est - exact).abs();
        }
        assert!(total_err / 200.0 < 0.05, "mean error {}", total_err / 200.0);
    }

    #[test]
    fn empty_set_is_error() {
        assert_eq!(signature(&ShingleSet::new(), 8, 0), Err(MinHashError::EmptyShingleSet));
        assert!(matches!(MinHasher::new(0, 0, 3), Err(MinHashError::ZeroPerms)));
    }

    #[test]
    fn seeds_and_lengths_must_match() {
        let s = set(&["a b c"]);
        let a = signature(&s, 8, 1).unwrap();
        let b = signature(&s, 8, 2).unwrap();
        let c = signature(&s, 16, 1).unwrap();
        assert!(estimate_jaccard(&a, &b).is_err());
        assert!(estimate_jaccard(&a, &c).is_err());
        assert_eq!(estimate_jaccard(&a, &a), Ok(1.0));
        assert_ne!(a.values, b.values);
    }

    #[test]
    fn dedup_examples() {
        let a = page("a", "the quick brown fox");
        let b = page("b", "lorem ipsum dolor sit amet");
        let out = dedup(vec![a.clone(), a.clone()], 128, 1).unwrap();
        assert_eq!((out.kept.len(), out.removed), (1, 1));
        let out = dedup(vec![a.clone(), b.clone()], 128, 1).unwrap();
        assert_eq!(out.removed, 0);
        let mut a2 = a.clone();
        a2.id = "a2".into();
        let out = dedup(vec![a.clone(), b.clone(), a2], 128, 1).unwrap();
        assert_eq!(out.kept, vec![a, b]);
        assert_eq!(out.removed_ids, vec!["a2"]);
    }

    #[test]
    fn case_and_spacing_do_not_matter() {
        let out = dedup(vec![page("1", "Hello World again"), page("2", "hello   world AGAIN")], 64, 5).unwrap();
        assert_eq!(out.removed, 1);
    }

    #[test]
    fn near_dup_mode() {
        let base: Vec<String> = (0..200).map(|i| format!("w{i}")).collect();
        let mut edited = base.clone();
        edited[199] = "changed".into();
        let pages = vec![page("1", &base.join(" ")), page("2", &edited.join(" "))];
        let exact = dedup_with(pages.clone(), &DedupParams::default(), false).unwrap();
        assert_eq!(exact.removed, 0);
        let params = DedupParams { near_dup_threshold: Some(0.8), ..DedupParams::default() };
        let near = dedup_with(pages, &params, false).unwrap();
        assert_eq!(near.removed, 1);
        assert!(Deduper::new(Some(0.0)).is_err());
    }

    #[test]
    fn empty_page_is_reported() {
        let err = dedup(vec![page("e", "")], 8, 0).unwrap_err();
        assert_eq!(err, MinHashError::EmptyPage { id: "e".into() });
    }

    #[test]
    fn parallel_matches_sequential() {
        let pages: Vec<_> = (0..40).map(|i| page(&i.to_string(), &format!("page {} body {}", i % 7, i % 3))).collect();
        let p = dedup_with(pages.clone(), &DedupParams::default(), true).unwrap();
        let s = dedup_with(pages, &DedupParams::default(), false).unwrap();
        assert_eq!(p, s);
    }
}
