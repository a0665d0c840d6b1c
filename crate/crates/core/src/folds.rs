//! Stratified and repeated k-fold split assignments.

use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::rng;

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
pub enum FoldError {
    #[error("k must be at least 2, got {0}")]
    TooFewFolds(usize),
    #[error("k ({k}) exceeds the number of items ({n})")]
    TooManyFolds { k: usize, n: usize },
    #[error("repetitions must be at least 1")]
    ZeroRepetitions,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct FoldAssignment {
    /// Fold index of each item, in input order.
    pub folds: Vec<usize>,
    pub k: usize,
    pub seed: u64,
    pub repetition: usize,
}

impl FoldAssignment {
    pub fn fold_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &f in &self.folds {
            sizes[f] += 1;
        }
        sizes
    }

    /// Items of fold `f` (the test split), by index.
    pub fn test_indices(&self, f: usize) -> Vec<usize> {
        self.folds.iter().enumerate().filter(|&(_, &x)| x == f).map(|(i, _)| i).collect()
    }

    /// Per-class counts in every fold.
    pub fn class_counts<L: Ord + Clone>(&self, labels: &[L]) -> BTreeMap<L, Vec<usize>> {
        let mut out: BTreeMap<L, Vec<usize>> = BTreeMap::new();
        for (l, &f) in labels.iter().zip(&self.folds) {
            out.entry(l.clone()).or_insert_with(|| vec![0; self.k])[f] += 1;
        }
        out
    }
}

/// Shuffles each class with a generator seeded by `seed`, then deals items
/// round-robin to folds. The deal position carries over from one class to
/// the next (classes in label order), which keeps overall fold sizes within
/// one of each other as well as per-class counts.
pub fn stratified_kfold<L: Ord>(labels: &[L], k: usize, seed: u64) -> Result<FoldAssignment, FoldError> {
    assign(labels, k, seed, 0)
}

fn assign<L: Ord>(labels: &[L], k: usize, seed: u64, repetition: usize) -> Result<FoldAssignment, FoldError> {
    if k < 2 {
        return Err(FoldError::TooFewFolds(k));
    }
    if k > labels.len() {
        return Err(FoldError::TooManyFolds { k, n: labels.len() });
    }
    let mut classes: BTreeMap<&L, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        classes.entry(l).or_default().push(i);
    }
    let mut rng = rng::seeded(seed);
    let mut folds = vec![0; labels.len()];
    let mut next = 0;
    for members in classes.values_mut() {
        members.shuffle(&mut rng);
        for &i in members.iter() {
            folds[i] = next;
            next = (next + 1) % k;
        }
    }
    Ok(FoldAssignment { folds, k, seed, repetition })
}

/// Seed used for repetition `r`: splitmix64 of `seed ^ r`.
pub fn repetition_seed(seed: u64, r: usize) -> u64 {
    rng::splitmix64(seed ^ r as u64)
}

pub fn repeated_kfold<L: Ord>(
    labels: &[L],
    k: usize,
    repetitions: usize,
    seed: u64,
) -> Result<Vec<FoldAssignment>, FoldError> {
    if repetitions == 0 {
        return Err(FoldError::ZeroRepetitions);
    }
    (0..repetitions).map(|r| assign(labels, k, repetition_seed(seed, r), r)).collect()
}
