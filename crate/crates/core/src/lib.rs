//! Curation pipeline that turns crawled web pages into a pretraining-ready
//! text corpus.
//!
//! The stages, in pipeline order:
//!
//! - [`ingest`]: JSONL loading, HTML title/body extraction, language gate
//! - [`density`]: character-count filtering of low-information pages
//! - [`mask`]: identifier masking and character cleanup
//! - [`minhash`]: MinHash signatures and exact-signature deduplication
//! - [`balance`]: category assignment and random down-sampling of large categories
//! - [`emit`]: corpus assembly, case folding and the run manifest
//!
//! [`stats`] computes the corpus statistics that drive thresholds and the
//! reduction report, [`folds`] builds stratified k-fold splits for downstream
//! evaluation, and [`pipeline`] wires everything together.

pub mod balance;
pub mod cli;
pub mod density;
pub mod emit;
pub mod folds;
pub mod ingest;
pub mod mask;
pub mod minhash;
pub mod pipeline;
pub mod stats;

mod rng;

pub use balance::{balance, Category, CategoryDistribution};
pub use density::{derive_thresholds, filter_by_density, DensityThresholds};
pub use emit::{case_fold, emit_corpus, CorpusManifest};
pub use folds::{repeated_kfold, stratified_kfold, FoldAssignment};
pub use ingest::{extract_text, language_gate, load_pages, LanguagePolicy, PageRecord};
pub use mask::{apply_masks, normalize_whitespace, remove_uncommon_chars, MaskReport, MaskRuleSet};
pub use minhash::{dedup, estimate_jaccard, shingles, signature, MinHashSignature};
pub use pipeline::{run_pipeline, PipelineConfig};
pub use stats::{char_quartiles, reduction_report, word_length_histogram};
