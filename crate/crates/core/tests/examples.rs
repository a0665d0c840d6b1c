//! Every example under `examples/` must run to completion.

#[allow(dead_code)]
mod extract_html {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/extract_html.rs"));
}

#[allow(dead_code)]
mod language_gate {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/language_gate.rs"));
}

#[allow(dead_code)]
mod density_filter {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/density_filter.rs"));
}

#[allow(dead_code)]
mod mask_identifiers {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/mask_identifiers.rs"));
}

#[allow(dead_code)]
mod minhash_dedup {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/minhash_dedup.rs"));
}

#[allow(dead_code)]
mod balance_categories {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/balance_categories.rs"));
}

#[allow(dead_code)]
mod emit_corpus {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/emit_corpus.rs"));
}

#[allow(dead_code)]
mod stratified_folds {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/stratified_folds.rs"));
}

#[allow(dead_code)]
mod corpus_stats {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/corpus_stats.rs"));
}

#[allow(dead_code)]
mod full_pipeline {
    include!(concat!(env!("CARGO_MANIFEST_DIR"), "/examples/full_pipeline.rs"));
}

#[test]
fn extract_html_runs() {
    extract_html::run_example().expect("extract_html example failed");
}

#[test]
fn language_gate_runs() {
    language_gate::run_example().expect("language_gate example failed");
}

#[test]
fn density_filter_runs() {
    density_filter::run_example().expect("density_filter example failed");
}

#[test]
fn mask_identifiers_runs() {
    mask_identifiers::run_example().expect("mask_identifiers example failed");
}

#[test]
fn minhash_dedup_runs() {
    minhash_dedup::run_example().expect("minhash_dedup example failed");
}

#[test]
fn balance_categories_runs() {
    balance_categories::run_example().expect("balance_categories example failed");
}

#[test]
fn emit_corpus_runs() {
    emit_corpus::run_example().expect("emit_corpus example failed");
}

#[test]
fn stratified_folds_runs() {
    stratified_folds::run_example().expect("stratified_folds example failed");
}

#[test]
fn corpus_stats_runs() {
    corpus_stats::run_example().expect("corpus_stats example failed");
}

#[test]
fn full_pipeline_runs() {
    full_pipeline::run_example().expect("full_pipeline example failed");
}
