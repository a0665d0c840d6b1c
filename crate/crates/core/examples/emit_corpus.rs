// Joining pages into a corpus with separators and recording a manifest.

use std::error::Error;

use darkcorpus::emit::{
    emit_corpus_with, CaseVariant, CorpusManifest, CorpusWriter, StageRecord, TextVariant, Variant,
};
use serde_json::json;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let pages = ["First page.", "A page that quotes the </s> token.", "Ünïcode İstanbul"];

    let (cased, stats) = emit_corpus_with(pages, "</s>", CaseVariant::Cased)?;
    println!("cased:   {cased}");
    println!("         {} escapes, {} bytes out", stats.separator_escapes, stats.bytes_out);
    let (uncased, _) = emit_corpus_with(pages, "</s>", CaseVariant::Uncased)?;
    println!("uncased: {uncased}");

    // Streaming writer with per-page placements.
    let mut w = CorpusWriter::new(Vec::new(), "</s>", CaseVariant::Cased)?;
    for (i, p) in pages.iter().enumerate() {
        let at = w.push(&format!("p{i}"), p)?;
        println!("p{i} at offset {} len {}", at.offset, at.len);
    }
    let (bytes, stats) = w.finish()?;

    let variant = Variant { text: TextVariant::Preprocessed, case: CaseVariant::Cased };
    let mut manifest = CorpusManifest::new(variant, json!({"note": "example"}), "</s>");
    manifest.stages.push(
        StageRecord::new("emit", 3, stats.pages, stats.bytes_in, stats.bytes_out).with_allowance(stats.overhead_bytes),
    );
    manifest.separator_escapes = stats.separator_escapes;
    manifest.validate()?;
    println!("\n{} corpus bytes; manifest:\n{}", bytes.len(), manifest.to_canonical_json()?);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
