// Running the whole pipeline on a small generated crawl and reading its outputs.

use std::error::Error;
use std::fs;

use darkcorpus::pipeline::{run_pipeline, PipelineConfig, CORPUS_FILE, MANIFEST_FILE};
use serde_json::json;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let dir = tempfile::tempdir()?;
    let input = dir.path().join("crawl.jsonl");
    let topics = [
        ("Drugs", "cannabis and mdma pills shipped in stealth packaging with tracking"),
        ("Financial", "fresh credit card dumps with cvv and bank login for transfer"),
        ("Gambling", "provably fair casino dice and poker tables with instant payout"),
    ];
    let mut lines = Vec::new();
    for i in 0..60 {
        let (category, topic) = topics[i % topics.len()];
        // Every fifth page repeats an earlier one.
        let n = if i % 5 == 4 { i - 3 } else { i };
        let text = format!(
            "Listing {n}. {} Contact seller{n}@mail.com or visit http://shop{n}.example.com/item for details.",
            format!("{topic} and the best prices on the market for item {n}. ").repeat(8)
        );
        let lang = if i % 11 == 0 { "de" } else { "en" };
        lines.push(json!({"id": format!("page-{i}"), "url": format!("http://x{i}.onion/"), "text": text, "lang": lang, "category": category}).to_string());
    }
    fs::write(&input, lines.join("\n"))?;

    let mut cfg = PipelineConfig { input, output_dir: dir.path().join("out"), ..Default::default() };
    cfg.balance.cap_bytes = 12_000;
    let outcome = run_pipeline(&cfg)?;

    for s in &outcome.manifest.stages {
        println!("{:<15} pages {:>3} -> {:>3}  bytes {:>6} -> {:>6}", s.stage, s.pages_in, s.pages_out, s.bytes_in, s.bytes_out);
    }
    for (cat, row) in &outcome.stats.reduction.categories {
        println!("{cat:<10} dedup {:>6}%  total {:>6}%", row.dedup_rate_pct, row.total_reduction_rate_pct);
    }
    let corpus = fs::read_to_string(cfg.output_dir.join(CORPUS_FILE))?;
    println!("\ncorpus: {} bytes, {} pages", corpus.len(), corpus.split("</s>").count());
    println!("first page: {}...", &corpus[..corpus.find("</s>").unwrap_or(corpus.len()).min(120)]);

    // The manifest alone reproduces the run.
    let replay = PipelineConfig::from_json_file(&cfg.output_dir.join(MANIFEST_FILE))?;
    let again = PipelineConfig { output_dir: dir.path().join("replay"), ..replay };
    run_pipeline(&again)?;
    let same = fs::read(again.output_dir.join(CORPUS_FILE))? == corpus.as_bytes();
    println!("replayed from manifest: identical corpus = {same}");
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
