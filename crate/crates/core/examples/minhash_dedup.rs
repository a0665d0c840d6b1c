// Shingling, MinHash signatures, Jaccard estimates and exact-duplicate removal.

use std::error::Error;

use darkcorpus::minhash::{dedup_with, estimate_jaccard, shingles, signature, DedupParams, MinHasher};
use darkcorpus::PageRecord;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let a = "the quick brown fox jumps over the lazy dog near the river bank";
    let b = "the quick brown fox jumps over the lazy cat near the river bank";
    let (sa, sb) = (shingles(a, 3)?, shingles(b, 3)?);
    let exact = sa.intersection(&sb).count() as f64 / sa.union(&sb).count() as f64;
    let est = estimate_jaccard(&signature(&sa, 128, 1)?, &signature(&sb, 128, 1)?)?;
    println!("exact jaccard {exact:.3}, estimate {est:.3}");

    let hasher = MinHasher::new(128, 1, 3)?;
    let sig = hasher.sign_text(a)?;
    println!("signature has {} values, first {:#018x}", sig.num_perms(), sig.values[0]);

    let pages: Vec<PageRecord> = [a, b, a, "THE QUICK brown fox jumps over the lazy dog near the river bank"]
        .iter()
        .enumerate()
        .map(|(i, t)| PageRecord::from_text(format!("p{i}"), "", t))
        .collect();
    let exact_only = dedup_with(pages.clone(), &DedupParams::default(), false)?;
    println!("exact dedup kept {:?}, removed {:?}", ids(&exact_only.kept), exact_only.removed_ids);

    let near = DedupParams { near_dup_threshold: Some(0.5), ..Default::default() };
    let near_out = dedup_with(pages, &near, false)?;
    println!("near-dup (>= 0.5) kept {:?}", ids(&near_out.kept));
    Ok(())
}

fn ids(pages: &[PageRecord]) -> Vec<&str> {
    pages.iter().map(|p| p.id.as_str()).collect()
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
