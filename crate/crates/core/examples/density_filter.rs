// Dropping pages that are too short or too long, with fixed or derived thresholds.

use std::error::Error;

use darkcorpus::density::{derive_thresholds, filter_by_density, DensityThresholds};
use darkcorpus::stats::char_quartiles;
use darkcorpus::PageRecord;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let lengths = [120, 499, 500, 2_400, 6_000, 10_000, 10_001, 15_000];
    let pages: Vec<PageRecord> =
        lengths.iter().map(|&n| PageRecord::from_text(format!("len{n}"), "", &"w".repeat(n))).collect();

    let fixed = DensityThresholds::default();
    let (kept, tally) = filter_by_density(pages.clone(), &fixed);
    println!("fixed {}..={}: kept {:?}", fixed.min_chars, fixed.max_chars, ids(&kept));
    println!("  dropped {} short, {} long", tally.dropped_low, tally.dropped_high);

    let q = char_quartiles(&pages)?;
    let derived = derive_thresholds(&q)?;
    println!("quartiles q1={} q3={} give {}..={}", q.q1, q.q3, derived.min_chars, derived.max_chars);
    let (kept, _) = filter_by_density(pages, &derived);
    println!("derived: kept {:?}", ids(&kept));
    Ok(())
}

fn ids(pages: &[PageRecord]) -> Vec<&str> {
    pages.iter().map(|p| p.id.as_str()).collect()
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
