// Page length quartiles, word length histogram and per-category reduction rates.

use std::error::Error;

use darkcorpus::balance::{Category, CategoryDistribution};
use darkcorpus::stats::{char_quartiles, reduction_report, word_length_histogram};
use darkcorpus::PageRecord;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let pages: Vec<PageRecord> = ["a", "bb", "ccc", "dddd"]
        .iter()
        .enumerate()
        .map(|(i, t)| PageRecord::from_text(i.to_string(), "", t))
        .collect();
    let q = char_quartiles(&pages)?;
    println!("quartiles ({}, {}, {}), mean {:.2}", q.q1, q.q2, q.q3, q.mean);

    let prose = [PageRecord::from_text("x", "", "the cat saw the other cat near a 0123456789abcdef0123456789abcdef01234567")];
    println!("word lengths: {:?}", word_length_histogram(&prose));

    let dist = |entries: &[(Category, u64)]| {
        let mut d = CategoryDistribution::default();
        for &(c, bytes) in entries {
            d.add(c, bytes);
        }
        d
    };
    let initial = dist(&[(Category::Gambling, 150_000), (Category::Drugs, 1_750_000)]);
    let after_dedup = dist(&[(Category::Gambling, 141_945), (Category::Drugs, 1_342_075)]);
    let fin = dist(&[(Category::Gambling, 141_945), (Category::Drugs, 766_700)]);
    let report = reduction_report(&initial, &after_dedup, &fin)?;
    for (cat, row) in &report.categories {
        println!("{cat:<10} dedup {:>6}%  total {:>6}%", row.dedup_rate_pct, row.total_reduction_rate_pct);
    }
    println!("{:<10} dedup {:>6}%  total {:>6}%", "Total", report.total.dedup_rate_pct, report.total.total_reduction_rate_pct);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
