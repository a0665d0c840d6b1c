// Classifying pages into activity categories and capping each category's size.

use std::error::Error;

use darkcorpus::balance::{balance, default_lexicon, Category, KeywordClassifier, PageClassifier};
use darkcorpus::PageRecord;

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let texts = [
        "fresh cvv dumps and bank transfer services",
        "online casino with poker and roulette",
        "glock pistol with ammo",
        "cheap cocaine and mdma pills by the gram",
        "mdma pills shipped worldwide",
        "weed and cannabis edibles",
        "lsd tabs and ketamine",
        "nothing to see here",
    ];
    let mut pages: Vec<PageRecord> =
        texts.iter().enumerate().map(|(i, t)| PageRecord::from_text(format!("p{i}"), "", t)).collect();

    let mut classifier = KeywordClassifier::new(&default_lexicon(), Category::Financial)?;
    println!("classifier: {}", classifier.describe());
    classifier.classify_all(&mut pages)?;
    for p in &pages {
        println!("{}: {:<14} {}", p.id, p.category.as_deref().unwrap_or("-"), p.text);
    }

    let cap = 60;
    let out = balance(pages, cap, 7)?;
    println!("\ncap {cap} bytes");
    for (cat, before) in &out.dist_before.categories {
        let after = out.dist_after.get(*cat);
        println!("{cat:<14} {:>3} B / {} pages -> {:>3} B / {} pages", before.bytes, before.pages, after.bytes, after.pages);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
