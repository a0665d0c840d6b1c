// Keeping English pages, either by trusting crawl labels or by a text heuristic.

use std::error::Error;

use darkcorpus::ingest::{language_gate, language_scores, GateTally, LanguageMode, LanguagePolicy, PageRecord};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let texts = [
        ("en", "The vendor said that all of the orders would ship within two days."),
        ("ru", "Продавец сказал что все заказы будут отправлены в течение двух дней."),
        ("en", "Lorem ipsum dolor sit amet consectetur adipiscing elit."),
    ];
    let pages: Vec<PageRecord> = texts
        .iter()
        .enumerate()
        .map(|(i, (lang, text))| {
            let mut p = PageRecord::from_text(i.to_string(), "", text);
            p.lang_label = Some(lang.to_string());
            p
        })
        .collect();

    for mode in [LanguageMode::TrustLabel, LanguageMode::Heuristic] {
        let policy = LanguagePolicy { mode, ..Default::default() };
        policy.validate()?;
        let mut tally = GateTally::default();
        for p in &pages {
            let outcome = language_gate(p, &policy);
            tally.record(outcome);
            let s = language_scores(&p.text);
            println!(
                "{mode:?} page {}: {outcome:?} (latin1 {:.2}, stopwords {:.2})",
                p.id, s.latin1_fraction, s.stopword_fraction
            );
        }
        println!("{mode:?}: kept {} of {}", tally.kept, tally.total());
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
