// Replacing identifiers with mask tokens and cleaning up characters.

use std::error::Error;

use darkcorpus::mask::{apply_masks, MaskRuleSet, RuleKind};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let text = "Mail admin@example.com or visit http://facebookwkhpilnemxj7asaniu7vnjjbiltxjqhye3mhbshg7kx5tfyd.onion/\n\n\
                Mirror: www.example.com, relay 192.168.1.1 and fe80::1ff:fe23:4567:890a%eth2.\t\
                Donate 1A1zP1eP5QGefi2DMPTfTL5SLmv7DivfNa or 0x52908400098527886E0F7030069857D2E4169EE7. \
                sha256 9f86d081884c7d659a2feaa0c55ad015a3bf4f1b2b0b822cd15d6c15b0f00a08 \u{2713} done";

    let (masked, report) = apply_masks(text, &MaskRuleSet::full());
    println!("{masked}\n");
    for (rule, n) in &report.counts {
        println!("{rule:>16}: {n}");
    }
    println!("bytes {} -> {}", report.bytes_before, report.bytes_after);

    // Any subset of rules, always applied in the canonical order.
    let urls_only = MaskRuleSet::from_names(&["normal_url", "onion_url", "whitespace"])?;
    println!("\nurls only: {}", urls_only.apply(text).0);
    let ws = MaskRuleSet::from_kinds([RuleKind::Whitespace]);
    println!("whitespace only: {}", ws.apply("a\n\t  b").0);
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
