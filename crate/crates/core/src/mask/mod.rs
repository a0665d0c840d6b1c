//! Identifier masking and character cleanup for the preprocessed corpus.
//!
//! A [`MaskRuleSet`] is an ordered subset of the fixed rule sequence:
//!
//! | rule               | action                       |
//! |--------------------|------------------------------|
//! | `ID_EMAIL`         | replace with token           |
//! | `ID_ONION_URL`     | replace with token           |
//! | `ID_NORMAL_URL`    | replace with token           |
//! | `ID_IP_ADDRESS`    | replace with token           |
//! | `ID_BTC_ADDRESS`   | replace with token           |
//! | `ID_ETH_ADDRESS`   | replace with token           |
//! | `ID_LTC_ADDRESS`   | replace with token           |
//! | `ID_LONGWORD`      | replace with token           |
//! | `UNCOMMON_CHARS`   | remove from text             |
//! | `WHITESPACE`       | truncate to a single space   |
//!
//! Each rule scans the output of the previous one. Deleting characters can
//! join fragments into a new identifier, so the whole sequence is repeated
//! until a pass leaves the text unchanged; the result is therefore a fixed
//! point and masking is idempotent.

mod cleanup;
mod patterns;

use std::borrow::Cow;
use std::collections::BTreeMap;
use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

pub use cleanup::{normalize_whitespace, remove_uncommon_chars, LONGWORD_MIN_CHARS, MAX_COMMON_CHAR};

/// Upper bound on masking passes; real text settles after one or two.
const MAX_PASSES: usize = 8;

/// The mask token vocabulary.
pub const MASK_TOKENS: [&str; 8] = [
    "ID_EMAIL",
    "ID_NORMAL_URL",
    "ID_ONION_URL",
    "ID_IP_ADDRESS",
    "ID_BTC_ADDRESS",
    "ID_ETH_ADDRESS",
    "ID_LTC_ADDRESS",
    "ID_LONGWORD",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum RuleKind {
    Email,
    OnionUrl,
    NormalUrl,
    IpAddress,
    BtcAddress,
    EthAddress,
    LtcAddress,
    LongWord,
    UncommonChars,
    Whitespace,
}

impl RuleKind {
    /// All rules in application order.
    pub const ORDER: [RuleKind; 10] = [
        RuleKind::Email,
        RuleKind::OnionUrl,
        RuleKind::NormalUrl,
        RuleKind::IpAddress,
        RuleKind::BtcAddress,
        RuleKind::EthAddress,
        RuleKind::LtcAddress,
        RuleKind::LongWord,
        RuleKind::UncommonChars,
        RuleKind::Whitespace,
    ];

    pub fn name(self) -> &'static str {
        match self {
            RuleKind::Email => "ID_EMAIL",
            RuleKind::OnionUrl => "ID_ONION_URL",
            RuleKind::NormalUrl => "ID_NORMAL_URL",
            RuleKind::IpAddress => "ID_IP_ADDRESS",
            RuleKind::BtcAddress => "ID_BTC_ADDRESS",
            RuleKind::EthAddress => "ID_ETH_ADDRESS",
            RuleKind::LtcAddress => "ID_LTC_ADDRESS",
            RuleKind::LongWord => "ID_LONGWORD",
            RuleKind::UncommonChars => "UNCOMMON_CHARS",
            RuleKind::Whitespace => "WHITESPACE",
        }
    }

    pub fn action(self) -> MaskAction {
        match self {
            RuleKind::UncommonChars => MaskAction::Remove,
            RuleKind::Whitespace => MaskAction::TruncateWhitespace,
            _ => MaskAction::ReplaceWithToken,
        }
    }

    /// The mask token for replace rules.
    pub fn token(self) -> Option<&'static str> {
        match self.action() {
            MaskAction::ReplaceWithToken => Some(self.name()),
            _ => None,
        }
    }

    /// Human-readable description of what the rule matches. For regex-backed
    /// rules this is the regex source.
    pub fn pattern(self) -> Cow<'static, str> {
        match self {
            RuleKind::Email => Cow::Borrowed(patterns::EMAIL_PATTERN),
            RuleKind::OnionUrl => Cow::Owned(patterns::ONION_PATTERN.clone()),
            RuleKind::NormalUrl => Cow::Owned(patterns::NORMAL_URL_PATTERN.clone()),
            RuleKind::IpAddress => Cow::Owned(format!(
                "{} | validated IPv6 in {}",
                *patterns::IPV4_PATTERN,
                patterns::IPV6_CANDIDATE_PATTERN
            )),
            RuleKind::BtcAddress => Cow::Owned(patterns::BTC_PATTERN.clone()),
            RuleKind::EthAddress => Cow::Borrowed(patterns::ETH_PATTERN),
            RuleKind::LtcAddress => Cow::Owned(patterns::LTC_PATTERN.clone()),
            RuleKind::LongWord => Cow::Borrowed("maximal non-whitespace run of 38 or more characters"),
            RuleKind::UncommonChars => Cow::Borrowed("any character above U+00FF"),
            RuleKind::Whitespace => Cow::Borrowed("maximal run of Unicode whitespace"),
        }
    }

    fn finder(self) -> Option<fn(&str) -> Vec<Range<usize>>> {
        Some(match self {
            RuleKind::Email => patterns::find_emails,
            RuleKind::OnionUrl => patterns::find_onion_urls,
            RuleKind::NormalUrl => patterns::find_normal_urls,
            RuleKind::IpAddress => patterns::find_ip_addresses,
            RuleKind::BtcAddress => patterns::find_btc_addresses,
            RuleKind::EthAddress => patterns::find_eth_addresses,
            RuleKind::LtcAddress => patterns::find_ltc_addresses,
            _ => return None,
        })
    }
}

impl fmt::Display for RuleKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown mask rule {0:?}")]
pub struct UnknownRule(pub String);

impl FromStr for RuleKind {
    type Err = UnknownRule;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let wanted = s.trim();
        RuleKind::ORDER
            .into_iter()
            .find(|k| {
                let name = k.name();
                name.eq_ignore_ascii_case(wanted)
                    || name.strip_prefix("ID_").is_some_and(|n| n.eq_ignore_ascii_case(wanted))
            })
            .ok_or_else(|| UnknownRule(s.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MaskAction {
    ReplaceWithToken,
    Remove,
    TruncateWhitespace,
}

/// One masking rule as exposed to callers.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskRule {
    pub kind: RuleKind,
}

impl MaskRule {
    pub fn name(&self) -> &'static str {
        self.kind.name()
    }

    pub fn action(&self) -> MaskAction {
        self.kind.action()
    }

    pub fn token(&self) -> Option<&'static str> {
        self.kind.token()
    }

    pub fn pattern(&self) -> Cow<'static, str> {
        self.kind.pattern()
    }
}

/// An ordered set of masking rules. Order is always the fixed application
/// order regardless of how the set was built.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MaskRuleSet {
    rules: Vec<MaskRule>,
}

impl Default for MaskRuleSet {
    fn default() -> Self {
        Self::full()
    }
}

impl MaskRuleSet {
    /// Every rule.
    pub fn full() -> Self {
        Self::from_kinds(RuleKind::ORDER)
    }

    pub fn from_kinds(kinds: impl IntoIterator<Item = RuleKind>) -> Self {
        let mut kinds: Vec<RuleKind> = kinds.into_iter().collect();
        kinds.sort();
        kinds.dedup();
        Self { rules: kinds.into_iter().map(|kind| MaskRule { kind }).collect() }
    }

    /// Builds a subset from rule names such as `ID_EMAIL`, `email` or `whitespace`.
    pub fn from_names<S: AsRef<str>>(names: &[S]) -> Result<Self, UnknownRule> {
        let kinds = names.iter().map(|n| n.as_ref().parse()).collect::<Result<Vec<RuleKind>, _>>()?;
        Ok(Self::from_kinds(kinds))
    }

    pub fn rules(&self) -> &[MaskRule] {
        &self.rules
    }

    pub fn names(&self) -> Vec<&'static str> {
        self.rules.iter().map(MaskRule::name).collect()
    }

    pub fn apply(&self, text: &str) -> (String, MaskReport) {
        apply_masks(text, self)
    }
}

/// Per-text masking audit.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct MaskReport {
    /// Replacement count per rule name. Whitespace counts changed runs,
    /// uncommon characters counts deleted characters.
    pub counts: BTreeMap<String, u64>,
    pub chars_removed: u64,
    pub bytes_before: u64,
    pub bytes_after: u64,
    /// Bytes added by tokens longer than the text they replaced;
    /// `bytes_after <= bytes_before + inflation_bytes` always holds.
    pub inflation_bytes: u64,
}

impl MaskReport {
    pub fn total_replacements(&self) -> u64 {
        self.counts.values().sum()
    }

    pub fn count(&self, rule: RuleKind) -> u64 {
        self.counts.get(rule.name()).copied().unwrap_or(0)
    }

    fn bump(&mut self, rule: RuleKind, n: u64) {
        if n > 0 {
            *self.counts.entry(rule.name().to_string()).or_default() += n;
        }
    }

    /// Adds another report's counters into this one.
    pub fn merge(&mut self, other: &MaskReport) {
        for (k, v) in &other.counts {
            *self.counts.entry(k.clone()).or_default() += v;
        }
        self.chars_removed += other.chars_removed;
        self.bytes_before += other.bytes_before;
        self.bytes_after += other.bytes_after;
        self.inflation_bytes += other.inflation_bytes;
    }
}

fn replace_ranges<'a>(text: &'a str, ranges: &[Range<usize>], token: &str) -> (Cow<'a, str>, u64) {
    if ranges.is_empty() {
        return (Cow::Borrowed(text), 0);
    }
    let mut out = String::with_capacity(text.len());
    let mut last = 0;
    let mut inflation = 0u64;
    for r in ranges {
        out.push_str(&text[last..r.start]);
        out.push_str(token);
        inflation += (token.len() as u64).saturating_sub(r.len() as u64);
        last = r.end;
    }
    out.push_str(&text[last..]);
    (Cow::Owned(out), inflation)
}

/// One pass over every rule. Returns the new text and whether anything other
/// than whitespace changed.
fn single_pass(text: &str, rules: &MaskRuleSet, report: &mut MaskReport) -> (String, bool) {
    let mut current: Cow<'_, str> = Cow::Borrowed(text);
    let mut substantive = false;

    for rule in &rules.rules {
        let kind = rule.kind;
        match kind {
            RuleKind::LongWord => {
                let (next, n, infl) = cleanup::mask_long_words(&current, kind.name());
                if n > 0 {
                    let owned = next.into_owned();
                    report.bump(kind, n);
                    report.inflation_bytes += infl;
                    substantive = true;
                    current = Cow::Owned(owned);
                }
            }
            RuleKind::UncommonChars => {
                let (next, removed) = cleanup::remove_uncommon_cow(&current);
                if removed > 0 {
                    let owned = next.into_owned();
                    report.bump(kind, removed as u64);
                    report.chars_removed += removed as u64;
                    substantive = true;
                    current = Cow::Owned(owned);
                }
            }
            RuleKind::Whitespace => {
                let (next, changed) = cleanup::normalize_whitespace_counted(&current);
                if changed > 0 {
                    let owned = next.into_owned();
                    report.bump(kind, changed);
                    current = Cow::Owned(owned);
                }
            }
            _ => {
                let finder = kind.finder().expect("identifier rules have a matcher");
                let ranges = finder(&current);
                if !ranges.is_empty() {
                    let (next, infl) = replace_ranges(&current, &ranges, kind.name());
                    let owned = next.into_owned();
                    report.bump(kind, ranges.len() as u64);
                    report.inflation_bytes += infl;
                    substantive = true;
                    current = Cow::Owned(owned);
                }
            }
        }
    }
    (current.into_owned(), substantive)
}

/// Applies `rules` to `text` until the result is stable.
///
/// ```
/// use darkcorpus::mask::{apply_masks, MaskRuleSet};
///
/// let (masked, report) = apply_masks("contact example@email.com now", &MaskRuleSet::full());
/// assert_eq!(masked, "contact ID_EMAIL now");
/// assert_eq!(report.counts["ID_EMAIL"], 1);
/// ```
pub fn apply_masks(text: &str, rules: &MaskRuleSet) -> (String, MaskReport) {
    let mut report = MaskReport { bytes_before: text.len() as u64, ..Default::default() };
    let (mut current, mut substantive) = single_pass(text, rules, &mut report);
    let mut passes = 1;
    // Whitespace-only changes cannot create new matches: every pattern treats
    // all whitespace characters alike.
    while substantive && passes < MAX_PASSES {
        let (next, changed) = single_pass(&current, rules, &mut report);
        substantive = changed;
        current = next;
        passes += 1;
    }
    report.bytes_after = current.len() as u64;
    (current, report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn mask(text: &str) -> String {
        apply_masks(text, &MaskRuleSet::full()).0
    }

    #[test]
    fn table_examples() {
        assert_eq!(mask("contact example@email.com now"), "contact ID_EMAIL now");
        assert_eq!(mask("www.example.com"), "ID_NORMAL_URL");
        assert_eq!(mask("https://www.example.com/home"), "ID_NORMAL_URL");
        assert_eq!(
            mask("facebookwkhpilnemxj7asaniu7vnjjbiltxjqhye3mhbshg7kx5tfyd.onion"),
            "ID_ONION_URL"
        );
        assert_eq!(mask("192.168.1.1"), "ID_IP_ADDRESS");
        assert_eq!(mask("node at fe80::1ff:fe23:4567:890a%eth2 up"), "node at ID_IP_ADDRESS up");
        assert_eq!(mask("a\n\t b"), "a b");
    }

    #[test]
    fn rule_order_eth_beats_longword() {
        let text = format!("0x{}", "a".repeat(40));
        assert_eq!(text.chars().count(), 42);
        let (out, report) = apply_masks(&text, &MaskRuleSet::full());
        assert_eq!(out, "ID_ETH_ADDRESS");
        assert_eq!(report.count(RuleKind::LongWord), 0);
    }

    #[test]
    fn email_beats_onion_host() {
        assert_eq!(mask("write to admin@expyuzz4wqqyqhjn.onion today"), "write to ID_EMAIL today");
    }

    #[test]
    fn three_prefixed_base58_masks_as_btc() {
        let addr = "3J98t1WpEZ73CNmQviecrnyiWrnqRhWNLy";
        assert_eq!(mask(addr), "ID_BTC_ADDRESS");
    }

    #[test]
    fn subset_rules_only_apply_selected() {
        let rules = MaskRuleSet::from_names(&["email"]).unwrap();
        let (out, _) = apply_masks("a@b.com  192.168.1.1", &rules);
        assert_eq!(out, "ID_EMAIL  192.168.1.1");
        assert_eq!(MaskRuleSet::from_names(&["whitespace", "ID_EMAIL"]).unwrap().names(), ["ID_EMAIL", "WHITESPACE"]);
        assert_eq!(MaskRuleSet::from_names(&["phone"]), Err(UnknownRule("phone".into())));
    }

    #[test]
    fn removal_that_creates_identifier_is_masked() {
        // The check mark splits the TLD; once it is deleted an email appears.
        let (out, report) = apply_masks("mail a@b.c✓om", &MaskRuleSet::full());
        assert_eq!(out, "mail ID_EMAIL");
        assert_eq!(report.count(RuleKind::Email), 1);
        assert_eq!(report.chars_removed, 1);
    }

    #[test]
    fn later_token_does_not_feed_earlier_rule() {
        let once = mask("foo@bar.1.2.3.4 x");
        let (twice, report) = apply_masks(&once, &MaskRuleSet::full());
        assert_eq!(once, twice);
        assert_eq!(report.total_replacements(), 0);
    }

    #[test]
    fn report_byte_accounting() {
        let (out, report) = apply_masks("ip 1.1.1.1 ok ✓", &MaskRuleSet::full());
        assert_eq!(out, "ip ID_IP_ADDRESS ok");
        assert_eq!(report.bytes_before, "ip 1.1.1.1 ok ✓".len() as u64);
        assert_eq!(report.bytes_after, out.len() as u64);
        assert_eq!(report.inflation_bytes, 6);
        assert!(report.bytes_after <= report.bytes_before + report.inflation_bytes);
    }

    #[test]
    fn plain_latin1_text_is_untouched() {
        let text = "Café au lait, s'il vous plaît \u{2014} non";
        let (out, report) = apply_masks("Café au lait, s'il vous plaît", &MaskRuleSet::full());
        assert_eq!(out, "Café au lait, s'il vous plaît");
        assert_eq!(report.total_replacements(), 0);
        assert_eq!(mask(text), "Café au lait, s'il vous plaît non");
    }
}
