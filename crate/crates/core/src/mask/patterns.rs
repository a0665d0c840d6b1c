//! Identifier matchers.
//!
//! Each matcher returns the byte ranges of non-overlapping matches in
//! left-to-right order. Regexes carry the bulk of each pattern; boundary and
//! validity checks that the regex engine cannot express (no look-around)
//! are done on the candidate match.

use std::net::Ipv6Addr;
use std::ops::Range;
use std::sync::LazyLock;

use regex::Regex;

/// Characters a URL may not end with when it is followed by prose.
const URL_TAIL: &str = r#"(?:[/?#](?:\S*[^\s.,;:!?'")\]}>])?)?"#;

pub(crate) const EMAIL_PATTERN: &str =
    r"[A-Za-z0-9._%+\-]+@(?:[A-Za-z0-9](?:[A-Za-z0-9\-]*[A-Za-z0-9])?\.)+[A-Za-z]{2,}(?-u:\b)";

pub(crate) static ONION_PATTERN: LazyLock<String> = LazyLock::new(|| {
    format!(
        r"(?i)(?:[a-z][a-z0-9+.\-]*://)?(?:[^\s/@:]+(?::[^\s/@]*)?@)?(?:[a-z0-9\-]+\.)*(?-u:\b)(?:[a-z2-7]{{56}}|[a-z2-7]{{16}})\.onion(?-u:\b)(?::[0-9]{{1,5}})?{URL_TAIL}"
    )
});

pub(crate) static NORMAL_URL_PATTERN: LazyLock<String> = LazyLock::new(|| {
    let domain = r"(?:[a-z0-9](?:[a-z0-9\-]*[a-z0-9])?\.)+[a-z]{2,}(?-u:\b)";
    format!(
        r"(?i)(?:https?://(?:[^\s/@:]+(?::[^\s/@]*)?@)?(?P<host>{domain}|[0-9]{{1,3}}(?:\.[0-9]{{1,3}}){{3}}|\[[0-9a-f:.]+\])|www\.(?P<whost>{domain}))(?::[0-9]{{1,5}})?{URL_TAIL}"
    )
});

const OCTET: &str = r"(?:25[0-5]|2[0-4][0-9]|1[0-9]{2}|[1-9]?[0-9])";

pub(crate) static IPV4_PATTERN: LazyLock<String> =
    LazyLock::new(|| format!(r"{OCTET}(?:\.{OCTET}){{3}}"));

pub(crate) const IPV6_CANDIDATE_PATTERN: &str = r"[0-9A-Fa-f:.]+(?:%[0-9A-Za-z_.\-]+)?";

const BASE58: &str = "[1-9A-HJ-NP-Za-km-z]";
const BECH32: &str = "[ac-hj-np-z02-9]";

pub(crate) static BTC_PATTERN: LazyLock<String> = LazyLock::new(|| {
    format!(r"(?-u:\b)(?:[13]{BASE58}{{25,34}}|bc1{BECH32}{{11,71}})(?-u:\b)")
});

pub(crate) const ETH_PATTERN: &str = r"(?-u:\b)0[xX][0-9A-Fa-f]{40}(?-u:\b)";

pub(crate) static LTC_PATTERN: LazyLock<String> = LazyLock::new(|| {
    format!(r"(?-u:\b)(?:[LM]{BASE58}{{25,33}}|ltc1{BECH32}{{11,71}})(?-u:\b)")
});

static EMAIL_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(EMAIL_PATTERN).unwrap());
static ONION_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(&ONION_PATTERN).unwrap());
static NORMAL_URL_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(&NORMAL_URL_PATTERN).unwrap());
static IPV4_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(&IPV4_PATTERN).unwrap());
static IPV6_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(IPV6_CANDIDATE_PATTERN).unwrap());
static BTC_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(&BTC_PATTERN).unwrap());
static ETH_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(ETH_PATTERN).unwrap());
static LTC_RE: LazyLock<Regex> = LazyLock::new(|| Regex::new(&LTC_PATTERN).unwrap());

fn plain(re: &Regex, text: &str) -> Vec<Range<usize>> {
    re.find_iter(text).map(|m| m.range()).collect()
}

pub(crate) fn find_emails(text: &str) -> Vec<Range<usize>> {
    if !text.contains('@') {
        return Vec::new();
    }
    plain(&EMAIL_RE, text)
}

pub(crate) fn find_onion_urls(text: &str) -> Vec<Range<usize>> {
    if !contains_ignore_ascii_case(text, ".onion") {
        return Vec::new();
    }
    plain(&ONION_RE, text)
}

pub(crate) fn find_normal_urls(text: &str) -> Vec<Range<usize>> {
    let mut out = Vec::new();
    let mut at = 0;
    while at <= text.len() {
        let Some(caps) = NORMAL_URL_RE.captures_at(text, at) else { break };
        let whole = caps.get(0).unwrap();
        let host = caps
            .name("host")
            .or_else(|| caps.name("whost"))
            .map(|m| m.as_str())
            .unwrap_or("");
        // Hosts under .onion belong to the onion rule, even malformed ones.
        if !ends_with_ignore_ascii_case(host, ".onion") {
            out.push(whole.range());
        }
        at = next_search_start(text, whole.range());
    }
    out
}

pub(crate) fn find_ip_addresses(text: &str) -> Vec<Range<usize>> {
    let mut v6 = if text.contains(':') { find_ipv6(text) } else { Vec::new() };
    let v4 = find_ipv4(text);
    if v6.is_empty() {
        return v4;
    }
    // IPv4 matches inside an IPv6 match (mapped addresses) are already covered.
    let extra: Vec<_> = v4
        .into_iter()
        .filter(|r| !v6.iter().any(|o| o.start < r.end && r.start < o.end))
        .collect();
    v6.extend(extra);
    v6.sort_by_key(|r| r.start);
    v6
}

fn find_ipv4(text: &str) -> Vec<Range<usize>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    let mut at = 0;
    while let Some(m) = IPV4_RE.find_at(text, at) {
        let r = m.range();
        let before_digit = r.start > 0 && bytes[r.start - 1].is_ascii_digit();
        let after_digit = r.end < bytes.len() && bytes[r.end].is_ascii_digit();
        if !before_digit && !after_digit {
            out.push(r.clone());
            at = r.end;
        } else {
            // Matches start on an ASCII digit, so one byte is one character.
            at = r.start + 1;
        }
    }
    out
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_'
}

fn find_ipv6(text: &str) -> Vec<Range<usize>> {
    let bytes = text.as_bytes();
    let mut out = Vec::new();
    for m in IPV6_RE.find_iter(text) {
        if let Some(r) = validate_ipv6_candidate(text, m.range()) {
            let before_ok = r.start == 0 || !is_word_byte(bytes[r.start - 1]);
            let after_ok = r.end == bytes.len() || !is_word_byte(bytes[r.end]);
            if before_ok && after_ok {
                out.push(r);
            }
        }
    }
    out
}

/// Trims a raw candidate (hex digits, colons, dots, optional zone) to the
/// IPv6 address it contains, if any.
fn validate_ipv6_candidate(text: &str, range: Range<usize>) -> Option<Range<usize>> {
    let cand = &text[range.clone()];
    let (addr, zone) = match cand.find('%') {
        Some(p) => (&cand[..p], Some(&cand[p + 1..])),
        None => (cand, None),
    };
    let mut start = range.start;
    let mut addr = addr;
    // A lone leading colon is punctuation ("port:fe80::1"), not part of the address.
    if addr.starts_with(':') && !addr.starts_with("::") {
        addr = &addr[1..];
        start += 1;
    }
    let zone = zone.map(|z| z.trim_end_matches('.')).filter(|z| !z.is_empty());
    if zone.is_none() {
        addr = addr.trim_end_matches('.');
        if addr.ends_with(':') && !addr.ends_with("::") {
            addr = &addr[..addr.len() - 1];
        }
    }
    if addr.bytes().filter(|&b| b == b':').count() < 2 || !addr.bytes().any(|b| b.is_ascii_hexdigit()) {
        return None;
    }
    addr.parse::<Ipv6Addr>().ok()?;
    let end = match zone {
        Some(z) => start + addr.len() + 1 + z.len(),
        None => start + addr.len(),
    };
    Some(start..end)
}

pub(crate) fn find_btc_addresses(text: &str) -> Vec<Range<usize>> {
    plain(&BTC_RE, text)
}

pub(crate) fn find_eth_addresses(text: &str) -> Vec<Range<usize>> {
    if !text.contains("0x") && !text.contains("0X") {
        return Vec::new();
    }
    plain(&ETH_RE, text)
}

pub(crate) fn find_ltc_addresses(text: &str) -> Vec<Range<usize>> {
    plain(&LTC_RE, text)
}

fn next_search_start(text: &str, r: Range<usize>) -> usize {
    if r.end > r.start {
        r.end
    } else {
        r.end + text[r.end..].chars().next().map_or(1, char::len_utf8)
    }
}

fn contains_ignore_ascii_case(haystack: &str, needle: &str) -> bool {
    let n = needle.as_bytes();
    haystack.as_bytes().windows(n.len()).any(|w| w.eq_ignore_ascii_case(n))
}

fn ends_with_ignore_ascii_case(s: &str, suffix: &str) -> bool {
    s.len() >= suffix.len() && s.as_bytes()[s.len() - suffix.len()..].eq_ignore_ascii_case(suffix.as_bytes())
}
