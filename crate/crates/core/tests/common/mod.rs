//! Synthetic page generators shared by the integration tests.
#![allow(dead_code)]

use std::fs::File;
use std::io::{BufWriter, Write};
use std::path::Path;

use rand::seq::IndexedRandom;
use rand::{Rng, RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde_json::json;

pub const CATEGORIES: [&str; 9] = [
    "Arms/Weapons",
    "Cryptocurrency",
    "Drugs",
    "Electronics",
    "Financial",
    "Gambling",
    "Hacking",
    "Pornography",
    "Violence",
];

/// Relative category weights, deliberately skewed.
const WEIGHTS: [u32; 9] = [3, 20, 5, 14, 4, 9, 12, 28, 5];

const BASE58: &[u8] = b"123456789ABCDEFGHJKLMNPQRSTUVWXYZabcdefghijkmnopqrstuvwxyz";
const BASE32: &[u8] = b"abcdefghijklmnopqrstuvwxyz234567";
const HEX: &[u8] = b"0123456789abcdef";

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn pick_from(rng: &mut ChaCha8Rng, alphabet: &[u8], len: usize) -> String {
    (0..len).map(|_| alphabet[rng.random_range(0..alphabet.len())] as char).collect()
}

pub fn btc_address(rng: &mut ChaCha8Rng) -> String {
    let len = rng.random_range(25..=34);
    format!("1{}", pick_from(rng, BASE58, len))
}

pub fn eth_address(rng: &mut ChaCha8Rng) -> String {
    format!("0x{}", pick_from(rng, HEX, 40))
}

pub fn onion_v3(rng: &mut ChaCha8Rng) -> String {
    format!("http://{}.onion/", pick_from(rng, BASE32, 56))
}

pub fn ipv4(rng: &mut ChaCha8Rng) -> String {
    let o: Vec<String> = (0..4).map(|_| rng.random_range(0..=255u32).to_string()).collect();
    o.join(".")
}

pub fn email(rng: &mut ChaCha8Rng) -> String {
    let (ul, hl) = (rng.random_range(3..10), rng.random_range(3..10));
    let user = pick_from(rng, b"abcdefghijklmnopqrstuvwxyz", ul);
    let host = pick_from(rng, b"abcdefghijklmnopqrstuvwxyz", hl);
    format!("{user}@{host}.com")
}

pub fn weighted_category(rng: &mut ChaCha8Rng) -> &'static str {
    let total: u32 = WEIGHTS.iter().sum();
    let mut x = rng.random_range(0..total);
    for (c, w) in CATEGORIES.iter().zip(WEIGHTS) {
        if x < w {
            return c;
        }
        x -= w;
    }
    unreachable!()
}

/// Deterministic line generator for synthetic crawl dumps.
pub struct SynthCorpus {
    rng: ChaCha8Rng,
    vocab: Vec<String>,
    recent: Vec<(String, &'static str)>,
    next_id: u64,
    pub html_rate: f64,
    pub dup_rate: f64,
    pub identifier_rate: f64,
}

impl SynthCorpus {
    pub fn new(seed: u64) -> Self {
        let mut rng = rng(seed);
        let vocab = (0..4000)
            .map(|_| {
                let len = rng.random_range(2..10);
                pick_from(&mut rng, b"abcdefghijklmnopqrstuvwxyz", len)
            })
            .chain(["the", "and", "of", "to", "in", "is", "for", "with"].map(String::from))
            .collect();
        Self { rng, vocab, recent: Vec::new(), next_id: 0, html_rate: 0.1, dup_rate: 0.08, identifier_rate: 0.3 }
    }

    pub fn text(&mut self, words: usize) -> String {
        let mut out = String::with_capacity(words * 7);
        for i in 0..words {
            if i > 0 {
                out.push(if i % 17 == 0 { '\n' } else { ' ' });
            }
            let w = &self.vocab[self.rng.random_range(0..self.vocab.len())];
            out.push_str(w);
        }
        if self.rng.random_bool(self.identifier_rate) {
            for _ in 0..self.rng.random_range(1..4) {
                let ident = match self.rng.random_range(0..7) {
                    0 => email(&mut self.rng),
                    1 => onion_v3(&mut self.rng),
                    2 => format!("https://www.{}.com/page", pick_from(&mut self.rng, b"abcdefgh", 6)),
                    3 => ipv4(&mut self.rng),
                    4 => btc_address(&mut self.rng),
                    5 => eth_address(&mut self.rng),
                    _ => "caf\u{e9} \u{65e5}\u{672c} \u{2713}".to_string(),
                };
                out.push(' ');
                out.push_str(&ident);
            }
        }
        out
    }

    fn word_count(&mut self) -> usize {
        match self.rng.random_range(0..100) {
            0..3 => self.rng.random_range(5..60),
            3..5 => self.rng.random_range(1800..2400),
            _ => self.rng.random_range(80..1400),
        }
    }

    /// One JSONL line (without the newline).
    pub fn next_line(&mut self) -> String {
        let id = format!("p{}", self.next_id);
        self.next_id += 1;
        let (text, category) = if !self.recent.is_empty() && self.rng.random_bool(self.dup_rate) {
            self.recent[self.rng.random_range(0..self.recent.len())].clone()
        } else {
            let n = self.word_count();
            let text = self.text(n);
            let category = weighted_category(&mut self.rng);
            if self.recent.len() < 512 {
                self.recent.push((text.clone(), category));
            } else {
                let slot = self.rng.random_range(0..512);
                self.recent[slot] = (text.clone(), category);
            }
            (text, category)
        };
        let lang = match self.rng.random_range(0..100) {
            0..3 => Some("ru"),
            3..5 => None,
            _ => Some("en"),
        };
        let url = format!("http://{}.onion/{id}", pick_from(&mut self.rng, BASE32, 16));
        let mut rec = json!({ "id": id, "url": url, "category": category });
        if let Some(l) = lang {
            rec["lang"] = json!(l);
        }
        if self.rng.random_bool(self.html_rate) {
            rec["html"] = json!(format!(
                "<html><head><title>{id}</title><script>var x = 1;</script></head><body><p>{}</p></body></html>",
                text.replace('&', "&amp;").replace('<', "&lt;")
            ));
        } else {
            rec["text"] = json!(text);
        }
        rec.to_string()
    }

    pub fn lines(&mut self, n: usize) -> Vec<String> {
        (0..n).map(|_| self.next_line()).collect()
    }
}

/// Writes synthetic JSONL until at least `target_bytes` have been written.
/// Returns (lines, bytes).
pub fn write_synthetic_jsonl(path: &Path, target_bytes: u64, seed: u64) -> std::io::Result<(u64, u64)> {
    let mut out = BufWriter::with_capacity(1 << 20, File::create(path)?);
    let mut gen = SynthCorpus::new(seed);
    let (mut lines, mut bytes) = (0u64, 0u64);
    while bytes < target_bytes {
        let line = gen.next_line();
        out.write_all(line.as_bytes())?;
        out.write_all(b"\n")?;
        bytes += line.len() as u64 + 1;
        lines += 1;
    }
    out.flush()?;
    Ok((lines, bytes))
}

/// Random text built from a mix of prose, identifiers, odd whitespace,
/// non-Latin characters and long runs: input for masking fuzz tests.
pub fn fuzz_text(rng: &mut ChaCha8Rng) -> String {
    const PIECES: [&str; 14] = [
        "hello", "world", "the", " ", "\t", "\n", "\u{a0}", "  ", "\u{2003}", "caf\u{e9}", "\u{43f}\u{440}\u{438}",
        "\u{1f600}", ".", ",",
    ];
    let mut out = String::new();
    for _ in 0..rng.random_range(0..60) {
        let piece = match rng.random_range(0..20) {
            0 => email(rng),
            1 => onion_v3(rng),
            2 => format!("www.{}.org", pick_from(rng, b"abcxyz", 5)),
            3 => ipv4(rng),
            4 => "fe80::1ff:fe23:4567:890a%eth2".to_string(),
            5 => btc_address(rng),
            6 => eth_address(rng),
            7 => {
                let len = rng.random_range(30..60);
                pick_from(rng, b"abcdefABCDEF0123456789+/=-_", len)
            }
            8 => {
                let len = rng.random_range(1..8);
                (0..len).map(|_| char::from_u32(rng.random_range(0x20..0x3000)).unwrap_or('?')).collect()
            }
            9 => "ID_EMAIL".to_string(),
            _ => PIECES.choose(rng).unwrap().to_string(),
        };
        out.push_str(&piece);
        if !rng.next_u32().is_multiple_of(3) {
            out.push(' ');
        }
    }
    out
}
