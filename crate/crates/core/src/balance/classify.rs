//! Page classifiers: the record's own label, a keyword baseline, or an
//! external process speaking one JSON object per line.

use std::collections::{BTreeMap, HashMap};
use std::fs;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::{Child, ChildStdin, ChildStdout, Command, Stdio};
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{Category, UnknownCategory};
use crate::ingest::PageRecord;

#[derive(Debug, thiserror::Error)]
pub enum ClassifyError {
    #[error("lexicon is empty")]
    EmptyLexicon,
    #[error("lexicon entry {0:?} is not a single word")]
    MultiWordEntry(String),
    #[error("lexicon: {0}")]
    LexiconCategory(#[from] UnknownCategory),
    #[error("cannot read lexicon {path}: {source}")]
    LexiconIo { path: String, source: std::io::Error },
    #[error("lexicon {path} is not a JSON map of category to word list: {source}")]
    LexiconFormat { path: String, source: serde_json::Error },
    #[error("classifier process: {0}")]
    Process(String),
    #[error("unknown classifier {0:?}; expected label, keyword or exec:<command>")]
    UnknownSpec(String),
}

/// Assigns exactly one category to every page.
pub trait PageClassifier {
    fn classify(&mut self, page: &PageRecord) -> Result<Category, ClassifyError>;

    /// Classifies a batch in order, writing the category name onto each page.
    fn classify_all(&mut self, pages: &mut [PageRecord]) -> Result<(), ClassifyError> {
        for page in pages.iter_mut() {
            page.category = Some(self.classify(page)?.name().to_string());
        }
        Ok(())
    }

    fn describe(&self) -> String;
}

/// Category fallback when a page gives no signal.
pub const DEFAULT_FALLBACK: Category = Category::Financial;

/// Uses the record's `category` field; missing or unrecognized labels map to
/// the fallback.
#[derive(Debug, Clone)]
pub struct LabelClassifier {
    pub fallback: Category,
    pub fallbacks_used: u64,
}

impl Default for LabelClassifier {
    fn default() -> Self {
        Self { fallback: DEFAULT_FALLBACK, fallbacks_used: 0 }
    }
}

impl PageClassifier for LabelClassifier {
    fn classify(&mut self, page: &PageRecord) -> Result<Category, ClassifyError> {
        match page.category.as_deref().map(Category::from_str) {
            Some(Ok(c)) => Ok(c),
            _ => {
                self.fallbacks_used += 1;
                Ok(self.fallback)
            }
        }
    }

    fn describe(&self) -> String {
        "label".to_string()
    }
}

/// Category → words, all lowercase single tokens.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Lexicon(pub BTreeMap<Category, Vec<String>>);

impl Lexicon {
    /// Reads a JSON object mapping category names to arrays of words.
    pub fn from_json_file(path: &Path) -> Result<Self, ClassifyError> {
        let data = fs::read_to_string(path)
            .map_err(|source| ClassifyError::LexiconIo { path: path.display().to_string(), source })?;
        let raw: BTreeMap<String, Vec<String>> = serde_json::from_str(&data)
            .map_err(|source| ClassifyError::LexiconFormat { path: path.display().to_string(), source })?;
        let mut map = BTreeMap::new();
        for (name, words) in raw {
            map.insert(name.parse::<Category>()?, words);
        }
        Ok(Lexicon(map))
    }
}

/// Built-in keyword lists, one short list per category.
pub fn default_lexicon() -> Lexicon {
    let entries: [(Category, &[&str]); 9] = [
        (Category::ArmsWeapons, &["gun", "guns", "rifle", "pistol", "ammo", "ammunition", "firearm", "firearms", "glock", "weapon", "weapons", "caliber"]),
        (Category::Cryptocurrency, &["bitcoin", "btc", "ethereum", "eth", "monero", "xmr", "litecoin", "wallet", "crypto", "blockchain", "mixer", "tumbler"]),
        (Category::Drugs, &["cocaine", "heroin", "mdma", "lsd", "cannabis", "weed", "meth", "pills", "opioid", "xanax", "ketamine", "grams"]),
        (Category::Electronics, &["iphone", "laptop", "samsung", "electronics", "console", "macbook", "tablet", "gadget", "camera", "headphones", "smartphone", "gpu"]),
        (Category::Financial, &["credit", "card", "cards", "cvv", "bank", "paypal", "transfer", "dumps", "fullz", "account", "counterfeit", "money"]),
        (Category::Gambling, &["casino", "poker", "betting", "bet", "bets", "roulette", "slots", "jackpot", "dice", "lottery", "wager", "odds"]),
        (Category::Hacking, &["hacking", "hack", "exploit", "malware", "ransomware", "ddos", "botnet", "phishing", "rat", "keylogger", "vulnerability", "payload"]),
        (Category::Pornography, &["porn", "xxx", "sex", "nude", "nudes", "adult", "erotic", "webcam", "cam", "naked", "explicit", "nsfw"]),
        (Category::Violence, &["kill", "murder", "hitman", "assassination", "violence", "torture", "gore", "attack", "bomb", "terror", "execution", "blood"]),
    ];
    Lexicon(entries.into_iter().map(|(c, ws)| (c, ws.iter().map(|w| w.to_string()).collect())).collect())
}

fn tokens(text: &str) -> impl Iterator<Item = &str> {
    text.split(|c: char| !c.is_alphanumeric()).filter(|t| !t.is_empty())
}

/// Counts lexicon hits per category and picks the highest; ties go to the
/// lexicographically smallest category name, zero hits to the fallback.
#[derive(Debug, Clone)]
pub struct KeywordClassifier {
    index: HashMap<String, Vec<Category>>,
    pub fallback: Category,
}

impl KeywordClassifier {
    pub fn new(lexicon: &Lexicon, fallback: Category) -> Result<Self, ClassifyError> {
        if lexicon.0.values().all(Vec::is_empty) {
            return Err(ClassifyError::EmptyLexicon);
        }
        let mut index: HashMap<String, Vec<Category>> = HashMap::new();
        for (&cat, words) in &lexicon.0 {
            for w in words {
                let w = w.to_lowercase();
                if tokens(&w).count() != 1 || tokens(&w).next() != Some(w.as_str()) {
                    return Err(ClassifyError::MultiWordEntry(w));
                }
                let cats = index.entry(w).or_default();
                if !cats.contains(&cat) {
                    cats.push(cat);
                }
            }
        }
        Ok(Self { index, fallback })
    }

    pub fn hits(&self, text: &str) -> BTreeMap<Category, u64> {
        let mut hits = BTreeMap::new();
        for t in tokens(text) {
            let lowered;
            let key = if t.chars().any(char::is_uppercase) {
                lowered = t.to_lowercase();
                lowered.as_str()
            } else {
                t
            };
            if let Some(cats) = self.index.get(key) {
                for &c in cats {
                    *hits.entry(c).or_insert(0) += 1;
                }
            }
        }
        hits
    }

    pub fn category_of(&self, text: &str) -> Category {
        // BTreeMap iterates in name order; strict '>' keeps the first of a tie.
        let mut best: Option<(Category, u64)> = None;
        for (c, n) in self.hits(text) {
            if best.is_none_or(|(_, m)| n > m) {
                best = Some((c, n));
            }
        }
        best.map_or(self.fallback, |(c, _)| c)
    }
}

impl PageClassifier for KeywordClassifier {
    fn classify(&mut self, page: &PageRecord) -> Result<Category, ClassifyError> {
        Ok(self.category_of(&page.text))
    }

    fn classify_all(&mut self, pages: &mut [PageRecord]) -> Result<(), ClassifyError> {
        let this = &*self;
        pages.par_iter_mut().for_each(|p| p.category = Some(this.category_of(&p.text).name().to_string()));
        Ok(())
    }

    fn describe(&self) -> String {
        "keyword".to_string()
    }
}

/// One-shot keyword classification with a fallback of [`DEFAULT_FALLBACK`].
pub fn keyword_classify(page: &PageRecord, lexicon: &Lexicon) -> Result<Category, ClassifyError> {
    Ok(KeywordClassifier::new(lexicon, DEFAULT_FALLBACK)?.category_of(&page.text))
}

#[derive(Serialize)]
struct ExecRequest<'a> {
    id: &'a str,
    text: &'a str,
}

#[derive(Deserialize)]
struct ExecResponse {
    category: String,
}

/// Runs `sh -c <command>` once and exchanges one JSON line per page:
/// requests are `{"id": ..., "text": ...}`, responses `{"category": ...}`.
pub struct ExecClassifier {
    command: String,
    child: Child,
    stdin: BufWriter<ChildStdin>,
    stdout: BufReader<ChildStdout>,
}

impl ExecClassifier {
    pub fn spawn(command: &str) -> Result<Self, ClassifyError> {
        let mut child = Command::new("sh")
            .arg("-c")
            .arg(command)
            .stdin(Stdio::piped())
            .stdout(Stdio::piped())
            .spawn()
            .map_err(|e| ClassifyError::Process(format!("cannot start {command:?}: {e}")))?;
        let stdin = BufWriter::new(child.stdin.take().expect("piped stdin"));
        let stdout = BufReader::new(child.stdout.take().expect("piped stdout"));
        Ok(Self { command: command.to_string(), child, stdin, stdout })
    }
}

impl PageClassifier for ExecClassifier {
    fn classify(&mut self, page: &PageRecord) -> Result<Category, ClassifyError> {
        let io_err = |e: std::io::Error| ClassifyError::Process(e.to_string());
        serde_json::to_writer(&mut self.stdin, &ExecRequest { id: &page.id, text: &page.text })
            .map_err(|e| ClassifyError::Process(e.to_string()))?;
        self.stdin.write_all(b"\n").map_err(io_err)?;
        self.stdin.flush().map_err(io_err)?;
        let mut line = String::new();
        if self.stdout.read_line(&mut line).map_err(io_err)? == 0 {
            return Err(ClassifyError::Process(format!("{:?} closed its output", self.command)));
        }
        let resp: ExecResponse = serde_json::from_str(line.trim())
            .map_err(|e| ClassifyError::Process(format!("bad response {:?}: {e}", line.trim())))?;
        resp.category.parse().map_err(|e: UnknownCategory| ClassifyError::Process(e.to_string()))
    }

    fn describe(&self) -> String {
        format!("exec:{}", self.command)
    }
}

impl Drop for ExecClassifier {
    fn drop(&mut self) {
        let _ = self.stdin.flush();
        let _ = self.child.kill();
        let _ = self.child.wait();
    }
}

/// Which classifier to build: `label`, `keyword` or `exec:<command>`.
#[derive(Debug, Clone, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(into = "String", try_from = "String")]
pub enum ClassifierSpec {
    #[default]
    Label,
    Keyword,
    Exec(String),
}

impl FromStr for ClassifierSpec {
    type Err = ClassifyError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "label" => Ok(ClassifierSpec::Label),
            "keyword" => Ok(ClassifierSpec::Keyword),
            _ => match s.strip_prefix("exec:") {
                Some(cmd) if !cmd.trim().is_empty() => Ok(ClassifierSpec::Exec(cmd.to_string())),
                _ => Err(ClassifyError::UnknownSpec(s.to_string())),
            },
        }
    }
}

impl From<ClassifierSpec> for String {
    fn from(spec: ClassifierSpec) -> String {
        match spec {
            ClassifierSpec::Label => "label".into(),
            ClassifierSpec::Keyword => "keyword".into(),
            ClassifierSpec::Exec(cmd) => format!("exec:{cmd}"),
        }
    }
}

impl TryFrom<String> for ClassifierSpec {
    type Error = ClassifyError;

    fn try_from(s: String) -> Result<Self, Self::Error> {
        s.parse()
    }
}

impl ClassifierSpec {
    pub fn build(&self, lexicon: Option<&Path>, fallback: Category) -> Result<Box<dyn PageClassifier>, ClassifyError> {
        Ok(match self {
            ClassifierSpec::Label => Box::new(LabelClassifier { fallback, fallbacks_used: 0 }),
            ClassifierSpec::Keyword => {
                let lex = match lexicon {
                    Some(path) => Lexicon::from_json_file(path)?,
                    None => default_lexicon(),
                };
                Box::new(KeywordClassifier::new(&lex, fallback)?)
            }
            ClassifierSpec::Exec(cmd) => Box::new(ExecClassifier::spawn(cmd)?),
        })
    }
}
