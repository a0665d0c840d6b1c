//! Corpus assembly and the run manifest.

use std::fmt;
use std::fs;
use std::io::{self, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::mask::MaskReport;
use crate::stats::ReductionReport;

pub const DEFAULT_SEPARATOR: &str = "</s>";

/// Stage names in pipeline order.
pub const PIPELINE_ORDER: [&str; 7] = ["ingest", "language_gate", "density_filter", "mask", "dedup", "balance", "emit"];

/// Simple (one-to-one) Unicode lowercase of every character.
pub fn case_fold(text: &str) -> String {
    if text.is_ascii() {
        return text.to_ascii_lowercase();
    }
    text.chars().map(fold_char).collect()
}

fn fold_char(c: char) -> char {
    // U+0130 is the only character whose full lowercase mapping is longer
    // than one scalar; its simple mapping is plain 'i'.
    if c == '\u{130}' {
        return 'i';
    }
    let mut lower = c.to_lowercase();
    match (lower.next(), lower.next()) {
        (Some(l), None) => l,
        _ => c,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum TextVariant {
    Raw,
    #[default]
    Preprocessed,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CaseVariant {
    #[default]
    Cased,
    Uncased,
}

#[derive(Debug, thiserror::Error, PartialEq, Eq)]
#[error("unknown variant {0:?}")]
pub struct UnknownVariant(pub String);

impl FromStr for TextVariant {
    type Err = UnknownVariant;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "raw" => Ok(Self::Raw),
            "preprocessed" => Ok(Self::Preprocessed),
            _ => Err(UnknownVariant(s.to_string())),
        }
    }
}

impl FromStr for CaseVariant {
    type Err = UnknownVariant;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "cased" => Ok(Self::Cased),
            "uncased" => Ok(Self::Uncased),
            _ => Err(UnknownVariant(s.to_string())),
        }
    }
}

impl fmt::Display for TextVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Raw => "raw",
            Self::Preprocessed => "preprocessed",
        })
    }
}

impl fmt::Display for CaseVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Self::Cased => "cased",
            Self::Uncased => "uncased",
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct Variant {
    pub text: TextVariant,
    pub case: CaseVariant,
}

#[derive(Debug, thiserror::Error)]
pub enum EmitError {
    #[error(
        "separator {0:?} cannot be used; it needs at least two characters, no space after the first, \
         and no prefix that is also a suffix"
    )]
    BadSeparator(String),
    #[error("separator keeps reappearing in page {id:?} after escaping")]
    Unescapable { id: String },
    #[error("write failed: {0}")]
    Io(#[from] io::Error),
    #[error("invalid manifest: {0}")]
    Invalid(String),
}

/// Escaped form of a separator: a space injected after its first character.
fn escaped_separator(separator: &str) -> Result<String, EmitError> {
    let mut chars = separator.chars();
    let first = chars.next().ok_or_else(|| EmitError::BadSeparator(separator.to_string()))?;
    let rest = chars.as_str();
    // A separator that overlaps itself ("==", "abab") makes splitting ambiguous
    // when a page ends with part of it.
    let bordered = (1..separator.len()).any(|i| separator.is_char_boundary(i) && separator.ends_with(&separator[..i]));
    if rest.is_empty() || rest.starts_with(char::is_whitespace) || bordered {
        return Err(EmitError::BadSeparator(separator.to_string()));
    }
    Ok(format!("{first} {rest}"))
}

/// Counters for one emission.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct EmitStats {
    pub pages: u64,
    pub bytes_in: u64,
    pub bytes_out: u64,
    pub separator_escapes: u64,
    /// Bytes added by separators, escapes and case folding.
    pub overhead_bytes: u64,
}

/// Where one page landed in the corpus.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Placement {
    pub offset: u64,
    pub len: u64,
    pub escapes: u64,
}

/// Streaming corpus writer: pages are written in the order pushed, with the
/// separator between consecutive pages and none at the end.
pub struct CorpusWriter<W: Write> {
    out: W,
    separator: String,
    escaped: String,
    fold: bool,
    stats: EmitStats,
}

impl<W: Write> CorpusWriter<W> {
    pub fn new(out: W, separator: &str, case: CaseVariant) -> Result<Self, EmitError> {
        let escaped = escaped_separator(separator)?;
        Ok(Self {
            out,
            separator: separator.to_string(),
            escaped,
            fold: case == CaseVariant::Uncased,
            stats: EmitStats::default(),
        })
    }

    pub fn push(&mut self, id: &str, text: &str) -> Result<Placement, EmitError> {
        let mut body = if self.fold { case_fold(text) } else { text.to_string() };
        let mut escapes = 0u64;
        let mut rounds = 0;
        while body.contains(&self.separator) {
            rounds += 1;
            if rounds > 64 {
                return Err(EmitError::Unescapable { id: id.to_string() });
            }
            escapes += body.matches(&self.separator).count() as u64;
            body = body.replace(&self.separator, &self.escaped);
        }
        if self.stats.pages > 0 {
            self.out.write_all(self.separator.as_bytes())?;
            self.stats.bytes_out += self.separator.len() as u64;
        }
        let offset = self.stats.bytes_out;
        self.out.write_all(body.as_bytes())?;
        self.stats.pages += 1;
        self.stats.bytes_in += text.len() as u64;
        self.stats.bytes_out += body.len() as u64;
        self.stats.separator_escapes += escapes;
        self.stats.overhead_bytes = self.stats.bytes_out.saturating_sub(self.stats.bytes_in);
        Ok(Placement { offset, len: body.len() as u64, escapes })
    }

    pub fn stats(&self) -> EmitStats {
        self.stats
    }

    pub fn finish(mut self) -> Result<(W, EmitStats), EmitError> {
        if self.stats.pages == 0 {
            log::warn!("no pages to emit; corpus is empty");
        }
        self.out.flush()?;
        Ok((self.out, self.stats))
    }
}

/// Joins page texts with `separator` between pages.
pub fn emit_corpus<I, S>(pages: I, separator: &str) -> Result<(String, EmitStats), EmitError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    emit_corpus_with(pages, separator, CaseVariant::Cased)
}

pub fn emit_corpus_with<I, S>(pages: I, separator: &str, case: CaseVariant) -> Result<(String, EmitStats), EmitError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut w = CorpusWriter::new(Vec::new(), separator, case)?;
    for (i, p) in pages.into_iter().enumerate() {
        w.push(&i.to_string(), p.as_ref())?;
    }
    let (buf, stats) = w.finish()?;
    Ok((String::from_utf8(buf).expect("pages are valid UTF-8"), stats))
}

/// One executed stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StageRecord {
    pub stage: String,
    pub pages_in: u64,
    pub pages_out: u64,
    pub bytes_in: u64,
    pub bytes_out: u64,
    /// Bytes this stage may legitimately add (token inflation, separators).
    #[serde(default)]
    pub allowance_bytes: u64,
    #[serde(default)]
    pub parameters: serde_json::Value,
    #[serde(default)]
    pub seed: Option<u64>,
}

impl StageRecord {
    pub fn new(stage: &str, pages_in: u64, pages_out: u64, bytes_in: u64, bytes_out: u64) -> Self {
        Self {
            stage: stage.to_string(),
            pages_in,
            pages_out,
            bytes_in,
            bytes_out,
            allowance_bytes: 0,
            parameters: serde_json::Value::Object(Default::default()),
            seed: None,
        }
    }

    pub fn with_parameters(mut self, parameters: serde_json::Value) -> Self {
        self.parameters = parameters;
        self
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.seed = Some(seed);
        self
    }

    pub fn with_allowance(mut self, bytes: u64) -> Self {
        self.allowance_bytes = bytes;
        self
    }
}

/// Everything needed to reproduce and audit a run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CorpusManifest {
    pub tool_version: String,
    pub variant: Variant,
    pub config: serde_json::Value,
    pub stages: Vec<StageRecord>,
    pub reduction: Option<ReductionReport>,
    pub mask_totals: Option<MaskReport>,
    pub dedup_removed: u64,
    pub separator: String,
    pub separator_escapes: u64,
}

impl CorpusManifest {
    pub fn new(variant: Variant, config: serde_json::Value, separator: &str) -> Self {
        Self {
            tool_version: env!("CARGO_PKG_VERSION").to_string(),
            variant,
            config,
            stages: Vec::new(),
            reduction: None,
            mask_totals: None,
            dedup_removed: 0,
            separator: separator.to_string(),
            separator_escapes: 0,
        }
    }

    pub fn stage(&self, name: &str) -> Option<&StageRecord> {
        self.stages.iter().find(|s| s.stage == name)
    }

    pub fn stage_names(&self) -> Vec<&str> {
        self.stages.iter().map(|s| s.stage.as_str()).collect()
    }

    /// Checks stage order and per-stage monotonicity.
    pub fn validate(&self) -> Result<(), EmitError> {
        validate_stages(&self.stages)
    }

    /// Canonical JSON: sorted keys, two-space indent, trailing newline.
    pub fn to_canonical_json(&self) -> Result<String, EmitError> {
        let value = serde_json::to_value(self).map_err(|e| EmitError::Invalid(e.to_string()))?;
        let mut s = serde_json::to_string_pretty(&value).map_err(|e| EmitError::Invalid(e.to_string()))?;
        s.push('\n');
        Ok(s)
    }
}

pub fn validate_stages(stages: &[StageRecord]) -> Result<(), EmitError> {
    let mut last: Option<usize> = None;
    for s in stages {
        let pos = PIPELINE_ORDER
            .iter()
            .position(|&n| n == s.stage)
            .ok_or_else(|| EmitError::Invalid(format!("unknown stage {:?}", s.stage)))?;
        if last.is_some_and(|l| pos <= l) {
            return Err(EmitError::Invalid(format!("stage {:?} is out of pipeline order", s.stage)));
        }
        last = Some(pos);
        if s.pages_out > s.pages_in {
            return Err(EmitError::Invalid(format!(
                "stage {:?} has more pages out ({}) than in ({})",
                s.stage, s.pages_out, s.pages_in
            )));
        }
        if s.bytes_out > s.bytes_in + s.allowance_bytes {
            return Err(EmitError::Invalid(format!(
                "stage {:?} grows from {} to {} bytes (allowance {})",
                s.stage, s.bytes_in, s.bytes_out, s.allowance_bytes
            )));
        }
    }
    Ok(())
}

/// Validates and writes the manifest atomically (temp file then rename).
pub fn write_manifest(manifest: &CorpusManifest, path: &Path) -> Result<(), EmitError> {
    manifest.validate()?;
    let json = manifest.to_canonical_json()?;
    let tmp = path.with_extension("json.tmp");
    fs::write(&tmp, json)?;
    fs::rename(&tmp, path)?;
    Ok(())
}
