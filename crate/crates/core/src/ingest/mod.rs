//! Page ingestion: JSONL loading, HTML extraction and the language gate.

mod html;
mod lang;

use std::collections::HashSet;
use std::fs::File;
use std::io::{self, BufRead, BufReader};
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::mask::{normalize_whitespace, MaskReport};

pub use html::{decode_entities, extract_text};
pub use lang::{
    language_gate, language_scores, GateOutcome, GateTally, InvalidThreshold, LanguageMode, LanguagePolicy,
    LanguageScores, ENGLISH_STOPWORDS,
};

/// Where a record's `text` came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum TextOrigin {
    #[default]
    Text,
    Html,
}

/// One crawled page.
///
/// Serializes to the JSONL interchange format shared by every stage.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PageRecord {
    pub id: String,
    pub url: String,
    pub text: String,
    #[serde(rename = "lang", default, skip_serializing_if = "Option::is_none")]
    pub lang_label: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<String>,
    /// Unicode scalar values in `text`.
    pub char_count: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mask_report: Option<MaskReport>,
    #[serde(skip)]
    pub origin: TextOrigin,
}

impl PageRecord {
    /// Builds a record from already-extracted text, normalizing whitespace.
    pub fn from_text(id: impl Into<String>, url: impl Into<String>, text: &str) -> Self {
        let mut rec = PageRecord {
            id: id.into(),
            url: url.into(),
            text: String::new(),
            lang_label: None,
            category: None,
            char_count: 0,
            mask_report: None,
            origin: TextOrigin::Text,
        };
        rec.set_text(normalize_whitespace(text));
        rec
    }

    /// Builds a record from raw HTML; the text is `title body`.
    pub fn from_html(id: impl Into<String>, url: impl Into<String>, html: &str) -> Self {
        let (title, body) = extract_text(html);
        let joined = match (title.is_empty(), body.is_empty()) {
            (true, _) => body,
            (false, true) => title,
            (false, false) => format!("{title} {body}"),
        };
        let mut rec = Self::from_text(id, url, &joined);
        rec.origin = TextOrigin::Html;
        rec
    }

    /// Replaces the text and keeps `char_count` in sync. The text must
    /// already be whitespace-normalized.
    pub fn set_text(&mut self, text: String) {
        self.char_count = text.chars().count() as u64;
        self.text = text;
    }

    /// UTF-8 size of the text.
    pub fn byte_len(&self) -> u64 {
        self.text.len() as u64
    }
}

/// Shape of one input line.
#[derive(Debug, Deserialize)]
struct RawRecord {
    #[serde(default)]
    id: Option<serde_json::Value>,
    url: String,
    #[serde(default)]
    html: Option<String>,
    #[serde(default)]
    text: Option<String>,
    #[serde(default)]
    lang: Option<String>,
    #[serde(default)]
    category: Option<String>,
    #[serde(default)]
    mask_report: Option<MaskReport>,
}

/// A problem with one input line. Line numbers are 1-based.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LoadWarning {
    pub line: usize,
    pub message: String,
}

impl std::fmt::Display for LoadWarning {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "line {}: {}", self.line, self.message)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum IngestError {
    #[error("cannot read {path}: {source}")]
    Open { path: String, source: io::Error },
    #[error("read error at line {line}: {source}")]
    Read { line: usize, source: io::Error },
}

/// Streaming JSONL reader yielding [`PageRecord`]s in file order.
///
/// Malformed lines are skipped and recorded in [`PageReader::warnings`].
/// A read failure ends the stream and is reported by [`PageReader::error`].
pub struct PageReader<R> {
    lines: io::Lines<R>,
    line_no: usize,
    seen_ids: HashSet<String>,
    warnings: Vec<LoadWarning>,
    error: Option<IngestError>,
    lines_read: u64,
    bytes_read: u64,
}

impl<R: BufRead> PageReader<R> {
    pub fn new(reader: R) -> Self {
        Self {
            lines: reader.lines(),
            line_no: 0,
            seen_ids: HashSet::new(),
            warnings: Vec::new(),
            error: None,
            lines_read: 0,
            bytes_read: 0,
        }
    }

    pub fn warnings(&self) -> &[LoadWarning] {
        &self.warnings
    }

    pub fn take_error(&mut self) -> Option<IngestError> {
        self.error.take()
    }

    /// Non-blank lines consumed so far.
    pub fn lines_read(&self) -> u64 {
        self.lines_read
    }

    /// Bytes of the non-blank lines consumed so far, excluding newlines.
    pub fn bytes_read(&self) -> u64 {
        self.bytes_read
    }

    fn warn(&mut self, message: String) {
        log::warn!("line {}: {}", self.line_no, message);
        self.warnings.push(LoadWarning { line: self.line_no, message });
    }

    fn parse(&mut self, line: &str) -> Option<PageRecord> {
        let raw: RawRecord = match serde_json::from_str(line) {
            Ok(r) => r,
            Err(e) => {
                self.warn(format!("malformed record: {e}"));
                return None;
            }
        };
        let index = self.line_no - 1;
        let id = match raw.id {
            None | Some(serde_json::Value::Null) => index.to_string(),
            Some(serde_json::Value::String(s)) => s,
            Some(serde_json::Value::Number(n)) => n.to_string(),
            Some(other) => {
                self.warn(format!("id must be a string, got {other}"));
                return None;
            }
        };
        if self.seen_ids.contains(&id) {
            self.warn(format!("duplicate id {id:?}"));
            return None;
        }
        let mut rec = match (raw.text, raw.html) {
            (Some(text), html) => {
                if html.is_some() {
                    self.warn("record has both \"html\" and \"text\"; using \"text\"".to_string());
                }
                PageRecord::from_text(id.clone(), raw.url, &text)
            }
            (None, Some(html)) => PageRecord::from_html(id.clone(), raw.url, &html),
            (None, None) => {
                self.warn("record has neither \"html\" nor \"text\"".to_string());
                return None;
            }
        };
        rec.lang_label = raw.lang;
        rec.category = raw.category;
        rec.mask_report = raw.mask_report;
        self.seen_ids.insert(id);
        Some(rec)
    }
}

impl<R: BufRead> Iterator for PageReader<R> {
    type Item = PageRecord;

    fn next(&mut self) -> Option<PageRecord> {
        loop {
            let line = match self.lines.next()? {
                Ok(l) => l,
                Err(source) => {
                    self.error = Some(IngestError::Read { line: self.line_no + 1, source });
                    return None;
                }
            };
            self.line_no += 1;
            if line.trim().is_empty() {
                continue;
            }
            self.lines_read += 1;
            self.bytes_read += line.len() as u64;
            if let Some(rec) = self.parse(&line) {
                return Some(rec);
            }
        }
    }
}

/// Opens a JSONL file of pages. `-` reads standard input.
pub fn load_pages(path: &Path) -> Result<PageReader<Box<dyn BufRead>>, IngestError> {
    let reader: Box<dyn BufRead> = if path.as_os_str() == "-" {
        Box::new(BufReader::new(io::stdin()))
    } else {
        let file = File::open(path).map_err(|source| IngestError::Open { path: path.display().to_string(), source })?;
        Box::new(BufReader::with_capacity(1 << 20, file))
    };
    Ok(PageReader::new(reader))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn read(input: &str) -> (Vec<PageRecord>, Vec<LoadWarning>) {
        let mut reader = PageReader::new(input.as_bytes());
        let pages: Vec<_> = reader.by_ref().collect();
        (pages, reader.warnings().to_vec())
    }

    #[test]
    fn three_valid_lines_in_order() {
        let (pages, warnings) = read(
            "{\"url\":\"a\",\"text\":\"one\"}\n{\"url\":\"b\",\"text\":\"two\"}\n{\"id\":\"x\",\"url\":\"c\",\"text\":\"three\"}\n",
        );
        assert!(warnings.is_empty());
        let ids: Vec<_> = pages.iter().map(|p| p.id.as_str()).collect();
        assert_eq!(ids, ["0", "1", "x"]);
        assert_eq!(pages[2].text, "three");
    }

    #[test]
    fn malformed_line_is_skipped_with_warning() {
        let (pages, warnings) = read("{\"url\":\"a\",\"text\":\"one\"}\n{not json\n{\"url\":\"c\",\"text\":\"three\"}\n");
        assert_eq!(pages.len(), 2);
        assert_eq!(warnings.len(), 1);
        assert_eq!(warnings[0].line, 2);
        assert_eq!(pages[1].id, "2");
    }

    #[test]
    fn text_wins_over_html() {
        let (pages, warnings) = read("{\"url\":\"a\",\"html\":\"<b>html</b>\",\"text\":\"plain\"}\n");
        assert_eq!(pages[0].text, "plain");
        assert_eq!(pages[0].origin, TextOrigin::Text);
        assert_eq!(warnings.len(), 1);
        assert!(warnings[0].message.contains("both"));
    }

    #[test]
    fn html_is_extracted_and_joined() {
        let (pages, _) = read(
            "{\"url\":\"a\",\"html\":\"<title>T</title><body>hello <i>world</i></body>\",\"lang\":\"en\",\"category\":\"Drugs\"}\n",
        );
        let p = &pages[0];
        assert_eq!(p.text, "T hello world");
        assert_eq!(p.char_count, 13);
        assert_eq!(p.origin, TextOrigin::Html);
        assert_eq!(p.lang_label.as_deref(), Some("en"));
        assert_eq!(p.category.as_deref(), Some("Drugs"));
    }

    #[test]
    fn duplicate_ids_are_dropped() {
        let (pages, warnings) = read("{\"id\":\"1\",\"url\":\"a\",\"text\":\"x\"}\n{\"url\":\"b\",\"text\":\"y\"}\n");
        // The second line's index id "1" collides with the explicit one.
        assert_eq!(pages.len(), 1);
        assert_eq!(warnings[0].line, 2);
    }

    #[test]
    fn char_count_tracks_normalized_text() {
        let p = PageRecord::from_text("a", "", "  héllo \n wörld ");
        assert_eq!(p.text, "héllo wörld");
        assert_eq!(p.char_count, 11);
        assert_eq!(p.byte_len(), 13);
    }

    #[test]
    fn blank_lines_are_ignored_and_numbers_kept() {
        let mut reader = PageReader::new("\n{\"url\":\"a\",\"text\":\"x\"}\n\n{bad\n".as_bytes());
        let pages: Vec<_> = reader.by_ref().collect();
        assert_eq!(pages[0].id, "1");
        assert_eq!(reader.warnings()[0].line, 4);
        assert_eq!(reader.lines_read(), 2);
    }

    #[test]
    fn missing_file_is_fatal() {
        assert!(matches!(load_pages(Path::new("/nonexistent/pages.jsonl")), Err(IngestError::Open { .. })));
    }

    #[test]
    fn round_trips_through_interchange_format() {
        let mut p = PageRecord::from_text("7", "http://x", "some text");
        p.category = Some("Gambling".into());
        let line = serde_json::to_string(&p).unwrap();
        let (back, warnings) = read(&line);
        assert!(warnings.is_empty());
        assert_eq!(back[0], p);
    }
}
