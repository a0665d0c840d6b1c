//! Character-level cleanup: lengthy words, uncommon characters, whitespace.

use std::borrow::Cow;

/// Words of this many characters or more are masked as lengthy words.
pub const LONGWORD_MIN_CHARS: usize = 38;

/// Highest scalar value kept by [`remove_uncommon_chars`] (end of Latin-1 Supplement).
pub const MAX_COMMON_CHAR: char = '\u{FF}';

/// Collapses every maximal whitespace run into a single space and trims both ends.
pub fn normalize_whitespace(text: &str) -> String {
    normalize_whitespace_counted(text).0.into_owned()
}

/// Same as [`normalize_whitespace`], also returning how many whitespace runs changed.
pub(crate) fn normalize_whitespace_counted(text: &str) -> (Cow<'_, str>, u64) {
    let mut changed = 0u64;
    let mut out = String::new();
    let mut dirty = false;
    let mut last_end = 0;
    let mut run_start: Option<usize> = None;

    // Walks whitespace runs; only allocates once the first run needs rewriting.
    let flush_run = |start: usize, end: usize, out: &mut String, dirty: &mut bool, last_end: &mut usize, changed: &mut u64| {
        let run = &text[start..end];
        let at_edge = start == 0 || end == text.len();
        let replacement = if at_edge { "" } else { " " };
        if run != replacement {
            *changed += 1;
            if !*dirty {
                out.reserve(text.len());
                *dirty = true;
            }
            out.push_str(&text[*last_end..start]);
            out.push_str(replacement);
            *last_end = end;
        }
    };

    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if run_start.is_none() {
                run_start = Some(i);
            }
        } else if let Some(start) = run_start.take() {
            flush_run(start, i, &mut out, &mut dirty, &mut last_end, &mut changed);
        }
    }
    if let Some(start) = run_start {
        flush_run(start, text.len(), &mut out, &mut dirty, &mut last_end, &mut changed);
    }

    if dirty {
        out.push_str(&text[last_end..]);
        (Cow::Owned(out), changed)
    } else {
        (Cow::Borrowed(text), 0)
    }
}

/// Deletes every character above U+00FF, returning the cleaned text and the
/// number of characters removed.
pub fn remove_uncommon_chars(text: &str) -> (String, usize) {
    let (cleaned, removed) = remove_uncommon_cow(text);
    (cleaned.into_owned(), removed)
}

pub(crate) fn remove_uncommon_cow(text: &str) -> (Cow<'_, str>, usize) {
    // Everything at or below U+00FF encodes in at most two UTF-8 bytes, and
    // pure ASCII needs no scan at all.
    if text.is_ascii() {
        return (Cow::Borrowed(text), 0);
    }
    let mut removed = 0;
    let cleaned: String = text
        .chars()
        .filter(|&c| {
            let keep = c <= MAX_COMMON_CHAR;
            if !keep {
                removed += 1;
            }
            keep
        })
        .collect();
    if removed == 0 {
        (Cow::Borrowed(text), 0)
    } else {
        (Cow::Owned(cleaned), removed)
    }
}

/// Replaces each maximal non-whitespace run of at least [`LONGWORD_MIN_CHARS`]
/// characters with `token`. Returns the new text, replacement count and the
/// number of bytes the replacements added (never positive in practice, kept
/// for the report's uniform accounting).
pub(crate) fn mask_long_words<'a>(text: &'a str, token: &str) -> (Cow<'a, str>, u64, u64) {
    let mut out: Option<String> = None;
    let mut last_end = 0;
    let mut count = 0u64;
    let mut inflation = 0u64;

    let mut word_start: Option<usize> = None;
    let mut word_chars = 0usize;
    let mut handle = |start: usize, end: usize, chars: usize, out: &mut Option<String>, last_end: &mut usize| {
        if chars >= LONGWORD_MIN_CHARS {
            let buf = out.get_or_insert_with(|| String::with_capacity(text.len()));
            buf.push_str(&text[*last_end..start]);
            buf.push_str(token);
            *last_end = end;
            count += 1;
            inflation += (token.len() as u64).saturating_sub((end - start) as u64);
        }
    };

    for (i, c) in text.char_indices() {
        if c.is_whitespace() {
            if let Some(start) = word_start.take() {
                handle(start, i, word_chars, &mut out, &mut last_end);
            }
        } else {
            if word_start.is_none() {
                word_start = Some(i);
                word_chars = 0;
            }
            word_chars += 1;
        }
    }
    if let Some(start) = word_start {
        handle(start, text.len(), word_chars, &mut out, &mut last_end);
    }

    match out {
        Some(mut buf) => {
            buf.push_str(&text[last_end..]);
            (Cow::Owned(buf), count, inflation)
        }
        None => (Cow::Borrowed(text), 0, 0),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whitespace_examples() {
        assert_eq!(normalize_whitespace("a\n\t b"), "a b");
        assert_eq!(normalize_whitespace("  x  "), "x");
        assert_eq!(normalize_whitespace(""), "");
        assert_eq!(normalize_whitespace("   "), "");
        assert_eq!(normalize_whitespace("a\u{00A0}\u{2003}b"), "a b");
    }

    #[test]
    fn whitespace_counts_only_changed_runs() {
        let (out, changed) = normalize_whitespace_counted("a b  c\nd ");
        assert_eq!(out, "a b c d");
        assert_eq!(changed, 3);
        let (out, changed) = normalize_whitespace_counted("a b c");
        assert!(matches!(out, Cow::Borrowed(_)));
        assert_eq!(changed, 0);
    }

    #[test]
    fn uncommon_examples() {
        assert_eq!(remove_uncommon_chars("héllo"), ("héllo".to_string(), 0));
        assert_eq!(remove_uncommon_chars("hi✓there"), ("hithere".to_string(), 1));
        assert_eq!(remove_uncommon_chars("日本語"), (String::new(), 3));
        assert_eq!(remove_uncommon_chars("\u{FF}\u{100}"), ("\u{FF}".to_string(), 1));
    }

    #[test]
    fn long_word_boundary() {
        let a38 = "a".repeat(38);
        let a37 = "a".repeat(37);
        let (out, n, _) = mask_long_words(&a38, "ID_LONGWORD");
        assert_eq!((out.as_ref(), n), ("ID_LONGWORD", 1));
        let (out, n, _) = mask_long_words(&a37, "ID_LONGWORD");
        assert_eq!((out.as_ref(), n), (a37.as_str(), 0));
        let text = format!("x {a38} y {a37}");
        let (out, n, _) = mask_long_words(&text, "ID_LONGWORD");
        assert_eq!(out, format!("x ID_LONGWORD y {a37}"));
        assert_eq!(n, 1);
    }

    #[test]
    fn long_word_counts_chars_not_bytes() {
        // 20 two-byte characters is 40 bytes but only 20 characters.
        let w = "é".repeat(20);
        let (out, n, _) = mask_long_words(&w, "ID_LONGWORD");
        assert_eq!((out.as_ref(), n), (w.as_str(), 0));
    }
}
