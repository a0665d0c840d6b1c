//! Tolerant HTML to text extraction.
//!
//! A single forward scan: text outside tags is kept, every tag becomes one
//! space, `script`/`style` bodies and comments are skipped, and the first
//! `<title>` is captured separately. Anything that does not parse as markup
//! is treated as text, so malformed input degrades to tag stripping.

use crate::mask::normalize_whitespace;

/// Latin-1 named character references, U+00A0 through U+00FF in order.
const LATIN1_ENTITIES: [&str; 96] = [
    "nbsp", "iexcl", "cent", "pound", "curren", "yen", "brvbar", "sect", "uml", "copy", "ordf", "laquo",
    "not", "shy", "reg", "macr", "deg", "plusmn", "sup2", "sup3", "acute", "micro", "para", "middot",
    "cedil", "sup1", "ordm", "raquo", "frac14", "frac12", "frac34", "iquest", "Agrave", "Aacute",
    "Acirc", "Atilde", "Auml", "Aring", "AElig", "Ccedil", "Egrave", "Eacute", "Ecirc", "Euml",
    "Igrave", "Iacute", "Icirc", "Iuml", "ETH", "Ntilde", "Ograve", "Oacute", "Ocirc", "Otilde",
    "Ouml", "times", "Oslash", "Ugrave", "Uacute", "Ucirc", "Uuml", "Yacute", "THORN", "szlig",
    "agrave", "aacute", "acirc", "atilde", "auml", "aring", "aelig", "ccedil", "egrave", "eacute",
    "ecirc", "euml", "igrave", "iacute", "icirc", "iuml", "eth", "ntilde", "ograve", "oacute", "ocirc",
    "otilde", "ouml", "divide", "oslash", "ugrave", "uacute", "ucirc", "uuml", "yacute", "thorn",
    "yuml",
];

fn named_entity(name: &str) -> Option<char> {
    match name {
        "quot" => Some('"'),
        "amp" => Some('&'),
        "apos" => Some('\''),
        "lt" => Some('<'),
        "gt" => Some('>'),
        _ => LATIN1_ENTITIES
            .iter()
            .position(|&n| n == name)
            .and_then(|i| char::from_u32(0xA0 + i as u32)),
    }
}

fn numeric_entity(body: &str) -> Option<char> {
    let value = if let Some(hex) = body.strip_prefix('x').or_else(|| body.strip_prefix('X')) {
        if hex.is_empty() || hex.len() > 6 {
            return None;
        }
        u32::from_str_radix(hex, 16).ok()?
    } else {
        if body.is_empty() || body.len() > 7 || !body.bytes().all(|b| b.is_ascii_digit()) {
            return None;
        }
        body.parse().ok()?
    };
    // NUL and anything above Latin-1 stay as literal text.
    if (1..=0xFF).contains(&value) {
        char::from_u32(value)
    } else {
        None
    }
}

/// Appends `text` to `out`, decoding character references whose target is
/// in U+0001..U+00FF. Unknown or out-of-range references are left verbatim.
pub fn decode_entities_into(text: &str, out: &mut String) {
    let mut rest = text;
    while let Some(amp) = rest.find('&') {
        out.push_str(&rest[..amp]);
        let after = &rest[amp + 1..];
        // References are short; a missing ';' within 10 bytes means literal '&'.
        let decoded = after
            .bytes()
            .take(10)
            .position(|b| b == b';')
            .and_then(|semi| {
                let body = &after[..semi];
                let c = match body.strip_prefix('#') {
                    Some(num) => numeric_entity(num),
                    None => named_entity(body),
                }?;
                Some((c, semi + 1))
            });
        match decoded {
            Some((c, consumed)) => {
                out.push(c);
                rest = &after[consumed..];
            }
            None => {
                out.push('&');
                rest = after;
            }
        }
    }
    out.push_str(rest);
}

pub fn decode_entities(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    decode_entities_into(text, &mut out);
    out
}

fn find_ignore_ascii_case(haystack: &str, from: usize, needle: &str) -> Option<usize> {
    let hay = &haystack.as_bytes()[from..];
    let n = needle.as_bytes();
    if hay.len() < n.len() {
        return None;
    }
    (0..=hay.len() - n.len()).find(|&i| hay[i..i + n.len()].eq_ignore_ascii_case(n)).map(|i| from + i)
}

/// Index just past the `>` closing a tag that starts at `start`, honoring
/// quoted attribute values. Falls back to the first `>` when a quote never
/// closes, and to the end of input when there is no `>` at all.
fn tag_end(html: &str, start: usize) -> usize {
    let bytes = html.as_bytes();
    let mut i = start;
    while i < bytes.len() {
        match bytes[i] {
            b'>' => return i + 1,
            q @ (b'"' | b'\'') => match bytes[i + 1..].iter().position(|&b| b == q) {
                Some(p) => i += p + 2,
                None => {
                    return bytes[start..].iter().position(|&b| b == b'>').map_or(bytes.len(), |p| start + p + 1);
                }
            },
            _ => i += 1,
        }
    }
    bytes.len()
}

/// Skips raw-text content up to and including `</name ...>`.
fn skip_raw_text(html: &str, from: usize, name: &str) -> (usize, usize) {
    let close = format!("</{name}");
    match find_ignore_ascii_case(html, from, &close) {
        Some(c) => (c, tag_end(html, c + close.len())),
        None => (html.len(), html.len()),
    }
}

/// Extracts the title and the visible body text of an HTML document.
///
/// Both strings are whitespace-normalized. Never fails: bytes that do not
/// form markup are kept as text.
pub fn extract_text(raw_html: &str) -> (String, String) {
    let html = raw_html;
    let bytes = html.as_bytes();
    let mut title: Option<String> = None;
    let mut body = String::with_capacity(html.len() / 2);
    let mut in_head = false;
    // An opening '<' with no '>' after it is text, not an unterminated tag.
    let last_gt = bytes.iter().rposition(|&b| b == b'>');
    let mut i = 0;

    while i < bytes.len() {
        let Some(off) = bytes[i..].iter().position(|&b| b == b'<') else {
            if !in_head {
                decode_entities_into(&html[i..], &mut body);
            }
            break;
        };
        let lt = i + off;
        if !in_head {
            decode_entities_into(&html[i..lt], &mut body);
        }
        let next = bytes.get(lt + 1).copied();

        if html[lt..].starts_with("<!--") {
            i = html[lt + 4..].find("-->").map_or(bytes.len(), |p| lt + 4 + p + 3);
            body.push(' ');
            continue;
        }
        match next {
            Some(b'!') | Some(b'?') => {
                i = bytes[lt..].iter().position(|&b| b == b'>').map_or(bytes.len(), |p| lt + p + 1);
                body.push(' ');
            }
            Some(b'/') if bytes.get(lt + 2).is_some_and(u8::is_ascii_alphabetic) => {
                let name = tag_name(html, lt + 2);
                i = bytes[lt..].iter().position(|&b| b == b'>').map_or(bytes.len(), |p| lt + p + 1);
                if name.eq_ignore_ascii_case("head") {
                    in_head = false;
                }
                body.push(' ');
            }
            Some(b) if b.is_ascii_alphabetic() && last_gt.is_some_and(|g| g > lt) => {
                let name = tag_name(html, lt + 1).to_ascii_lowercase();
                let end = tag_end(html, lt + 1 + name.len());
                let self_closing = end >= 2 && bytes[end - 1] == b'>' && bytes[end - 2] == b'/';
                i = end;
                match name.as_str() {
                    "script" | "style" if !self_closing => {
                        i = skip_raw_text(html, end, &name).1;
                    }
                    "title" if !self_closing => {
                        let (content_end, after) = skip_raw_text(html, end, "title");
                        if title.is_none() {
                            let mut t = String::new();
                            decode_entities_into(&html[end..content_end], &mut t);
                            title = Some(t);
                        }
                        i = after;
                    }
                    "head" => in_head = true,
                    "body" => in_head = false,
                    _ => {}
                }
                body.push(' ');
            }
            _ => {
                // A bare '<' that starts no tag is text.
                if !in_head {
                    body.push('<');
                }
                i = lt + 1;
            }
        }
    }

    (normalize_whitespace(&title.unwrap_or_default()), normalize_whitespace(&body))
}

fn tag_name(html: &str, from: usize) -> &str {
    let rest = &html[from..];
    let len = rest
        .bytes()
        .position(|b| !(b.is_ascii_alphanumeric() || b == b'-' || b == b'_' || b == b':'))
        .unwrap_or(rest.len());
    &rest[..len]
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn basic_document() {
        let (t, b) = extract_text("<html><head><title>T</title></head><body>hello</body></html>");
        assert_eq!((t.as_str(), b.as_str()), ("T", "hello"));
    }

    #[test]
    fn empty_input() {
        assert_eq!(extract_text(""), (String::new(), String::new()));
    }

    #[test]
    fn scripts_styles_comments_are_dropped() {
        let html = "<body><div>a<div>b</div></div><script>var x = '<p>no</p>';</script>\
                    <style>p { color: red }</style><!-- hidden -->c &amp; d</body>";
        assert_eq!(extract_text(html).1, "a b c & d");
    }

    #[test]
    fn tags_become_spaces() {
        assert_eq!(extract_text("he<b>ll</b>o").1, "he ll o");
    }

    #[test]
    fn entities() {
        assert_eq!(decode_entities("&lt;&gt;&quot;&apos;&amp;"), "<>\"'&");
        assert_eq!(decode_entities("caf&eacute; &#233; &#xE9; &#xe9;"), "café é é é");
        assert_eq!(decode_entities("&yuml;&nbsp;&AElig;"), "\u{FF}\u{A0}Æ");
        // Above Latin-1 or unknown: left alone.
        assert_eq!(decode_entities("&#x2713; &hellip; &#0; & x &;"), "&#x2713; &hellip; &#0; & x &;");
        assert_eq!(decode_entities("AT&T"), "AT&T");
    }

    #[test]
    fn latin1_table_is_complete() {
        assert_eq!(named_entity("nbsp"), Some('\u{A0}'));
        assert_eq!(named_entity("times"), Some('\u{D7}'));
        assert_eq!(named_entity("szlig"), Some('\u{DF}'));
        assert_eq!(named_entity("divide"), Some('\u{F7}'));
        assert_eq!(named_entity("yuml"), Some('\u{FF}'));
    }

    #[test]
    fn malformed_markup_degrades() {
        assert_eq!(extract_text("<p>unclosed <b>bold").1, "unclosed bold");
        assert_eq!(extract_text("a < b and c<d").1, "a < b and c<d");
        assert_eq!(extract_text("<div class=\"x>y\">text</div>").1, "text");
        assert_eq!(extract_text("<div class=\"never closed>text").1, "text");
        assert_eq!(extract_text("<script>never closed").1, "");
        assert_eq!(extract_text("x <!-- open comment").1, "x");
        assert_eq!(extract_text("<title>only title").0, "only title");
    }

    #[test]
    fn head_text_is_not_body() {
        let (t, b) = extract_text("<head><title>A &amp; B</title><meta charset=utf-8></head>body text");
        assert_eq!(t, "A & B");
        assert_eq!(b, "body text");
    }

    #[test]
    fn only_first_title_counts() {
        let (t, _) = extract_text("<title>one</title><body><svg><title>two</title></svg></body>");
        assert_eq!(t, "one");
    }

    #[test]
    fn uppercase_tags() {
        let (t, b) = extract_text("<HTML><HEAD><TITLE>X</TITLE></HEAD><BODY>Y<SCRIPT>z</SCRIPT></BODY></HTML>");
        assert_eq!((t.as_str(), b.as_str()), ("X", "Y"));
    }

    #[test]
    fn plain_text_passes_through() {
        assert_eq!(extract_text("just  some\ntext"), (String::new(), "just some text".to_string()));
    }
}
