// Turning raw HTML and JSONL crawl records into page records.

use std::error::Error;
use std::io::Cursor;

use darkcorpus::ingest::{extract_text, PageReader, PageRecord};

pub fn run_example() -> Result<(), Box<dyn Error>> {
    let html = r#"<html><head><title>Market &amp; Forum</title><style>p{}</style></head>
        <body><h1>Welcome</h1><p>Listings are <b>updated</b> daily.</p>
        <script>track('<p>');</script><!-- ad slot --><p>Caf&eacute; prices &lt; 5</p></body></html>"#;
    let (title, body) = extract_text(html);
    println!("title: {title}");
    println!("body:  {body}");

    let page = PageRecord::from_html("p1", "http://example.onion/", html);
    println!("record {} has {} chars", page.id, page.char_count);

    // Bad lines are skipped with a warning instead of aborting the read.
    let jsonl = concat!(
        r#"{"id": "a", "url": "http://a.onion", "text": "plain   text\n page", "lang": "en"}"#, "\n",
        "{broken\n",
        r#"{"url": "http://b.onion", "html": "<p>no id given</p>"}"#, "\n",
    );
    let mut reader = PageReader::new(Cursor::new(jsonl));
    for page in reader.by_ref() {
        println!("{:>3}: {:?}", page.id, page.text);
    }
    for w in reader.warnings() {
        println!("skipped: {w}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() -> Result<(), Box<dyn Error>> {
    run_example()
}
