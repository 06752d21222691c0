//! Harmonize raw text lines into document records and round-trip them
//! through the JSONL wire format.
//!
//! ```bash
//! cargo run --example harmonize
//! ```

use babelprep::record::{decode_jsonl, encode_jsonl, DocumentRecord};

fn main() {
    let raw_lines = [
        "The quick brown fox jumps over the lazy dog.",
        "A second document, as delivered by the source.",
        "Line three\twith embedded\ttabs.",
    ];

    // One record per input line; ids pack (file index, line number).
    let file_index = 0u64;
    let records: Vec<DocumentRecord> = raw_lines
        .iter()
        .enumerate()
        .map(|(line_no, text)| {
            DocumentRecord::new(
                DocumentRecord::make_doc_id(file_index, line_no as u64),
                *text,
                "Wikipedia",
                "wiki-eng",
                "en",
            )
        })
        .collect();

    println!("encoded JSONL:");
    for record in &records {
        let line = encode_jsonl(record).unwrap();
        print!("{line}");
        let back = decode_jsonl(line.trim_end(), 1).unwrap();
        assert_eq!(&back, record, "round trip is exact");
    }

    // Unknown keys survive decoding, so heterogeneous source metadata is
    // never dropped.
    let with_extra = r#"{"doc_id":42,"text":"hello","collection":"c","source":"s","original_code":"en","crawl_date":"2023-11-01"}"#;
    let record = decode_jsonl(with_extra, 1).unwrap();
    println!("\nretained extras: {:?}", record.extras);
}
