//! Run document modification and the quality filters, printing each
//! verdict and the reason for rejections.
//!
//! ```bash
//! cargo run --example clean_documents
//! ```

use babelprep::clean::{
    filter_document, modify_document, CleaningThresholds, Lexicons, NoSpaceScriptSet,
    DEFAULT_LINK_PATTERNS,
};
use babelprep::record::{DocumentRecord, LanguageLabel};

fn main() {
    let thresholds = CleaningThresholds::default();
    let lexicons = Lexicons::builtin();
    let no_space = NoSpaceScriptSet::default();

    let samples: [(&str, &str); 6] = [
        (
            "The   quick brown fox\tjumps over the lazy dog and visits https://example.org daily while the children play in the park",
            "eng_Latn",
        ),
        ("2020-01-01 2020-01-01 2020-01-01 2020-01-01", "eng_Latn"),
        ("too short", "eng_Latn"),
        ("aaaaaaaaaaaaaaaaaaaa bbbbbbbbbbbbbbbbbbbb cccccccccccccccccccc dddddddddddddddddddd eeeeeeeeeeeeeeeeeeee", "deu_Latn"),
        ("zorn quill brack fenwick dalmor trestle vignt karoo plim sastruga", "eng_Latn"),
        ("这是一个没有空格分隔的句子示例用于演示清洗流程", "zho_Hani"),
    ];

    let patterns: Vec<&str> = DEFAULT_LINK_PATTERNS.to_vec();
    for (i, (text, label)) in samples.iter().enumerate() {
        let mut record = DocumentRecord::new(i as u64, *text, "demo", "demo", "x");
        record.label = LanguageLabel::parse(label);

        record.text = modify_document(
            text,
            &thresholds,
            &patterns,
            record.label.as_ref(),
            &no_space,
        );
        let verdict = filter_document(&record, &thresholds, &lexicons, &no_space);
        let outcome = match verdict.reason {
            None => "kept".to_string(),
            Some(reason) => format!("rejected ({reason})"),
        };
        println!("[{label}] {outcome}");
        println!("    modified text: {:.60}…", record.text);
    }
}
