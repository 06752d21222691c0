//! Resolve declared language codes and names to ISO 639-3.
//!
//! ```bash
//! cargo run --example normalize_codes
//! ```

use babelprep::langnorm::{make_label, ResolutionTables};

fn main() {
    let tables = ResolutionTables::builtin();

    let declared = [
        "eng",        // already ISO 639-3
        "en",         // ISO 639-1
        "fre",        // ISO 639-2 bibliographic variant
        "iw",         // legacy code for Hebrew
        "mol",        // retired, merged into Romanian
        "ber",        // ISO 639-2 collective code, retained
        "English",    // a name instead of a code
        "Portugese",  // a misspelled name
        "tlh-piqd",   // unknown; retained and counted
    ];

    println!("{:<12} {:<10} {}", "input", "resolved", "kind");
    for input in declared {
        let r = tables.normalize_code(input);
        println!("{:<12} {:<10} {}", r.input, r.resolved, r.kind);
    }

    // Labels compose the resolved code with a detected script.
    println!("\nlabels:");
    for (code, script) in [("eng", Some("Latn")), ("ber", Some("Latn")), ("rus", None)] {
        println!("  {}", make_label(code, script));
    }
}
