//! Detect the dominant writing system of a dataset, exercising the whole
//! fallback chain: sampled vote → first line → history → default map.
//!
//! ```bash
//! cargo run --example detect_script
//! ```

use std::collections::HashMap;

use babelprep::script::{detect_script, dominant_script, DefaultScriptMap, ScriptVote};

fn main() {
    let defaults = DefaultScriptMap::builtin();
    let history = HashMap::new();

    // A dataset with a clear majority script.
    let mostly_cyrillic = [
        "Это предложение написано кириллицей.",
        "Ещё одна строка текста для примера.",
        "mixed in: some latin text",
        "И снова кириллица, как в большинстве строк.",
    ];
    let script = detect_script(&mostly_cyrillic, "rus", &history, &defaults, 7);
    println!("mostly Cyrillic dataset → {script:?}");

    // Ambiguous: digits and punctuation bear no script, so the vote is
    // empty and detection falls through to the default map.
    let digits = ["12345 67890", "2023-11-01 00:00:00", "42"];
    let script = detect_script(&digits, "tha", &history, &defaults, 7);
    println!("digit-only dataset declared as Thai → {script:?}");

    // And with a prior detection for the language, history wins first.
    let mut seen = HashMap::new();
    seen.insert("tha".to_string(), "Thai".to_string());
    let script = detect_script(&digits, "tha", &seen, &defaults, 7);
    println!("same dataset with history → {script:?}");

    // The raw vote is available too.
    let mut vote = ScriptVote::new();
    vote.add_line("καλημέρα κόσμε — hello");
    println!("\nvote counts: {:?}", vote.counts());
    println!("dominant at min_fraction 0.5: {:?}", dominant_script(&vote, 0.5));
}
