//! Near-deduplicate and exact-deduplicate a small synthetic partition,
//! showing the removal log and the LSH band parameters in use.
//!
//! ```bash
//! cargo run --example dedup_corpus
//! ```

use babelprep::clean::NoSpaceScriptSet;
use babelprep::dedup::{exact_dedup, near_dedup, optimal_bands, DedupParams};
use babelprep::record::{DocumentRecord, LanguageLabel};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn doc(id: u64, text: String) -> DocumentRecord {
    let mut r = DocumentRecord::new(id, text, "demo", "demo", "en");
    r.label = Some(LanguageLabel::new("eng", Some("Latn".into())));
    r
}

fn main() {
    let params = DedupParams { seed: 11, ..DedupParams::default() };
    let (bands, rows) = optimal_bands(params.threshold, params.num_perm);
    println!(
        "LSH at threshold {} with {} permutations → {bands} bands × {rows} rows",
        params.threshold, params.num_perm
    );

    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut fresh = |n: usize| -> String {
        (0..n).map(|_| format!("w{}", rng.random_range(0..100_000u32))).collect::<Vec<_>>().join(" ")
    };

    let base_a = fresh(120);
    let base_b = fresh(120);
    let mut near_b: Vec<String> = base_b.split_whitespace().map(String::from).collect();
    near_b[40] = "changed".into();
    near_b[80] = "words".into();

    let records = vec![
        doc(0, base_a.clone()),
        doc(1, base_b.clone()),
        doc(2, fresh(120)),
        doc(3, base_a.clone()),      // exact copy of 0
        doc(4, near_b.join(" ")),    // near-duplicate of 1
        doc(5, base_a),              // another copy of 0
        doc(6, base_b),              // exact copy of 1
    ];

    let (kept, near_report) = near_dedup(records, &params, &NoSpaceScriptSet::default()).unwrap();
    println!("\nnear-dedup kept {} of {} documents", near_report.kept_docs, near_report.input_docs);
    for removal in &near_report.removals {
        println!(
            "  removed {} → kept {} (estimated Jaccard {:.3})",
            removal.removed_id, removal.kept_id, removal.estimate
        );
    }

    let (kept, exact_report) = exact_dedup(kept);
    println!(
        "exact dedup kept {} documents ({} duplicate groups)",
        exact_report.kept_docs, exact_report.exact_dup_groups
    );
    let ids: Vec<u64> = kept.iter().map(|r| r.doc_id).collect();
    println!("surviving doc ids: {ids:?}");
}
