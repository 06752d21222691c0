//! Resource tiers, sample rates, the continual-training data mix, and
//! train/valid splits.
//!
//! Languages fall into five tiers by whitespace-token count, with exclusive
//! lower bounds ("more than"): high > 1B ≥ medium-high > 100M ≥ medium >
//! 10M ≥ medium-low > 1M ≥ low. Instruction data additionally uses a
//! `medium-high+` band for languages between 500M and 1B tokens.
//!
//! Sampling is a pure per-document decision — a seeded hash of the document
//! id mapped to [0,1) — so results are independent of stream order and
//! worker count, and integer rates replicate documents exactly (verbatim
//! adjacent copies). Token accounting is rounded half away from zero.

use std::collections::BTreeMap;

use serde::Serialize;
use thiserror::Error;

use crate::hashing::{unit_draw, TAG_SAMPLE, TAG_SPLIT};
use crate::record::DocumentRecord;
use crate::stats::count_tokens;

#[derive(Debug, Error)]
pub enum MixError {
    #[error("category `{0}` appears in the manifest but has no sample rate")]
    MissingRate(String),
    #[error("category `{0}` has a negative sample rate")]
    NegativeRate(String),
}

/// Token-count band governing a language's sample rate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ResourceTier {
    High,
    MediumHigh,
    Medium,
    MediumLow,
    Low,
}

impl ResourceTier {
    pub fn as_str(&self) -> &'static str {
        match self {
            ResourceTier::High => "high",
            ResourceTier::MediumHigh => "medium-high",
            ResourceTier::Medium => "medium",
            ResourceTier::MediumLow => "medium-low",
            ResourceTier::Low => "low",
        }
    }
}

impl std::fmt::Display for ResourceTier {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Classify a token count into its resource tier. Bounds are exclusive on
/// the lower side: exactly 1e9 tokens is medium-high, exactly 1e6 is low.
pub fn classify_tier(token_count: u64) -> ResourceTier {
    if token_count > 1_000_000_000 {
        ResourceTier::High
    } else if token_count > 100_000_000 {
        ResourceTier::MediumHigh
    } else if token_count > 10_000_000 {
        ResourceTier::Medium
    } else if token_count > 1_000_000 {
        ResourceTier::MediumLow
    } else {
        ResourceTier::Low
    }
}

/// Band name for category labels. With `with_plus`, counts strictly between
/// 500M and 1B get the separate `medium-high+` band used for instruction
/// data.
pub fn tier_band_name(token_count: u64, with_plus: bool) -> &'static str {
    if with_plus && token_count > 500_000_000 && token_count < 1_000_000_000 {
        return "medium-high+";
    }
    classify_tier(token_count).as_str()
}

/// The broad data types in the mix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CategoryKind {
    Inst,
    Mono,
    Code,
    Curated,
}

impl CategoryKind {
    pub fn as_str(&self) -> &'static str {
        match self {
            CategoryKind::Inst => "inst",
            CategoryKind::Mono => "mono",
            CategoryKind::Code => "code",
            CategoryKind::Curated => "curated",
        }
    }

    pub fn parse(s: &str) -> Option<CategoryKind> {
        match s {
            "inst" => Some(CategoryKind::Inst),
            "mono" => Some(CategoryKind::Mono),
            "code" => Some(CategoryKind::Code),
            "curated" => Some(CategoryKind::Curated),
            _ => None,
        }
    }
}

/// Mix category name for a document, from its kind, its language's total
/// token count, and whether the language is English (monolingual English is
/// its own category). Every document maps to exactly one category.
pub fn category_name(kind: CategoryKind, language_tokens: u64, is_english: bool) -> String {
    match kind {
        CategoryKind::Code => "code".to_string(),
        CategoryKind::Curated => "curated".to_string(),
        CategoryKind::Mono if is_english => "mono high EN".to_string(),
        CategoryKind::Mono => format!("mono {}", tier_band_name(language_tokens, false)),
        CategoryKind::Inst => format!("inst {}", tier_band_name(language_tokens, true)),
    }
}

/// Expected token count for a sampled category: `rate × original`, rounded
/// half away from zero. Integer rates stay in exact integer arithmetic.
pub fn expected_tokens(original: u64, rate: f64) -> u64 {
    if rate.fract() == 0.0 && rate >= 0.0 {
        return (original as u128 * rate as u128).min(u64::MAX as u128) as u64;
    }
    (original as f64 * rate).round() as u64
}

/// How many copies of a document a sample rate emits: `floor(rate)` full
/// copies plus one more with probability `rate - floor(rate)`, decided by a
/// seeded per-document draw.
pub fn sample_copies(rate: f64, seed: u64, doc_id: u64) -> u64 {
    assert!(rate >= 0.0, "sample rate must be nonnegative");
    let whole = rate.trunc() as u64;
    let fract = rate.fract();
    let extra = if fract > 0.0 && unit_draw(seed, TAG_SAMPLE, doc_id) < fract {
        1
    } else {
        0
    };
    whole + extra
}

/// Sample a document stream at `rate`, emitting copies adjacently in input
/// order. Order- and worker-independent given the seed.
pub fn sample_documents<I>(docs: I, rate: f64, seed: u64) -> impl Iterator<Item = DocumentRecord>
where
    I: IntoIterator<Item = DocumentRecord>,
{
    docs.into_iter().flat_map(move |record| {
        let copies = sample_copies(rate, seed, record.doc_id) as usize;
        std::iter::repeat_n(record, copies)
    })
}

/// One category's accounting in a mix plan.
#[derive(Debug, Clone, Serialize, PartialEq)]
pub struct MixPlanRow {
    pub category: String,
    pub original_tokens: u64,
    pub rate: f64,
    pub expected_tokens: u64,
    pub realized_tokens: u64,
    pub percentage: f64,
}

/// Category → rate mapping with realized token accounting. Percentages are
/// shares of the realized total and sum to 1 (±1e-6) when any tokens exist.
#[derive(Debug, Clone, Serialize, Default)]
pub struct MixPlan {
    pub rows: Vec<MixPlanRow>,
    pub seed: u64,
}

impl MixPlan {
    /// Plan from (category, original tokens, rate) triples. Realized counts
    /// start at the expected value; [`MixPlan::set_realized`] overrides them
    /// with what sampling actually produced.
    pub fn from_counts(counts: &[(String, u64, f64)], seed: u64) -> MixPlan {
        let mut plan = MixPlan {
            rows: counts
                .iter()
                .map(|(category, original, rate)| {
                    let expected = expected_tokens(*original, *rate);
                    MixPlanRow {
                        category: category.clone(),
                        original_tokens: *original,
                        rate: *rate,
                        expected_tokens: expected,
                        realized_tokens: expected,
                        percentage: 0.0,
                    }
                })
                .collect(),
            seed,
        };
        plan.recompute_percentages();
        plan
    }

    pub fn set_realized(&mut self, category: &str, realized: u64) {
        if let Some(row) = self.rows.iter_mut().find(|r| r.category == category) {
            row.realized_tokens = realized;
        }
        self.recompute_percentages();
    }

    pub fn total_realized(&self) -> u64 {
        self.rows.iter().map(|r| r.realized_tokens).sum()
    }

    fn recompute_percentages(&mut self) {
        let total = self.total_realized();
        for row in &mut self.rows {
            row.percentage = if total == 0 {
                0.0
            } else {
                row.realized_tokens as f64 / total as f64
            };
        }
    }

    /// Aligned-column text table: category, original, rate, final counts,
    /// percentage of the realized total.
    pub fn render_table(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!(
            "{:<22} {:>18} {:>12} {:>18} {:>11}\n",
            "Data", "Original Counts", "Sample Rate", "Final Counts", "Percentage"
        ));
        for row in &self.rows {
            out.push_str(&format!(
                "{:<22} {:>18} {:>12} {:>18} {:>10.2}%\n",
                row.category,
                group_thousands(row.original_tokens),
                format_rate(row.rate),
                group_thousands(row.realized_tokens),
                row.percentage * 100.0
            ));
        }
        out.push_str(&format!(
            "{:<22} {:>18} {:>12} {:>18} {:>11}\n",
            "total",
            "",
            "",
            group_thousands(self.total_realized()),
            ""
        ));
        out
    }
}

fn format_rate(rate: f64) -> String {
    if rate.fract() == 0.0 || (rate * 10.0).fract() == 0.0 {
        format!("{rate:.1}")
    } else {
        format!("{rate}")
    }
}

fn group_thousands(n: u64) -> String {
    let digits = n.to_string();
    let mut out = String::with_capacity(digits.len() + digits.len() / 3);
    for (i, c) in digits.chars().enumerate() {
        if i > 0 && (digits.len() - i) % 3 == 0 {
            out.push(',');
        }
        out.push(c);
    }
    out
}

/// Sample every category of a categorized corpus and account for the
/// result. Categories are processed in the order given; each must have a
/// rate in `mix_spec`.
pub fn build_mix(
    corpora: Vec<(String, Vec<DocumentRecord>)>,
    mix_spec: &BTreeMap<String, f64>,
    seed: u64,
) -> Result<(Vec<DocumentRecord>, MixPlan), MixError> {
    let mut counts = Vec::new();
    for (category, docs) in &corpora {
        let rate = *mix_spec
            .get(category)
            .ok_or_else(|| MixError::MissingRate(category.clone()))?;
        if rate < 0.0 {
            return Err(MixError::NegativeRate(category.clone()));
        }
        let original: u64 = docs.iter().map(|d| count_tokens(&d.text)).sum();
        counts.push((category.clone(), original, rate));
    }
    let mut plan = MixPlan::from_counts(&counts, seed);

    let mut mixed = Vec::new();
    for (category, docs) in corpora {
        let rate = mix_spec[&category];
        let mut realized = 0u64;
        for record in sample_documents(docs, rate, seed) {
            realized += count_tokens(&record.text);
            mixed.push(record);
        }
        plan.set_realized(&category, realized);
    }
    Ok((mixed, plan))
}

/// Per-`language_Script` validation split sizing.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitPolicy {
    pub valid_fraction: f64,
    pub valid_cap: u64,
}

impl Default for SplitPolicy {
    fn default() -> Self {
        SplitPolicy {
            valid_fraction: 0.01,
            valid_cap: 1000,
        }
    }
}

/// Partition a labeled corpus into train and valid. Per label, the valid
/// split holds `min(cap, round(fraction × docs))` documents — the ones with
/// the smallest seeded draws, so membership is stable under reordering and
/// resharding. Train and valid are disjoint and cover the input.
pub fn split_train_valid(
    records: Vec<DocumentRecord>,
    policy: &SplitPolicy,
    seed: u64,
) -> (Vec<DocumentRecord>, Vec<DocumentRecord>) {
    let mut by_label: BTreeMap<String, Vec<&DocumentRecord>> = BTreeMap::new();
    for record in &records {
        let key = record
            .label
            .as_ref()
            .map_or_else(|| "und_None".to_string(), |l| l.render());
        by_label.entry(key).or_default().push(record);
    }

    let mut valid_ids: std::collections::HashSet<u64> = std::collections::HashSet::new();
    for group in by_label.values() {
        let target = ((group.len() as f64 * policy.valid_fraction).round() as u64)
            .min(policy.valid_cap) as usize;
        if target == 0 {
            continue;
        }
        let mut draws: Vec<(f64, u64)> = group
            .iter()
            .map(|r| (unit_draw(seed, TAG_SPLIT, r.doc_id), r.doc_id))
            .collect();
        draws.sort_by(|a, b| a.partial_cmp(b).unwrap());
        valid_ids.extend(draws.iter().take(target).map(|(_, id)| *id));
    }

    let mut train = Vec::with_capacity(records.len() - valid_ids.len());
    let mut valid = Vec::with_capacity(valid_ids.len());
    for record in records {
        if valid_ids.contains(&record.doc_id) {
            valid.push(record);
        } else {
            train.push(record);
        }
    }
    (train, valid)
}
