//! Corpus construction toolkit for massively multilingual pre-training data.
//!
//! Takes heterogeneous text sources declared in a manifest and turns them
//! into a cleaned, deduplicated, tier-balanced data mix:
//!
//! - **record** — the harmonized document record and its JSONL wire format
//! - **langnorm** — language code normalization to ISO 639-3
//! - **script** — dominant writing-system detection (ISO 15924)
//! - **clean** — document modification and quality filtering
//! - **dedup** — MinHash/LSH near-dedup followed by MD5 exact dedup
//! - **mix** — resource tiers, sample rates, and train/valid splits
//! - **stats** — corpus statistics, script and source distributions
//! - **pipeline** — stage orchestration producing the four corpus versions
//!   (noisy, cleaned, deduplicated, split)
//!
//! Every stage is deterministic given a seed: reruns and different worker
//! counts produce byte-identical output. See the `examples/` directory for
//! one runnable example per capability.

pub mod clean;
pub mod dedup;
mod hashing;
pub mod langnorm;
pub mod manifest;
pub mod mix;
pub mod pipeline;
pub mod record;
pub mod script;
pub mod stats;

pub use clean::{CleaningThresholds, CleaningVerdict, NoSpaceScriptSet, RejectReason};
pub use dedup::{DedupParams, DedupReport, MinHashSignature};
pub use langnorm::{CodeResolution, ResolutionKind, ResolutionTables};
pub use manifest::Manifest;
pub use mix::{MixPlan, ResourceTier, SplitPolicy};
pub use record::{DocumentRecord, LanguageLabel};
pub use script::{ScriptVote, DEFAULT_SAMPLE_LINES};
pub use stats::CorpusStats;
