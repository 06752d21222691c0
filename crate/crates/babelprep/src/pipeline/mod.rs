//! Stage orchestration over manifests and config.
//!
//! Each stage derives one corpus version from the previous one, never in
//! place, so any version can be re-derived and diffed:
//!
//! ```text
//! ingest → noisy → normalize → normalized → clean → cleaned
//!        → dedup → deduplicated → split → split (train/valid)
//! ```
//!
//! `run_stage` runs one stage; `run_pipeline` runs the configured sequence.
//! Every stage writes a JSONL report under `<output_root>/reports/`.

mod config;
mod io;
mod stages;

use std::path::Path;

pub use config::{
    validate_config, CleanConfig, DedupConfig, Diagnostic, MixConfig, PipelineConfig, SplitConfig,
    ThresholdConfig, PIPELINE_STAGES, SAMPLING_STAGES,
};
pub use io::{
    list_partitions, list_version_shards, read_partition, read_shard, write_shard,
    VERSION_CLEANED, VERSION_DEDUPLICATED, VERSION_MIX, VERSION_NOISY, VERSION_NORMALIZED,
    VERSION_SPLIT,
};

use crate::clean::{LanguageClassifier, NoClassifier};
use thiserror::Error;

/// The runnable pipeline stages.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Stage {
    Ingest,
    Normalize,
    Clean,
    Dedup,
    Mix,
    Split,
    Stats,
}

impl Stage {
    pub fn parse(s: &str) -> Option<Stage> {
        match s {
            "ingest" => Some(Stage::Ingest),
            "normalize" => Some(Stage::Normalize),
            "clean" => Some(Stage::Clean),
            "dedup" => Some(Stage::Dedup),
            "mix" => Some(Stage::Mix),
            "split" => Some(Stage::Split),
            "stats" => Some(Stage::Stats),
            _ => None,
        }
    }

    pub fn as_str(&self) -> &'static str {
        match self {
            Stage::Ingest => "ingest",
            Stage::Normalize => "normalize",
            Stage::Clean => "clean",
            Stage::Dedup => "dedup",
            Stage::Mix => "mix",
            Stage::Split => "split",
            Stage::Stats => "stats",
        }
    }
}

#[derive(Debug, Error)]
pub enum StageError {
    /// A required earlier corpus version does not exist yet.
    #[error("missing prerequisite version `{version}`; run the `{hint}` stage first")]
    Prerequisite { version: String, hint: String },
    /// The config cannot drive this stage.
    #[error("{0}")]
    Usage(String),
    /// Unrecoverable I/O or environment failure.
    #[error("{0}")]
    Fatal(String),
}

impl StageError {
    pub(crate) fn fatal(e: impl ToString) -> StageError {
        StageError::Fatal(e.to_string())
    }

    /// Process exit code per the CLI contract: 2 for usage/prerequisite
    /// problems, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            StageError::Prerequisite { .. } | StageError::Usage(_) => 2,
            StageError::Fatal(_) => 1,
        }
    }
}

/// What a stage did: one JSONL item per processed unit plus per-file data
/// errors. A nonempty `errors` list means exit status 1.
#[derive(Debug, Clone)]
pub struct StageReport {
    pub stage: &'static str,
    pub items: Vec<serde_json::Value>,
    pub errors: Vec<String>,
    pub records_in: u64,
    pub records_out: u64,
}

impl StageReport {
    fn new(stage: &'static str) -> StageReport {
        StageReport {
            stage,
            items: Vec::new(),
            errors: Vec::new(),
            records_in: 0,
            records_out: 0,
        }
    }

    pub fn summary(&self) -> serde_json::Value {
        serde_json::json!({
            "stage": self.stage,
            "items": self.items.len(),
            "records_in": self.records_in,
            "records_out": self.records_out,
            "errors": self.errors,
        })
    }

    fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for item in &self.items {
            out.push_str(&serde_json::to_string(item).unwrap());
            out.push('\n');
        }
        out.push_str(&serde_json::to_string(&self.summary()).unwrap());
        out.push('\n');
        out
    }
}

/// Run one stage with the default (no-op) language classifier.
pub fn run_stage(stage: Stage, config: &PipelineConfig) -> Result<StageReport, StageError> {
    run_stage_with(stage, config, &NoClassifier)
}

/// Run one stage with a caller-provided language classifier (used by the
/// clean stage when re-identification is enabled).
pub fn run_stage_with(
    stage: Stage,
    config: &PipelineConfig,
    classifier: &dyn LanguageClassifier,
) -> Result<StageReport, StageError> {
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.workers)
        .build()
        .map_err(StageError::fatal)?;
    let report = pool.install(|| match stage {
        Stage::Ingest => stages::ingest(config),
        Stage::Normalize => stages::normalize(config),
        Stage::Clean => stages::clean(config, classifier),
        Stage::Dedup => stages::dedup(config),
        Stage::Mix => stages::mix(config),
        Stage::Split => stages::split(config),
        Stage::Stats => stages::stats(config),
    })?;
    let path = config
        .output_root
        .join("reports")
        .join(format!("{}.jsonl", report.stage));
    io::write_atomic(&path, &report.to_jsonl()).map_err(StageError::fatal)?;
    Ok(report)
}

/// Run the configured stage sequence. Stops at the first hard error;
/// per-file data errors are carried through in the reports.
pub fn run_pipeline(config: &PipelineConfig) -> Result<Vec<StageReport>, StageError> {
    run_pipeline_with(config, &NoClassifier)
}

pub fn run_pipeline_with(
    config: &PipelineConfig,
    classifier: &dyn LanguageClassifier,
) -> Result<Vec<StageReport>, StageError> {
    let mut reports = Vec::new();
    for name in config.pipeline_stages() {
        let stage = Stage::parse(&name)
            .ok_or_else(|| StageError::Usage(format!("unknown stage `{name}`")))?;
        reports.push(run_stage_with(stage, config, classifier)?);
    }
    Ok(reports)
}

/// Convenience: load a config, apply env overrides, and validate it.
pub fn load_config(path: &Path) -> Result<PipelineConfig, StageError> {
    PipelineConfig::load(path).map_err(StageError::Usage)
}
