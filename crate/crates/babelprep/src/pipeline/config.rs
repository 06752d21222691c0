//! Pipeline configuration: a JSON document with a fixed schema.
//!
//! Environment variables override exactly two settings — worker count
//! (`BABELPREP_WORKERS`) and memory budget (`BABELPREP_MEMORY_BUDGET`) —
//! everything else comes from the file, so a config plus a seed fully
//! determines the output bytes.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use serde::Deserialize;

use crate::clean::CleaningThresholds;

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PipelineConfig {
    /// Input manifest path.
    pub manifest: PathBuf,
    /// Root directory for corpus versions and reports.
    pub output_root: PathBuf,
    /// Seed for every sampling decision. Required for the normalize, dedup,
    /// mix, and split stages.
    #[serde(default)]
    pub seed: Option<u64>,
    /// Worker threads; 0 means one per core.
    #[serde(default)]
    pub workers: usize,
    /// Approximate dedup index memory cap in bytes; 0 means unbounded.
    #[serde(default)]
    pub memory_budget_bytes: u64,
    /// Stages the `pipeline` command should run, in order. Empty means the
    /// standard sequence.
    #[serde(default)]
    pub stages: Vec<String>,
    /// Filter thresholds: defaults plus per-`language_Script` overrides.
    #[serde(default)]
    pub thresholds: ThresholdConfig,
    /// Directory of per-`language_Script` lexicons (stopwords/flagwords).
    #[serde(default)]
    pub lexicon_dir: Option<PathBuf>,
    /// Directory overriding the bundled code-resolution tables.
    #[serde(default)]
    pub tables_dir: Option<PathBuf>,
    /// File overriding the bundled default-script map.
    #[serde(default)]
    pub default_scripts_path: Option<PathBuf>,
    #[serde(default)]
    pub clean: CleanConfig,
    #[serde(default)]
    pub dedup: DedupConfig,
    #[serde(default)]
    pub mix: MixConfig,
    #[serde(default)]
    pub split: SplitConfig,
    /// Corpus version the stats stage reads.
    #[serde(default = "default_stats_version")]
    pub stats_version: String,
}

fn default_stats_version() -> String {
    "deduplicated".to_string()
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ThresholdConfig {
    #[serde(default)]
    pub default: CleaningThresholds,
    #[serde(default)]
    pub overrides: BTreeMap<String, CleaningThresholds>,
}

impl ThresholdConfig {
    pub fn for_label(&self, label: &str) -> &CleaningThresholds {
        self.overrides.get(label).unwrap_or(&self.default)
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CleanConfig {
    /// Run language re-identification inside the clean stage.
    #[serde(default)]
    pub reidentify: bool,
    /// Confidence a classifier needs to overrule the declared language.
    #[serde(default = "default_min_confidence")]
    pub min_confidence: f64,
    /// Discard documents with consecutive repeating words.
    #[serde(default = "default_true")]
    pub consecutive_repeat_filter: bool,
    /// Substrings marking link-like words for removal.
    #[serde(default = "default_link_patterns")]
    pub link_patterns: Vec<String>,
}

fn default_min_confidence() -> f64 {
    0.9
}

fn default_true() -> bool {
    true
}

fn default_link_patterns() -> Vec<String> {
    crate::clean::DEFAULT_LINK_PATTERNS
        .iter()
        .map(|s| s.to_string())
        .collect()
}

impl Default for CleanConfig {
    fn default() -> Self {
        CleanConfig {
            reidentify: false,
            min_confidence: default_min_confidence(),
            consecutive_repeat_filter: true,
            link_patterns: default_link_patterns(),
        }
    }
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DedupConfig {
    #[serde(default = "default_ngram")]
    pub ngram: usize,
    #[serde(default = "default_threshold")]
    pub threshold: f64,
    #[serde(default = "default_num_perm")]
    pub num_perm: usize,
    /// Directory for disk-backed signatures; unset keeps the index in
    /// memory.
    #[serde(default)]
    pub spill_dir: Option<PathBuf>,
}

fn default_ngram() -> usize {
    5
}
fn default_threshold() -> f64 {
    0.7
}
fn default_num_perm() -> usize {
    128
}

impl Default for DedupConfig {
    fn default() -> Self {
        DedupConfig {
            ngram: default_ngram(),
            threshold: default_threshold(),
            num_perm: default_num_perm(),
            spill_dir: None,
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MixConfig {
    /// Category → sample rate, e.g. `"mono medium": 5.0`.
    #[serde(default)]
    pub rates: BTreeMap<String, f64>,
    /// Collection → data kind (`inst`, `mono`, `code`, `curated`).
    /// Unlisted collections count as monolingual text.
    #[serde(default)]
    pub collection_kinds: BTreeMap<String, String>,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplitConfig {
    #[serde(default = "default_valid_fraction")]
    pub valid_fraction: f64,
    #[serde(default = "default_valid_cap")]
    pub valid_cap: u64,
}

fn default_valid_fraction() -> f64 {
    0.01
}
fn default_valid_cap() -> u64 {
    1000
}

impl Default for SplitConfig {
    fn default() -> Self {
        SplitConfig {
            valid_fraction: default_valid_fraction(),
            valid_cap: default_valid_cap(),
        }
    }
}

/// Stages that draw on the seed.
pub const SAMPLING_STAGES: [&str; 4] = ["normalize", "dedup", "mix", "split"];

/// The standard stage sequence for the `pipeline` command. Mix runs only
/// when rates are configured.
pub const PIPELINE_STAGES: [&str; 7] =
    ["ingest", "normalize", "clean", "dedup", "split", "mix", "stats"];

impl PipelineConfig {
    pub fn load(path: &Path) -> Result<PipelineConfig, String> {
        let content = std::fs::read_to_string(path)
            .map_err(|e| format!("cannot read config {}: {e}", path.display()))?;
        let mut config: PipelineConfig = serde_json::from_str(&content)
            .map_err(|e| format!("cannot parse config {}: {e}", path.display()))?;
        let base = path.parent().unwrap_or(Path::new("."));
        for p in [&mut config.manifest, &mut config.output_root] {
            if !p.is_absolute() {
                *p = base.join(&p);
            }
        }
        for p in [
            &mut config.lexicon_dir,
            &mut config.tables_dir,
            &mut config.default_scripts_path,
            &mut config.dedup.spill_dir,
        ]
        .into_iter()
        .flatten()
        {
            if !p.is_absolute() {
                *p = base.join(&p);
            }
        }
        config.apply_env_overrides();
        Ok(config)
    }

    /// Worker count and memory budget may come from the environment; no
    /// other setting does.
    fn apply_env_overrides(&mut self) {
        if let Ok(v) = std::env::var("BABELPREP_WORKERS") {
            if let Ok(n) = v.parse() {
                self.workers = n;
            }
        }
        if let Ok(v) = std::env::var("BABELPREP_MEMORY_BUDGET") {
            if let Ok(n) = v.parse() {
                self.memory_budget_bytes = n;
            }
        }
    }

    /// The stages the `pipeline` command will run.
    pub fn pipeline_stages(&self) -> Vec<String> {
        if !self.stages.is_empty() {
            return self.stages.clone();
        }
        PIPELINE_STAGES
            .iter()
            .filter(|s| **s != "mix" || !self.mix.rates.is_empty())
            .map(|s| s.to_string())
            .collect()
    }

    /// The directory the manifest's inputs live under.
    pub fn input_root(&self) -> PathBuf {
        self.manifest
            .parent()
            .unwrap_or(Path::new("."))
            .to_path_buf()
    }
}

/// One configuration problem: the offending field and what is wrong.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Diagnostic {
    pub field: String,
    pub message: String,
}

impl std::fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}: {}", self.field, self.message)
    }
}

/// Check every config invariant; an empty list means the config is valid.
pub fn validate_config(config: &PipelineConfig) -> Vec<Diagnostic> {
    let mut diagnostics = Vec::new();

    let canon = |p: &Path| p.canonicalize().unwrap_or_else(|_| p.to_path_buf());
    if canon(&config.output_root) == canon(&config.input_root()) {
        diagnostics.push(Diagnostic {
            field: "output_root".into(),
            message: "must not equal the input root (the manifest's directory)".into(),
        });
    }

    if config.seed.is_none()
        && config
            .pipeline_stages()
            .iter()
            .any(|s| SAMPLING_STAGES.contains(&s.as_str()))
    {
        diagnostics.push(Diagnostic {
            field: "seed".into(),
            message: "required when a sampling stage (normalize, dedup, mix, split) is enabled"
                .into(),
        });
    }

    for (category, rate) in &config.mix.rates {
        if !rate.is_finite() || *rate < 0.0 {
            diagnostics.push(Diagnostic {
                field: format!("mix.rates.{category}"),
                message: "sample rate must be a nonnegative finite number".into(),
            });
        }
    }
    for (collection, kind) in &config.mix.collection_kinds {
        if crate::mix::CategoryKind::parse(kind).is_none() {
            diagnostics.push(Diagnostic {
                field: format!("mix.collection_kinds.{collection}"),
                message: "kind must be one of inst, mono, code, curated".into(),
            });
        }
    }
    if !(0.0..=1.0).contains(&config.split.valid_fraction) {
        diagnostics.push(Diagnostic {
            field: "split.valid_fraction".into(),
            message: "must be in [0, 1]".into(),
        });
    }
    if !(0.0..1.0).contains(&config.dedup.threshold) || config.dedup.threshold == 0.0 {
        diagnostics.push(Diagnostic {
            field: "dedup.threshold".into(),
            message: "must be strictly between 0 and 1".into(),
        });
    }
    if config.dedup.num_perm < 16 {
        diagnostics.push(Diagnostic {
            field: "dedup.num_perm".into(),
            message: "at least 16 permutations required".into(),
        });
    }
    if config.dedup.ngram == 0 {
        diagnostics.push(Diagnostic {
            field: "dedup.ngram".into(),
            message: "shingle size must be at least 1".into(),
        });
    }
    for stage in &config.stages {
        if !PIPELINE_STAGES.contains(&stage.as_str()) {
            diagnostics.push(Diagnostic {
                field: "stages".into(),
                message: format!("unknown stage `{stage}`"),
            });
        }
    }
    diagnostics
}

#[cfg(test)]
mod tests {
    use super::*;

    fn minimal_config(dir: &Path, seed: Option<u64>) -> PipelineConfig {
        let manifest = dir.join("in/manifest.json");
        std::fs::create_dir_all(dir.join("in")).unwrap();
        std::fs::write(&manifest, r#"{"files":[]}"#).unwrap();
        let seed_line = seed.map_or(String::new(), |s| format!("\"seed\": {s},"));
        let json = format!(
            r#"{{ {seed_line} "manifest": "in/manifest.json", "output_root": "out" }}"#
        );
        let config_path = dir.join("config.json");
        std::fs::write(&config_path, json).unwrap();
        PipelineConfig::load(&config_path).unwrap()
    }

    #[test]
    fn valid_config_has_no_diagnostics() {
        let dir = tempfile::tempdir().unwrap();
        let config = minimal_config(dir.path(), Some(42));
        assert_eq!(validate_config(&config), Vec::new());
    }

    #[test]
    fn output_equal_to_input_root_is_flagged() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = minimal_config(dir.path(), Some(42));
        config.output_root = config.input_root();
        let diags = validate_config(&config);
        assert!(diags.iter().any(|d| d.field == "output_root"), "{diags:?}");
    }

    #[test]
    fn missing_seed_with_sampling_stage_is_flagged() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = minimal_config(dir.path(), None);
        config.stages = vec!["mix".into()];
        let diags = validate_config(&config);
        assert!(diags.iter().any(|d| d.field == "seed"), "{diags:?}");

        // No sampling stages enabled: seed is optional.
        config.stages = vec!["ingest".into()];
        assert!(validate_config(&config).is_empty());
    }

    #[test]
    fn bad_rates_and_fractions_are_flagged() {
        let dir = tempfile::tempdir().unwrap();
        let mut config = minimal_config(dir.path(), Some(1));
        config.mix.rates.insert("mono low".into(), -1.0);
        config.split.valid_fraction = 1.5;
        config.mix.collection_kinds.insert("x".into(), "weird".into());
        let diags = validate_config(&config);
        let fields: Vec<&str> = diags.iter().map(|d| d.field.as_str()).collect();
        assert!(fields.contains(&"mix.rates.mono low"));
        assert!(fields.contains(&"split.valid_fraction"));
        assert!(fields.contains(&"mix.collection_kinds.x"));
    }
}
