//! The seven pipeline stages.
//!
//! Stage outputs are corpus versions: ingest→noisy, normalize→normalized,
//! clean→cleaned, dedup→deduplicated, split→split. Mix and stats produce
//! reports (and the mixed training corpus). Work parallelizes over shards
//! or partitions; every partition's output bytes depend only on its input
//! and the seed, so worker count never changes results.

use std::collections::{BTreeMap, HashMap};
use std::path::{Path, PathBuf};

use rayon::prelude::*;
use serde_json::json;

use crate::clean::{
    filter_document, modify_document, re_identify_language, CleaningThresholds, Lexicons,
    LanguageClassifier, NoSpaceScriptSet,
};
use crate::dedup::{exact_dedup, near_dedup, DedupParams};
use crate::hashing::splitmix64;
use crate::langnorm::ResolutionTables;
use crate::manifest::Manifest;
use crate::mix::{build_mix, category_name, CategoryKind, SplitPolicy};
use crate::record::{DocumentRecord, LanguageLabel};
use crate::script::{detect_script, DefaultScriptMap};
use crate::stats::{
    block_distribution, count_tokens, source_distribution, BlockDistribution, CorpusStatsBuilder,
};

use super::config::PipelineConfig;
use super::io::{
    list_partitions, list_version_shards, read_partition, read_raw_lines, read_shard,
    sanitize_partition, shard_name, write_atomic, write_shard, VERSION_CLEANED,
    VERSION_DEDUPLICATED, VERSION_MIX, VERSION_NOISY, VERSION_NORMALIZED, VERSION_SPLIT,
};
use super::{StageError, StageReport};

/// `f00012.jsonl` → 12.
fn shard_index(path: &Path) -> Option<u64> {
    let name = path.file_stem()?.to_str()?;
    name.strip_prefix('f')?.parse().ok()
}

fn require_version(config: &PipelineConfig, version: &str, hint: &str) -> Result<PathBuf, StageError> {
    let dir = config.output_root.join(version);
    if dir.is_dir() {
        Ok(dir)
    } else {
        Err(StageError::Prerequisite {
            version: version.to_string(),
            hint: hint.to_string(),
        })
    }
}

fn require_seed(config: &PipelineConfig, stage: &str) -> Result<u64, StageError> {
    config.seed.ok_or_else(|| {
        StageError::Usage(format!("stage `{stage}` samples and requires a seed"))
    })
}

pub fn ingest(config: &PipelineConfig) -> Result<StageReport, StageError> {
    let manifest = Manifest::load(&config.manifest)
        .map_err(|e| StageError::Usage(format!("manifest: {e}")))?;
    let noisy = config.output_root.join(VERSION_NOISY);

    let results: Vec<Result<serde_json::Value, String>> = manifest
        .files
        .par_iter()
        .enumerate()
        .map(|(index, entry)| {
            let lines = read_raw_lines(&entry.path)?;
            let records: Vec<DocumentRecord> = lines
                .into_iter()
                .enumerate()
                .map(|(line_no, text)| {
                    let mut record = DocumentRecord::new(
                        DocumentRecord::make_doc_id(index as u64, line_no as u64),
                        text,
                        entry.collection.clone(),
                        entry.source.clone(),
                        entry.original_code.clone(),
                    );
                    record.url = None;
                    record
                })
                .collect();
            let partition = sanitize_partition(&entry.original_code);
            let shard = noisy.join(&partition).join(shard_name(index as u64));
            write_shard(&shard, &records).map_err(|e| format!("{}: {e}", shard.display()))?;
            Ok(json!({
                "file_index": index,
                "path": entry.path.display().to_string(),
                "partition": partition,
                "records": records.len(),
            }))
        })
        .collect();

    let mut report = StageReport::new("ingest");
    for result in results {
        match result {
            Ok(item) => {
                report.records_in += item["records"].as_u64().unwrap_or(0);
                report.records_out += item["records"].as_u64().unwrap_or(0);
                report.items.push(item);
            }
            Err(e) => report.errors.push(e),
        }
    }
    Ok(report)
}

pub fn normalize(config: &PipelineConfig) -> Result<StageReport, StageError> {
    let seed = require_seed(config, "normalize")?;
    let noisy = require_version(config, VERSION_NOISY, "ingest")?;
    let tables = match &config.tables_dir {
        Some(dir) => ResolutionTables::from_dir(dir)
            .map_err(|e| StageError::Usage(format!("tables: {e}")))?,
        None => ResolutionTables::builtin(),
    };
    let defaults = match &config.default_scripts_path {
        Some(path) => DefaultScriptMap::from_file(path)
            .map_err(|e| StageError::Usage(format!("default scripts: {e}")))?,
        None => DefaultScriptMap::builtin(),
    };

    let mut shards = list_version_shards(&noisy).map_err(StageError::fatal)?;
    shards.sort_by_key(|(_, path)| shard_index(path).unwrap_or(u64::MAX));

    let mut report = StageReport::new("normalize");

    // Sequential pass in manifest order: resolve codes, detect scripts, and
    // grow the per-language script history datasets further down can use.
    struct Plan {
        path: PathBuf,
        file_index: u64,
        resolved: String,
        kind: String,
        label: LanguageLabel,
    }
    let mut plans = Vec::new();
    let mut history: HashMap<String, String> = HashMap::new();
    for (_, path) in &shards {
        let file_index = shard_index(path).unwrap_or(u64::MAX);
        let records = match read_shard(path) {
            Ok(r) => r,
            Err(e) => {
                report.errors.push(format!("{}: {e}", path.display()));
                continue;
            }
        };
        let Some(first) = records.first() else { continue };
        let resolution = tables.normalize_code(&first.original_code);
        let texts: Vec<&str> = records.iter().map(|r| r.text.as_str()).collect();
        let dataset_seed = splitmix64(seed ^ splitmix64(file_index));
        let script = detect_script(&texts, &resolution.resolved, &history, &defaults, dataset_seed);
        if let Some(s) = &script {
            history.entry(resolution.resolved.clone()).or_insert_with(|| s.clone());
        }
        let label = LanguageLabel::new(resolution.resolved.clone(), script);
        plans.push(Plan {
            path: path.clone(),
            file_index,
            resolved: resolution.resolved,
            kind: resolution.kind.to_string(),
            label,
        });
    }

    let normalized = config.output_root.join(VERSION_NORMALIZED);
    let results: Vec<Result<serde_json::Value, String>> = plans
        .par_iter()
        .map(|plan| {
            let mut records =
                read_shard(&plan.path).map_err(|e| format!("{}: {e}", plan.path.display()))?;
            for record in &mut records {
                record.label = Some(plan.label.clone());
            }
            let shard = normalized
                .join(sanitize_partition(&plan.label.render()))
                .join(shard_name(plan.file_index));
            write_shard(&shard, &records).map_err(|e| format!("{}: {e}", shard.display()))?;
            Ok(json!({
                "file_index": plan.file_index,
                "original_code": records[0].original_code,
                "resolved": plan.resolved,
                "kind": plan.kind,
                "label": plan.label.render(),
                "script_missing": plan.label.script.is_none(),
                "records": records.len(),
            }))
        })
        .collect();

    for result in results {
        match result {
            Ok(item) => {
                report.records_in += item["records"].as_u64().unwrap_or(0);
                report.records_out += item["records"].as_u64().unwrap_or(0);
                report.items.push(item);
            }
            Err(e) => report.errors.push(e),
        }
    }
    Ok(report)
}

pub fn clean(
    config: &PipelineConfig,
    classifier: &dyn LanguageClassifier,
) -> Result<StageReport, StageError> {
    let normalized = require_version(config, VERSION_NORMALIZED, "normalize")?;
    let lexicons = match &config.lexicon_dir {
        Some(dir) => Lexicons::load_dir(dir).map_err(StageError::fatal)?,
        None => Lexicons::builtin(),
    };
    let no_space = NoSpaceScriptSet::default();
    let patterns: Vec<&str> = config.clean.link_patterns.iter().map(String::as_str).collect();
    let shards = list_version_shards(&normalized).map_err(StageError::fatal)?;
    let cleaned = config.output_root.join(VERSION_CLEANED);

    let results: Vec<Result<serde_json::Value, String>> = shards
        .par_iter()
        .map(|(partition, path)| {
            let records = read_shard(path).map_err(|e| format!("{}: {e}", path.display()))?;
            let mut thresholds: CleaningThresholds = config.thresholds.for_label(partition).clone();
            if !config.clean.consecutive_repeat_filter {
                thresholds.consecutive_min_run = usize::MAX;
            }
            let input = records.len();
            let mut kept = Vec::new();
            let mut rejected: BTreeMap<&'static str, u64> = BTreeMap::new();
            for mut record in records {
                record.text = modify_document(
                    &record.text,
                    &thresholds,
                    &patterns,
                    record.label.as_ref(),
                    &no_space,
                );
                let mut verdict = filter_document(&record, &thresholds, &lexicons, &no_space);
                if verdict.kept && config.clean.reidentify {
                    verdict =
                        re_identify_language(&record, classifier, config.clean.min_confidence);
                }
                match verdict.reason {
                    None => kept.push(record),
                    Some(reason) => *rejected.entry(reason.as_str()).or_default() += 1,
                }
            }
            let out = cleaned
                .join(partition)
                .join(path.file_name().unwrap_or_default());
            write_shard(&out, &kept).map_err(|e| format!("{}: {e}", out.display()))?;
            Ok(json!({
                "partition": partition,
                "shard": path.file_name().map(|n| n.to_string_lossy().to_string()),
                "input": input,
                "kept": kept.len(),
                "rejected": rejected,
            }))
        })
        .collect();

    let mut report = StageReport::new("clean");
    for result in results {
        match result {
            Ok(item) => {
                report.records_in += item["input"].as_u64().unwrap_or(0);
                report.records_out += item["kept"].as_u64().unwrap_or(0);
                report.items.push(item);
            }
            Err(e) => report.errors.push(e),
        }
    }
    Ok(report)
}

pub fn dedup(config: &PipelineConfig) -> Result<StageReport, StageError> {
    let seed = require_seed(config, "dedup")?;
    let cleaned = require_version(config, VERSION_CLEANED, "clean")?;
    let partitions = list_partitions(&cleaned).map_err(StageError::fatal)?;
    let deduplicated = config.output_root.join(VERSION_DEDUPLICATED);
    let removals_dir = config.output_root.join("reports").join("dedup_removals");
    let no_space = NoSpaceScriptSet::default();
    let params = DedupParams {
        ngram: config.dedup.ngram,
        threshold: config.dedup.threshold,
        num_perm: config.dedup.num_perm,
        seed,
        spill_dir: config.dedup.spill_dir.clone(),
        memory_budget: (config.memory_budget_bytes > 0).then_some(config.memory_budget_bytes),
    };

    let results: Vec<Result<serde_json::Value, String>> = partitions
        .par_iter()
        .map(|partition| {
            let records = read_partition(&cleaned.join(partition))
                .map_err(|e| format!("{partition}: {e}"))?;
            let input = records.len();
            let (after_near, near_report) =
                near_dedup(records, &params, &no_space).map_err(|e| format!("{partition}: {e}"))?;
            let near_kept = after_near.len();
            let (kept, exact_report) = exact_dedup(after_near);

            let out = deduplicated.join(partition).join("part00000.jsonl");
            write_shard(&out, &kept).map_err(|e| format!("{}: {e}", out.display()))?;

            let mut removal_lines = String::new();
            for removal in near_report.removals.iter().chain(&exact_report.removals) {
                removal_lines.push_str(&serde_json::to_string(removal).unwrap());
                removal_lines.push('\n');
            }
            if !removal_lines.is_empty() {
                let log = removals_dir.join(format!("{partition}.jsonl"));
                write_atomic(&log, &removal_lines).map_err(|e| format!("{partition}: {e}"))?;
            }
            Ok(json!({
                "partition": partition,
                "input": input,
                "after_near": near_kept,
                "kept": kept.len(),
                "near_dup_clusters": near_report.near_dup_clusters,
                "exact_dup_groups": exact_report.exact_dup_groups,
            }))
        })
        .collect();

    let mut report = StageReport::new("dedup");
    for result in results {
        match result {
            Ok(item) => {
                report.records_in += item["input"].as_u64().unwrap_or(0);
                report.records_out += item["kept"].as_u64().unwrap_or(0);
                report.items.push(item);
            }
            Err(e) => report.errors.push(e),
        }
    }
    Ok(report)
}

pub fn split(config: &PipelineConfig) -> Result<StageReport, StageError> {
    let seed = require_seed(config, "split")?;
    let deduplicated = require_version(config, VERSION_DEDUPLICATED, "dedup")?;
    let partitions = list_partitions(&deduplicated).map_err(StageError::fatal)?;
    let split_root = config.output_root.join(VERSION_SPLIT);
    let policy = SplitPolicy {
        valid_fraction: config.split.valid_fraction,
        valid_cap: config.split.valid_cap,
    };

    let results: Vec<Result<serde_json::Value, String>> = partitions
        .par_iter()
        .map(|partition| {
            let records = read_partition(&deduplicated.join(partition))
                .map_err(|e| format!("{partition}: {e}"))?;
            let input = records.len();
            let (train, valid) = crate::mix::split_train_valid(records, &policy, seed);
            let train_path = split_root.join("train").join(partition).join("part00000.jsonl");
            write_shard(&train_path, &train).map_err(|e| format!("{}: {e}", train_path.display()))?;
            let valid_path = split_root.join("valid").join(partition).join("part00000.jsonl");
            write_shard(&valid_path, &valid).map_err(|e| format!("{}: {e}", valid_path.display()))?;
            Ok(json!({
                "partition": partition,
                "input": input,
                "train": train.len(),
                "valid": valid.len(),
            }))
        })
        .collect();

    let mut report = StageReport::new("split");
    for result in results {
        match result {
            Ok(item) => {
                report.records_in += item["input"].as_u64().unwrap_or(0);
                report.records_out += item["train"].as_u64().unwrap_or(0)
                    + item["valid"].as_u64().unwrap_or(0);
                report.items.push(item);
            }
            Err(e) => report.errors.push(e),
        }
    }
    Ok(report)
}

pub fn mix(config: &PipelineConfig) -> Result<StageReport, StageError> {
    let seed = require_seed(config, "mix")?;
    let deduplicated = require_version(config, VERSION_DEDUPLICATED, "dedup")?;
    if config.mix.rates.is_empty() {
        return Err(StageError::Usage(
            "mix.rates is empty; configure a sample rate per category".into(),
        ));
    }
    let partitions = list_partitions(&deduplicated).map_err(StageError::fatal)?;

    // Pass 1: token totals per language code, which fix each language's tier.
    let code_tokens: BTreeMap<String, u64> = {
        let per_partition: Vec<Result<BTreeMap<String, u64>, String>> = partitions
            .par_iter()
            .map(|partition| {
                let records = read_partition(&deduplicated.join(partition))
                    .map_err(|e| format!("{partition}: {e}"))?;
                let mut map: BTreeMap<String, u64> = BTreeMap::new();
                for record in &records {
                    let code = record
                        .label
                        .as_ref()
                        .map_or("und", |l| l.code.as_str())
                        .to_string();
                    *map.entry(code).or_default() += count_tokens(&record.text);
                }
                Ok(map)
            })
            .collect();
        let mut merged: BTreeMap<String, u64> = BTreeMap::new();
        let mut first_error = None;
        for result in per_partition {
            match result {
                Ok(map) => {
                    for (code, tokens) in map {
                        *merged.entry(code).or_default() += tokens;
                    }
                }
                Err(e) => {
                    first_error.get_or_insert(e);
                }
            };
        }
        if let Some(e) = first_error {
            return Err(StageError::fatal(e));
        }
        merged
    };

    // Pass 2: assign each document its category and collect per category.
    let kinds: BTreeMap<&str, CategoryKind> = config
        .mix
        .collection_kinds
        .iter()
        .filter_map(|(c, k)| CategoryKind::parse(k).map(|kind| (c.as_str(), kind)))
        .collect();
    let mut by_category: BTreeMap<String, Vec<DocumentRecord>> = BTreeMap::new();
    for partition in &partitions {
        let records = read_partition(&deduplicated.join(partition))
            .map_err(|e| StageError::fatal(format!("{partition}: {e}")))?;
        for record in records {
            let code = record.label.as_ref().map_or("und", |l| l.code.as_str());
            let kind = kinds
                .get(record.collection.as_str())
                .copied()
                .unwrap_or(CategoryKind::Mono);
            let category =
                category_name(kind, *code_tokens.get(code).unwrap_or(&0), code == "eng");
            by_category.entry(category).or_default().push(record);
        }
    }
    for records in by_category.values_mut() {
        records.sort_by_key(|r| r.doc_id);
    }

    let corpora: Vec<(String, Vec<DocumentRecord>)> = by_category.into_iter().collect();
    let (mixed, plan) = build_mix(corpora, &config.mix.rates, seed)
        .map_err(|e| StageError::Usage(e.to_string()))?;

    // The mixed corpus ships per label like every other version; upsampled
    // copies stay adjacent.
    let mix_root = config.output_root.join(VERSION_MIX);
    let mut by_label: BTreeMap<String, Vec<DocumentRecord>> = BTreeMap::new();
    for record in mixed {
        let label = record
            .label
            .as_ref()
            .map_or_else(|| "und_None".to_string(), |l| l.render());
        by_label.entry(sanitize_partition(&label)).or_default().push(record);
    }
    let writes: Vec<Result<(), String>> = by_label
        .par_iter()
        .map(|(label, records)| {
            let out = mix_root.join(label).join("part00000.jsonl");
            write_shard(&out, records).map_err(|e| format!("{}: {e}", out.display()))
        })
        .collect();

    let mut report = StageReport::new("mix");
    for w in writes {
        if let Err(e) = w {
            report.errors.push(e);
        }
    }

    let reports_dir = config.output_root.join("reports");
    let mut plan_lines = String::new();
    for row in &plan.rows {
        plan_lines.push_str(&serde_json::to_string(row).unwrap());
        plan_lines.push('\n');
        report.items.push(serde_json::to_value(row).unwrap());
    }
    write_atomic(&reports_dir.join("mix_plan.jsonl"), &plan_lines).map_err(StageError::fatal)?;
    write_atomic(&reports_dir.join("mix_plan.txt"), &plan.render_table())
        .map_err(StageError::fatal)?;

    report.records_out = plan.total_realized();
    Ok(report)
}

pub fn stats(config: &PipelineConfig) -> Result<StageReport, StageError> {
    let version = config.stats_version.as_str();
    let hint = match version {
        VERSION_NOISY => "ingest",
        VERSION_NORMALIZED => "normalize",
        VERSION_CLEANED => "clean",
        VERSION_DEDUPLICATED => "dedup",
        VERSION_SPLIT => "split",
        VERSION_MIX => "mix",
        other => {
            return Err(StageError::Usage(format!(
                "stats_version `{other}` is not a corpus version"
            )))
        }
    };
    let version_dir = require_version(config, version, hint)?;

    // The split version nests train/ and valid/ under the version root.
    let partition_dirs: Vec<PathBuf> = if version == VERSION_SPLIT {
        let mut dirs = Vec::new();
        for half in ["train", "valid"] {
            let root = version_dir.join(half);
            if root.is_dir() {
                for p in list_partitions(&root).map_err(StageError::fatal)? {
                    dirs.push(root.join(p));
                }
            }
        }
        dirs
    } else {
        list_partitions(&version_dir)
            .map_err(StageError::fatal)?
            .into_iter()
            .map(|p| version_dir.join(p))
            .collect()
    };

    struct PartitionAccumulators {
        stats: CorpusStatsBuilder,
        blocks: BlockDistribution,
        records: Vec<DocumentRecord>,
    }
    let results: Vec<Result<PartitionAccumulators, String>> = partition_dirs
        .par_iter()
        .map(|dir| {
            let records =
                read_partition(dir).map_err(|e| format!("{}: {e}", dir.display()))?;
            let mut builder = CorpusStatsBuilder::new();
            for record in &records {
                builder.add(record);
            }
            Ok(PartitionAccumulators {
                stats: builder,
                blocks: block_distribution(records.iter()),
                records,
            })
        })
        .collect();

    let mut report = StageReport::new("stats");
    let mut builder = CorpusStatsBuilder::new();
    let mut blocks = BlockDistribution::new();
    let mut all_records: Vec<DocumentRecord> = Vec::new();
    for result in results {
        match result {
            Ok(acc) => {
                builder.merge(acc.stats);
                blocks.merge(acc.blocks);
                all_records.extend(acc.records);
            }
            Err(e) => report.errors.push(e),
        }
    }
    let corpus = builder.finish();
    let sources = source_distribution(all_records.iter());

    let reports_dir = config.output_root.join("reports");
    let mut stat_lines = String::new();
    for (label, s) in &corpus.per_label {
        stat_lines.push_str(
            &serde_json::to_string(&json!({
                "label": label, "docs": s.docs, "tokens": s.tokens, "avg": s.avg(),
            }))
            .unwrap(),
        );
        stat_lines.push('\n');
    }
    let summary = json!({
        "version": version,
        "docs": corpus.total.docs,
        "tokens": corpus.total.tokens,
        "avg_tokens_per_doc": corpus.avg_tokens_per_doc(),
        "languages_total": corpus.languages_total,
        "languages_over_100k": corpus.languages_over_100k,
        "languages_over_1m": corpus.languages_over_1m,
    });
    stat_lines.push_str(&serde_json::to_string(&summary).unwrap());
    stat_lines.push('\n');
    write_atomic(&reports_dir.join(format!("stats_{version}.jsonl")), &stat_lines)
        .map_err(StageError::fatal)?;
    write_atomic(
        &reports_dir.join(format!("stats_{version}.txt")),
        &corpus.render_table(),
    )
    .map_err(StageError::fatal)?;
    write_atomic(
        &reports_dir.join(format!("block_distribution_{version}.csv")),
        &blocks.render_csv(),
    )
    .map_err(StageError::fatal)?;
    let mut source_lines = String::new();
    for (source, count) in &sources.by_source {
        source_lines.push_str(
            &serde_json::to_string(&json!({"source": source, "docs": count})).unwrap(),
        );
        source_lines.push('\n');
    }
    for (domain, count) in &sources.by_domain {
        source_lines.push_str(
            &serde_json::to_string(&json!({"domain": domain, "docs": count})).unwrap(),
        );
        source_lines.push('\n');
    }
    write_atomic(
        &reports_dir.join(format!("source_distribution_{version}.jsonl")),
        &source_lines,
    )
    .map_err(StageError::fatal)?;

    report.records_in = corpus.total.docs;
    report.records_out = corpus.total.docs;
    report.items.push(summary);
    Ok(report)
}
