//! Corpus statistics, script distributions, and source distributions.
//!
//! Token counts are whitespace-delimited: a token is one maximal run of
//! non-whitespace codepoints over the full Unicode whitespace class. For
//! languages written without spaces an entire clause counts as one token;
//! that is the deliberate convention of the corpus-size figures.
//!
//! Accumulators are associative — shard-parallel counting followed by a
//! merge gives the same result as one sequential pass.

use std::collections::{BTreeMap, HashMap};

use serde::Serialize;

use crate::record::DocumentRecord;
use crate::script::char_script;

/// Number of maximal non-whitespace runs.
pub fn count_tokens(text: &str) -> u64 {
    text.split_whitespace().count() as u64
}

/// Average tokens per document; the unit cancels, so millions in = plain
/// ratio out.
pub fn avg_tokens_per_doc(tokens: f64, docs: f64) -> f64 {
    if docs == 0.0 {
        0.0
    } else {
        tokens / docs
    }
}

#[derive(Debug, Clone, Copy, Default, PartialEq, Eq, Serialize)]
pub struct LabelStats {
    pub docs: u64,
    pub tokens: u64,
}

impl LabelStats {
    pub fn avg(&self) -> f64 {
        avg_tokens_per_doc(self.tokens as f64, self.docs as f64)
    }
}

/// Aggregated corpus statistics. Language threshold counters are per ISO
/// code (summed over scripts); per-label rows keep the full breakdown.
#[derive(Debug, Clone, Default, Serialize)]
pub struct CorpusStats {
    pub per_label: BTreeMap<String, LabelStats>,
    pub total: LabelStats,
    pub languages_total: u64,
    pub languages_over_100k: u64,
    pub languages_over_1m: u64,
}

impl CorpusStats {
    pub fn avg_tokens_per_doc(&self) -> f64 {
        self.total.avg()
    }

    /// Aligned text table: label, docs, tokens, average. Counts in millions
    /// with two decimals, so output lines up with published corpus tables.
    pub fn render_table(&self) -> String {
        fn millions(n: u64) -> f64 {
            n as f64 / 1.0e6
        }
        let mut out = format!(
            "{:<16} {:>12} {:>14} {:>16}\n",
            "Label", "Docs (M)", "Tokens (M)", "Avg Tokens/Doc"
        );
        for (label, stats) in &self.per_label {
            out.push_str(&format!(
                "{:<16} {:>12.2} {:>14.2} {:>16.2}\n",
                label,
                millions(stats.docs),
                millions(stats.tokens),
                stats.avg()
            ));
        }
        out.push_str(&format!(
            "{:<16} {:>12.2} {:>14.2} {:>16.2}\n",
            "total",
            millions(self.total.docs),
            millions(self.total.tokens),
            self.total.avg()
        ));
        out.push_str(&format!(
            "languages: {} total, {} over 100k tokens, {} over 1M tokens\n",
            self.languages_total, self.languages_over_100k, self.languages_over_1m
        ));
        out
    }
}

/// Mergeable statistics accumulator.
#[derive(Debug, Clone, Default)]
pub struct CorpusStatsBuilder {
    per_label: BTreeMap<String, LabelStats>,
    per_code: BTreeMap<String, u64>,
    total: LabelStats,
}

impl CorpusStatsBuilder {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, record: &DocumentRecord) {
        let tokens = count_tokens(&record.text);
        let label = record
            .label
            .as_ref()
            .map_or_else(|| "und_None".to_string(), |l| l.render());
        let code = record
            .label
            .as_ref()
            .map_or_else(|| "und".to_string(), |l| l.code.clone());
        let entry = self.per_label.entry(label).or_default();
        entry.docs += 1;
        entry.tokens += tokens;
        *self.per_code.entry(code).or_default() += tokens;
        self.total.docs += 1;
        self.total.tokens += tokens;
    }

    pub fn merge(&mut self, other: CorpusStatsBuilder) {
        for (label, stats) in other.per_label {
            let entry = self.per_label.entry(label).or_default();
            entry.docs += stats.docs;
            entry.tokens += stats.tokens;
        }
        for (code, tokens) in other.per_code {
            *self.per_code.entry(code).or_default() += tokens;
        }
        self.total.docs += other.total.docs;
        self.total.tokens += other.total.tokens;
    }

    pub fn finish(self) -> CorpusStats {
        let languages_total = self.per_code.len() as u64;
        let languages_over_100k = self.per_code.values().filter(|&&t| t > 100_000).count() as u64;
        let languages_over_1m =
            self.per_code.values().filter(|&&t| t > 1_000_000).count() as u64;
        CorpusStats {
            per_label: self.per_label,
            total: self.total,
            languages_total,
            languages_over_100k,
            languages_over_1m,
        }
    }
}

/// One pass over a record stream.
pub fn corpus_stats<'a>(records: impl IntoIterator<Item = &'a DocumentRecord>) -> CorpusStats {
    let mut builder = CorpusStatsBuilder::new();
    for record in records {
        builder.add(record);
    }
    builder.finish()
}

/// Per-label fractions of script-bearing codepoints per Unicode script.
/// Fractions per label sum to 1 whenever any script-bearing codepoint
/// exists.
#[derive(Debug, Clone, Default)]
pub struct BlockDistribution {
    counts: BTreeMap<String, BTreeMap<&'static str, u64>>,
}

impl BlockDistribution {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add(&mut self, record: &DocumentRecord) {
        let label = record
            .label
            .as_ref()
            .map_or_else(|| "und_None".to_string(), |l| l.render());
        let entry = self.counts.entry(label).or_default();
        for c in record.text.chars() {
            if let Some(script) = char_script(c) {
                *entry.entry(script).or_default() += 1;
            }
        }
    }

    pub fn merge(&mut self, other: BlockDistribution) {
        for (label, counts) in other.counts {
            let entry = self.counts.entry(label).or_default();
            for (script, n) in counts {
                *entry.entry(script).or_default() += n;
            }
        }
    }

    /// Fractions per label, empty for labels with no script-bearing text.
    pub fn fractions(&self) -> BTreeMap<String, BTreeMap<String, f64>> {
        let mut out = BTreeMap::new();
        for (label, counts) in &self.counts {
            let total: u64 = counts.values().sum();
            if total == 0 {
                continue;
            }
            let fr: BTreeMap<String, f64> = counts
                .iter()
                .map(|(s, n)| (s.to_string(), *n as f64 / total as f64))
                .collect();
            out.insert(label.clone(), fr);
        }
        out
    }

    /// CSV rows `label,script,fraction` for external plotting.
    pub fn render_csv(&self) -> String {
        let mut out = String::from("label,script,fraction\n");
        for (label, fractions) in self.fractions() {
            for (script, fraction) in fractions {
                out.push_str(&format!("{label},{script},{fraction:.9}\n"));
            }
        }
        out
    }
}

pub fn block_distribution<'a>(
    records: impl IntoIterator<Item = &'a DocumentRecord>,
) -> BlockDistribution {
    let mut dist = BlockDistribution::new();
    for record in records {
        dist.add(record);
    }
    dist
}

/// Document counts by source, plus registrable-domain buckets for records
/// carrying a URL.
#[derive(Debug, Clone, Default, Serialize)]
pub struct SourceDistribution {
    /// (source, documents), sorted by count descending then name.
    pub by_source: Vec<(String, u64)>,
    /// (registrable domain, documents), same order.
    pub by_domain: Vec<(String, u64)>,
}

pub fn source_distribution<'a>(
    records: impl IntoIterator<Item = &'a DocumentRecord>,
) -> SourceDistribution {
    let mut sources: HashMap<String, u64> = HashMap::new();
    let mut domains: HashMap<String, u64> = HashMap::new();
    for record in records {
        *sources.entry(record.source.clone()).or_default() += 1;
        if let Some(url) = &record.url {
            if let Some(domain) = registrable_domain(url) {
                *domains.entry(domain).or_default() += 1;
            }
        }
    }
    SourceDistribution {
        by_source: sorted_desc(sources),
        by_domain: sorted_desc(domains),
    }
}

fn sorted_desc(map: HashMap<String, u64>) -> Vec<(String, u64)> {
    let mut v: Vec<(String, u64)> = map.into_iter().collect();
    v.sort_by(|a, b| b.1.cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    v
}

/// Second-level public suffixes that push the registrable domain to three
/// labels. A compact approximation of the public-suffix list covering the
/// common country registries.
const SECOND_LEVEL_SUFFIXES: &[&str] = &[
    "ac.in", "ac.jp", "ac.th", "ac.uk", "co.id", "co.in", "co.jp", "co.kr", "co.nz", "co.th",
    "co.uk", "co.za", "com.ar", "com.au", "com.bd", "com.br", "com.cn", "com.eg", "com.hk",
    "com.mx", "com.my", "com.ph", "com.pk", "com.pl", "com.sa", "com.sg", "com.tr", "com.tw",
    "com.ua", "edu.au", "edu.in", "edu.pl", "go.jp", "go.th", "gov.au", "gov.br", "gov.cn",
    "gov.in", "gov.uk", "ne.jp", "net.au", "net.br", "net.cn", "net.in", "net.nz", "net.pl",
    "net.uk", "or.id", "or.jp", "or.kr", "or.th", "org.au", "org.br", "org.cn", "org.in",
    "org.nz", "org.pl", "org.tw", "org.ua", "org.uk",
];

/// Extract the registrable domain of a URL: the public suffix plus one
/// label. Malformed URLs and bare IPs yield `None`.
pub fn registrable_domain(url: &str) -> Option<String> {
    let parsed = url::Url::parse(url).ok()?;
    let host = parsed.host_str()?;
    if host.parse::<std::net::IpAddr>().is_ok() {
        return None;
    }
    let labels: Vec<&str> = host.trim_end_matches('.').split('.').collect();
    if labels.len() <= 1 || labels.iter().any(|l| l.is_empty()) {
        return None;
    }
    let last_two = labels[labels.len() - 2..].join(".");
    let take = if SECOND_LEVEL_SUFFIXES.binary_search(&last_two.as_str()).is_ok() {
        3
    } else {
        2
    };
    if labels.len() < take {
        return None;
    }
    Some(labels[labels.len() - take..].join("."))
}
