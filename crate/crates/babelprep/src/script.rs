//! Writing-system recognition (ISO 15924).
//!
//! Each dataset gets a single dominant script, resolved by a fallback chain:
//!
//! 1. dominant script of a 100-line uniform random sample (seeded)
//! 2. dominant script of the first line of that sample
//! 3. the script previously detected for the same language
//! 4. a default language→script map
//! 5. `None`
//!
//! Dominance is counted over script-bearing codepoints only — Common and
//! Inherited codepoints are excluded so punctuation and digits cannot win.
//! Code-mixing is deliberately not modeled: one script per dataset.

use std::collections::{BTreeMap, HashMap};
use std::path::Path;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;
use unicode_script::{Script, UnicodeScript};

/// Lines drawn from a dataset when voting on its script.
pub const DEFAULT_SAMPLE_LINES: usize = 100;
/// Share of script-bearing codepoints the winner must reach.
pub const DEFAULT_MIN_FRACTION: f64 = 0.5;
/// Sampled lines are truncated to this many codepoints before counting, so
/// one enormous line cannot exhaust memory or dominate the vote.
pub const MAX_CHUNK_CODEPOINTS: usize = 2000;

#[derive(Debug, Error)]
pub enum ScriptError {
    #[error("cannot read default-script map {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("default-script map line {line}: expected `code<TAB>Script`")]
    Malformed { line: usize },
}

/// The ISO 15924 code of a codepoint's script, or `None` for Common,
/// Inherited, and Unknown codepoints.
pub fn char_script(c: char) -> Option<&'static str> {
    match c.script() {
        Script::Common | Script::Inherited | Script::Unknown => None,
        s => Some(s.short_name()),
    }
}

/// Codepoint-script tallies for a text sample.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ScriptVote {
    counts: BTreeMap<&'static str, u64>,
    total: u64,
}

impl ScriptVote {
    pub fn new() -> Self {
        Self::default()
    }

    /// Count the script-bearing codepoints of `text`, truncated to
    /// [`MAX_CHUNK_CODEPOINTS`].
    pub fn add_line(&mut self, text: &str) {
        for c in text.chars().take(MAX_CHUNK_CODEPOINTS) {
            if let Some(script) = char_script(c) {
                *self.counts.entry(script).or_insert(0) += 1;
                self.total += 1;
            }
        }
    }

    pub fn counts(&self) -> &BTreeMap<&'static str, u64> {
        &self.counts
    }

    pub fn total(&self) -> u64 {
        self.total
    }
}

/// Pick the majority script of a vote: the unique argmax whose share of the
/// total is at least `min_fraction`. Ties and empty votes are inconclusive.
pub fn dominant_script(vote: &ScriptVote, min_fraction: f64) -> Option<String> {
    if vote.total == 0 {
        return None;
    }
    let max = vote.counts.values().copied().max()?;
    let mut winners = vote.counts.iter().filter(|(_, &n)| n == max);
    let (script, _) = winners.next()?;
    if winners.next().is_some() {
        return None; // tie
    }
    if (max as f64) / (vote.total as f64) >= min_fraction {
        Some((*script).to_string())
    } else {
        None
    }
}

/// Language → default script, the last resort of the fallback chain.
#[derive(Debug, Clone, Default)]
pub struct DefaultScriptMap {
    map: HashMap<String, String>,
}

const DEFAULT_SCRIPTS_TSV: &str = include_str!("../data/default_scripts.tsv");

impl DefaultScriptMap {
    pub fn builtin() -> Self {
        Self::parse("builtin", DEFAULT_SCRIPTS_TSV).expect("bundled map is well-formed")
    }

    pub fn from_file(path: &Path) -> Result<Self, ScriptError> {
        let content = std::fs::read_to_string(path).map_err(|source| ScriptError::Io {
            path: path.display().to_string(),
            source,
        })?;
        Self::parse(&path.display().to_string(), &content)
    }

    fn parse(_name: &str, content: &str) -> Result<Self, ScriptError> {
        let mut map = HashMap::new();
        for (i, raw) in content.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let (code, script) = line
                .split_once('\t')
                .ok_or(ScriptError::Malformed { line: i + 1 })?;
            if !crate::record::is_script_shaped(script.trim()) {
                return Err(ScriptError::Malformed { line: i + 1 });
            }
            map.insert(code.trim().to_string(), script.trim().to_string());
        }
        Ok(DefaultScriptMap { map })
    }

    pub fn get(&self, code: &str) -> Option<&str> {
        self.map.get(code).map(String::as_str)
    }

    pub fn insert(&mut self, code: impl Into<String>, script: impl Into<String>) {
        self.map.insert(code.into(), script.into());
    }
}

/// Select a uniform random sample of `k` line indices (all of them when the
/// dataset has fewer), returned in dataset order so "first line of the
/// sample" is well-defined.
fn sample_indices(n: usize, k: usize, seed: u64) -> Vec<usize> {
    if n <= k {
        return (0..n).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut idx: Vec<usize> = rand::seq::index::sample(&mut rng, n, k).into_vec();
    idx.sort_unstable();
    idx
}

/// Run the full fallback chain over a dataset's lines. Never fails to
/// return: every dataset receives a script or `None`.
pub fn detect_script<S: AsRef<str>>(
    lines: &[S],
    language: &str,
    history: &HashMap<String, String>,
    defaults: &DefaultScriptMap,
    seed: u64,
) -> Option<String> {
    let indices = sample_indices(lines.len(), DEFAULT_SAMPLE_LINES, seed);

    let mut vote = ScriptVote::new();
    for &i in &indices {
        vote.add_line(lines[i].as_ref());
    }
    if let Some(script) = dominant_script(&vote, DEFAULT_MIN_FRACTION) {
        return Some(script);
    }

    if let Some(&first) = indices.first() {
        let mut first_vote = ScriptVote::new();
        first_vote.add_line(lines[first].as_ref());
        if let Some(script) = dominant_script(&first_vote, DEFAULT_MIN_FRACTION) {
            return Some(script);
        }
    }

    if let Some(script) = history.get(language) {
        return Some(script.clone());
    }
    defaults.get(language).map(str::to_string)
}
