//! Document modification and quality filtering.
//!
//! Modification reshapes text without judging it: whitespace runs collapse to
//! single spaces, overlong words and link-like words are dropped. Filtering
//! then rejects documents on the first failing check, in a fixed order so
//! reject reasons are stable across runs:
//!
//! 1. consecutive repeating words (scraper artifacts like timestamp runs)
//! 2. word count
//! 3. character repetition (duplicate 10-gram fraction)
//! 4. word repetition (duplicate 5-gram fraction)
//! 5. special characters
//! 6. stop words
//! 7. flag words
//!
//! Scripts without whitespace word delimiters (Chinese, Japanese, Korean,
//! Thai, Lao, Burmese) skip the word-reconstruction steps entirely, and
//! word-based filters fall back to codepoint-window proxies for them.
//! Stopword/flagword checks are skipped when no lexicon exists for the
//! language. All operations are pure; documents can be processed in any
//! order on any number of workers.

use std::collections::{HashMap, HashSet};
use std::path::Path;

use serde::Deserialize;

use crate::hashing::content_hash;
use crate::record::{DocumentRecord, LanguageLabel};

/// Words containing these substrings are treated as links or page source.
pub const DEFAULT_LINK_PATTERNS: [&str; 2] = ["http", ".com"];

/// Filter thresholds. Ratios are in [0, 1]; per-language overrides are
/// applied by the pipeline config keyed on `language_Script`.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct CleaningThresholds {
    /// Minimum number of words (codepoint units for no-space scripts).
    pub min_words: usize,
    /// Words longer than this many codepoints are removed by modification.
    pub max_word_len: usize,
    /// Maximum duplicate character-n-gram fraction.
    pub char_rep_max: f64,
    /// Maximum duplicate word-n-gram fraction.
    pub word_rep_max: f64,
    /// Maximum fraction of special (non-alphanumeric, non-punctuation)
    /// codepoints.
    pub special_char_max: f64,
    /// Minimum fraction of stopword tokens, when a lexicon exists.
    pub stopword_min: f64,
    /// Maximum fraction of flagged tokens, when a lexicon exists.
    pub flagword_max: f64,
    /// n-gram size for the character repetition ratio.
    pub char_rep_ngram: usize,
    /// n-gram size for the word repetition ratio.
    pub word_rep_ngram: usize,
    /// A word repeating at least this many times consecutively rejects the
    /// document.
    pub consecutive_min_run: usize,
}

impl Default for CleaningThresholds {
    fn default() -> Self {
        CleaningThresholds {
            min_words: 5,
            max_word_len: 50,
            char_rep_max: 0.20,
            word_rep_max: 0.30,
            special_char_max: 0.40,
            stopword_min: 0.10,
            flagword_max: 0.01,
            char_rep_ngram: 10,
            word_rep_ngram: 5,
            consecutive_min_run: 3,
        }
    }
}

/// First filter a document failed, if any.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum RejectReason {
    ConsecutiveRepeat,
    WordCount,
    CharRepetition,
    WordRepetition,
    SpecialChars,
    Stopwords,
    FlagWords,
    LangMismatch,
}

impl RejectReason {
    pub fn as_str(&self) -> &'static str {
        match self {
            RejectReason::ConsecutiveRepeat => "consecutive_repeat",
            RejectReason::WordCount => "word_count",
            RejectReason::CharRepetition => "char_repetition",
            RejectReason::WordRepetition => "word_repetition",
            RejectReason::SpecialChars => "special_chars",
            RejectReason::Stopwords => "stopwords",
            RejectReason::FlagWords => "flag_words",
            RejectReason::LangMismatch => "lang_mismatch",
        }
    }
}

impl std::fmt::Display for RejectReason {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.as_str())
    }
}

/// Keep/reject decision with the first triggering reason.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CleaningVerdict {
    pub kept: bool,
    pub reason: Option<RejectReason>,
}

impl CleaningVerdict {
    pub fn keep() -> Self {
        CleaningVerdict { kept: true, reason: None }
    }

    pub fn reject(reason: RejectReason) -> Self {
        CleaningVerdict { kept: false, reason: Some(reason) }
    }
}

/// Scripts treated as lacking whitespace word delimiters.
#[derive(Debug, Clone)]
pub struct NoSpaceScriptSet {
    scripts: HashSet<&'static str>,
}

impl Default for NoSpaceScriptSet {
    fn default() -> Self {
        // Chinese, Japanese, Korean, Thai, Lao, Burmese.
        let scripts = [
            "Hani", "Hans", "Hant", "Jpan", "Hira", "Kana", "Hrkt", "Hang", "Kore", "Thai",
            "Laoo", "Mymr",
        ]
        .into_iter()
        .collect();
        NoSpaceScriptSet { scripts }
    }
}

impl NoSpaceScriptSet {
    pub fn contains_label(&self, label: Option<&LanguageLabel>) -> bool {
        label
            .and_then(|l| l.script.as_deref())
            .is_some_and(|s| self.scripts.contains(s))
    }
}

/// Collapse every maximal run of Unicode whitespace to one ASCII space and
/// strip leading/trailing whitespace. Idempotent.
pub fn standardize_whitespace(text: &str) -> String {
    let mut out = String::with_capacity(text.len());
    let mut pending_space = false;
    for c in text.chars() {
        if c.is_whitespace() {
            pending_space = !out.is_empty();
        } else {
            if pending_space {
                out.push(' ');
                pending_space = false;
            }
            out.push(c);
        }
    }
    out
}

/// Drop whitespace-delimited words longer than `max_word_len` codepoints.
/// No-op for no-space scripts, which have no meaningful word boundaries.
pub fn remove_long_words(
    text: &str,
    max_word_len: usize,
    label: Option<&LanguageLabel>,
    no_space: &NoSpaceScriptSet,
) -> String {
    if no_space.contains_label(label) {
        return text.to_string();
    }
    join_kept_words(text, |w| w.chars().count() <= max_word_len)
}

/// Drop whitespace-delimited words containing any of the given substrings.
/// No-op for no-space scripts.
pub fn remove_pattern_words(
    text: &str,
    patterns: &[&str],
    label: Option<&LanguageLabel>,
    no_space: &NoSpaceScriptSet,
) -> String {
    if no_space.contains_label(label) {
        return text.to_string();
    }
    join_kept_words(text, |w| !patterns.iter().any(|p| w.contains(p)))
}

fn join_kept_words(text: &str, keep: impl Fn(&str) -> bool) -> String {
    let mut out = String::with_capacity(text.len());
    for word in text.split_whitespace().filter(|w| keep(w)) {
        if !out.is_empty() {
            out.push(' ');
        }
        out.push_str(word);
    }
    out
}

/// Apply the full modification sequence: whitespace standardization, long
/// word removal, pattern word removal.
pub fn modify_document(
    text: &str,
    thresholds: &CleaningThresholds,
    patterns: &[&str],
    label: Option<&LanguageLabel>,
    no_space: &NoSpaceScriptSet,
) -> String {
    let text = standardize_whitespace(text);
    let text = remove_long_words(&text, thresholds.max_word_len, label, no_space);
    remove_pattern_words(&text, patterns, label, no_space)
}

/// True iff some word repeats at least `min_run` times consecutively.
pub fn has_consecutive_repeats(text: &str, min_run: usize) -> bool {
    if min_run <= 1 {
        return !text.trim().is_empty();
    }
    let mut run = 0usize;
    let mut prev: Option<&str> = None;
    for word in text.split_whitespace() {
        if prev == Some(word) {
            run += 1;
        } else {
            run = 1;
            prev = Some(word);
        }
        if run >= min_run {
            return true;
        }
    }
    false
}

/// Duplicate character n-gram fraction: occurrences beyond the first of each
/// n-gram, divided by the total n-gram count. 0 when the text is shorter
/// than `n` codepoints.
pub fn char_repetition_ratio(text: &str, n: usize) -> f64 {
    let chars: Vec<char> = text.chars().collect();
    if n == 0 || chars.len() < n {
        return 0.0;
    }
    let mut buf = Vec::with_capacity(n * 4);
    duplicate_fraction(chars.windows(n).map(|w| {
        buf.clear();
        for c in w {
            buf.extend_from_slice(&(*c as u32).to_le_bytes());
        }
        content_hash(&buf)
    }))
}

/// Duplicate word n-gram fraction over the given unit sequence.
pub fn word_repetition_ratio<S: AsRef<str>>(units: &[S], n: usize) -> f64 {
    if n == 0 || units.len() < n {
        return 0.0;
    }
    let unit_hashes: Vec<u64> = units
        .iter()
        .map(|u| content_hash(u.as_ref().as_bytes()))
        .collect();
    let mut buf = Vec::with_capacity(n * 8);
    duplicate_fraction(unit_hashes.windows(n).map(|w| {
        buf.clear();
        for h in w {
            buf.extend_from_slice(&h.to_le_bytes());
        }
        content_hash(&buf)
    }))
}

fn duplicate_fraction(grams: impl Iterator<Item = u64>) -> f64 {
    let mut seen: HashMap<u64, ()> = HashMap::new();
    let mut total = 0u64;
    let mut dups = 0u64;
    for g in grams {
        total += 1;
        if seen.insert(g, ()).is_some() {
            dups += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        dups as f64 / total as f64
    }
}

/// Punctuation that ordinary prose is allowed to contain freely.
const COMMON_PUNCT: &str = ".,;:!?'\"()[]{}<>-\u{2013}\u{2014}\u{2026}\u{00ab}\u{00bb}\
\u{201c}\u{201d}\u{2018}\u{2019}/\\&%@*+=~^_|\u{00b7}\
\u{3002}\u{3001}\u{ff0c}\u{ff1b}\u{ff1a}\u{ff1f}\u{ff01}\u{ff08}\u{ff09}\u{300a}\u{300b}\
\u{300c}\u{300d}\u{300e}\u{300f}\u{0964}\u{0965}\u{061f}\u{060c}\u{061b}";

fn is_special_char(c: char) -> bool {
    !(c.is_alphanumeric() || c.is_whitespace() || COMMON_PUNCT.contains(c))
}

/// Fraction of codepoints that are neither alphanumeric, whitespace, nor
/// common punctuation.
pub fn special_char_ratio(text: &str) -> f64 {
    let mut total = 0u64;
    let mut special = 0u64;
    for c in text.chars() {
        total += 1;
        if is_special_char(c) {
            special += 1;
        }
    }
    if total == 0 {
        0.0
    } else {
        special as f64 / total as f64
    }
}

/// The word units a filter should operate on: whitespace tokens for
/// space-delimited scripts, single codepoints for no-space scripts.
pub fn word_units(text: &str, label: Option<&LanguageLabel>, no_space: &NoSpaceScriptSet) -> Vec<String> {
    if no_space.contains_label(label) {
        text.chars()
            .filter(|c| !c.is_whitespace())
            .map(String::from)
            .collect()
    } else {
        text.split_whitespace().map(String::from).collect()
    }
}

/// Per-language stopword and flagword sets, keyed by rendered label.
#[derive(Debug, Clone, Default)]
pub struct Lexicons {
    stopwords: HashMap<String, HashSet<String>>,
    flagwords: HashMap<String, HashSet<String>>,
}

const ENG_STOPWORDS: &str = include_str!("../data/lexicons/eng_Latn/stopwords.txt");
const ENG_FLAGWORDS: &str = include_str!("../data/lexicons/eng_Latn/flagwords.txt");

fn parse_lexicon(content: &str) -> HashSet<String> {
    content
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .map(|l| l.to_lowercase())
        .collect()
}

impl Lexicons {
    /// The lexicons bundled with the crate (English only).
    pub fn builtin() -> Self {
        let mut lex = Lexicons::default();
        lex.stopwords
            .insert("eng_Latn".into(), parse_lexicon(ENG_STOPWORDS));
        lex.flagwords
            .insert("eng_Latn".into(), parse_lexicon(ENG_FLAGWORDS));
        lex
    }

    pub fn empty() -> Self {
        Lexicons::default()
    }

    /// Load `<dir>/<language_Script>/{stopwords,flagwords}.txt` for every
    /// label directory present, on top of the built-in sets.
    pub fn load_dir(dir: &Path) -> std::io::Result<Self> {
        let mut lex = Lexicons::builtin();
        for entry in std::fs::read_dir(dir)? {
            let entry = entry?;
            if !entry.file_type()?.is_dir() {
                continue;
            }
            let label = entry.file_name().to_string_lossy().to_string();
            let stop_path = entry.path().join("stopwords.txt");
            if stop_path.exists() {
                lex.stopwords
                    .insert(label.clone(), parse_lexicon(&std::fs::read_to_string(stop_path)?));
            }
            let flag_path = entry.path().join("flagwords.txt");
            if flag_path.exists() {
                lex.flagwords
                    .insert(label.clone(), parse_lexicon(&std::fs::read_to_string(flag_path)?));
            }
        }
        Ok(lex)
    }

    pub fn stopwords_for(&self, label: Option<&LanguageLabel>) -> Option<&HashSet<String>> {
        self.stopwords.get(&label?.render())
    }

    pub fn flagwords_for(&self, label: Option<&LanguageLabel>) -> Option<&HashSet<String>> {
        self.flagwords.get(&label?.render())
    }
}

/// Evaluate the document filters in fixed order and report the first
/// failure. The record's text is expected to be already modified.
pub fn filter_document(
    record: &DocumentRecord,
    thresholds: &CleaningThresholds,
    lexicons: &Lexicons,
    no_space: &NoSpaceScriptSet,
) -> CleaningVerdict {
    let label = record.label.as_ref();
    let text = &record.text;

    if has_consecutive_repeats(text, thresholds.consecutive_min_run) {
        return CleaningVerdict::reject(RejectReason::ConsecutiveRepeat);
    }

    let units = word_units(text, label, no_space);
    if units.len() < thresholds.min_words {
        return CleaningVerdict::reject(RejectReason::WordCount);
    }
    if char_repetition_ratio(text, thresholds.char_rep_ngram) > thresholds.char_rep_max {
        return CleaningVerdict::reject(RejectReason::CharRepetition);
    }
    if word_repetition_ratio(&units, thresholds.word_rep_ngram) > thresholds.word_rep_max {
        return CleaningVerdict::reject(RejectReason::WordRepetition);
    }
    if special_char_ratio(text) > thresholds.special_char_max {
        return CleaningVerdict::reject(RejectReason::SpecialChars);
    }
    if let Some(stopwords) = lexicons.stopwords_for(label) {
        let hits = units
            .iter()
            .filter(|u| stopwords.contains(&u.to_lowercase()))
            .count();
        if (hits as f64) / (units.len() as f64) < thresholds.stopword_min {
            return CleaningVerdict::reject(RejectReason::Stopwords);
        }
    }
    if let Some(flagwords) = lexicons.flagwords_for(label) {
        let hits = units
            .iter()
            .filter(|u| flagwords.contains(&u.to_lowercase()))
            .count();
        if (hits as f64) / (units.len() as f64) > thresholds.flagword_max {
            return CleaningVerdict::reject(RejectReason::FlagWords);
        }
    }
    CleaningVerdict::keep()
}

/// A pluggable language-identification component. Implementations must be
/// safe for concurrent queries or wrapped in a serializing adapter.
pub trait LanguageClassifier: Send + Sync {
    /// Whether the classifier supports this ISO 639-3 code at all.
    fn supports(&self, code: &str) -> bool;
    /// Top predicted code with confidence, or `None` when undecidable.
    fn classify(&self, text: &str) -> Result<Option<(String, f64)>, String>;
}

/// A classifier supporting no languages: every document passes through.
pub struct NoClassifier;

impl LanguageClassifier for NoClassifier {
    fn supports(&self, _code: &str) -> bool {
        false
    }
    fn classify(&self, _text: &str) -> Result<Option<(String, f64)>, String> {
        Ok(None)
    }
}

/// Re-check the declared language against a classifier. Unsupported
/// languages pass through — the source's identification is trusted — and so
/// do classifier failures, which must not corrupt the corpus.
pub fn re_identify_language(
    record: &DocumentRecord,
    classifier: &dyn LanguageClassifier,
    min_confidence: f64,
) -> CleaningVerdict {
    let Some(label) = record.label.as_ref() else {
        return CleaningVerdict::keep();
    };
    if !classifier.supports(&label.code) {
        return CleaningVerdict::keep();
    }
    match classifier.classify(&record.text) {
        Ok(Some((code, confidence))) if code != label.code && confidence >= min_confidence => {
            CleaningVerdict::reject(RejectReason::LangMismatch)
        }
        _ => CleaningVerdict::keep(),
    }
}

/// Code-file retention rule with per-fork-count tiers. Files forked 15–25
/// times (inclusive) fall in the middle tier.
pub fn filter_code_file(avg_line_len: f64, max_line_len: u64, alnum_frac: f64, forks: u64) -> bool {
    if forks > 25 {
        avg_line_len < 120.0 && max_line_len < 300 && alnum_frac > 0.30
    } else if forks >= 15 {
        avg_line_len < 90.0 && max_line_len < 150 && alnum_frac > 0.40
    } else {
        avg_line_len < 80.0 && max_line_len < 120 && alnum_frac > 0.45
    }
}

/// Line-length and alphanumeric metrics for [`filter_code_file`].
pub fn code_file_metrics(text: &str) -> (f64, u64, f64) {
    let mut lines = 0u64;
    let mut total_len = 0u64;
    let mut max_len = 0u64;
    let mut alnum = 0u64;
    let mut chars = 0u64;
    for line in text.lines() {
        let len = line.chars().count() as u64;
        lines += 1;
        total_len += len;
        max_len = max_len.max(len);
        for c in line.chars() {
            chars += 1;
            if c.is_alphanumeric() {
                alnum += 1;
            }
        }
    }
    let avg = if lines == 0 { 0.0 } else { total_len as f64 / lines as f64 };
    let frac = if chars == 0 { 0.0 } else { alnum as f64 / chars as f64 };
    (avg, max_len, frac)
}
