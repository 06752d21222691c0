//! Shared synthetic-corpus machinery for the integration tests.
//!
//! Everything is generated from a seeded RNG so fixtures are reproducible.
//! Each language draws words from its own script's codepoint range; English
//! documents mix in stopwords so they pass the lexicon filters.

#![allow(dead_code)]

use std::collections::HashSet;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub const STOPWORDS: [&str; 12] = [
    "the", "of", "and", "to", "in", "is", "that", "for", "with", "was", "on", "as",
];

#[derive(Debug, Clone, Copy)]
pub struct SynthLanguage {
    /// Code as a source dataset would declare it.
    pub declared: &'static str,
    /// ISO 639-3 code after normalization.
    pub resolved: &'static str,
    /// Script the fixture text is written in.
    pub script: &'static str,
    /// Codepoint range words are drawn from.
    pub range: (u32, u32),
    /// Whether the script joins words without spaces.
    pub spaceless: bool,
}

/// Languages across ten scripts, declared with a mix of ISO 639-1 codes,
/// ISO 639-3 codes, legacy codes, and one group code.
pub const LANGUAGES: [SynthLanguage; 12] = [
    SynthLanguage { declared: "en", resolved: "eng", script: "Latn", range: (0x61, 0x7A), spaceless: false },
    SynthLanguage { declared: "de", resolved: "deu", script: "Latn", range: (0x61, 0x7A), spaceless: false },
    SynthLanguage { declared: "ru", resolved: "rus", script: "Cyrl", range: (0x430, 0x44F), spaceless: false },
    SynthLanguage { declared: "el", resolved: "ell", script: "Grek", range: (0x3B1, 0x3C9), spaceless: false },
    SynthLanguage { declared: "zh", resolved: "zho", script: "Hani", range: (0x4E00, 0x4FFF), spaceless: true },
    SynthLanguage { declared: "hi", resolved: "hin", script: "Deva", range: (0x905, 0x939), spaceless: false },
    SynthLanguage { declared: "ar", resolved: "ara", script: "Arab", range: (0x627, 0x64A), spaceless: false },
    SynthLanguage { declared: "ka", resolved: "kat", script: "Geor", range: (0x10D0, 0x10F0), spaceless: false },
    SynthLanguage { declared: "ko", resolved: "kor", script: "Hang", range: (0xAC00, 0xACFF), spaceless: true },
    SynthLanguage { declared: "th", resolved: "tha", script: "Thai", range: (0xE01, 0xE2E), spaceless: true },
    SynthLanguage { declared: "he", resolved: "heb", script: "Hebr", range: (0x5D0, 0x5EA), spaceless: false },
    SynthLanguage { declared: "mol", resolved: "ron", script: "Latn", range: (0x61, 0x7A), spaceless: false },
];

pub fn synth_word(rng: &mut ChaCha8Rng, lang: &SynthLanguage) -> String {
    let len = rng.random_range(3..9);
    (0..len)
        .filter_map(|_| char::from_u32(rng.random_range(lang.range.0..=lang.range.1)))
        .collect()
}

/// One single-line document that passes the default cleaning filters.
pub fn synth_doc(rng: &mut ChaCha8Rng, lang: &SynthLanguage, words: usize) -> String {
    let mut out = String::new();
    if lang.spaceless {
        let chars = words * 3;
        for _ in 0..chars {
            if let Some(c) = char::from_u32(rng.random_range(lang.range.0..=lang.range.1)) {
                out.push(c);
            }
        }
        return out;
    }
    for i in 0..words {
        if i > 0 {
            out.push(' ');
        }
        if lang.resolved == "eng" && rng.random_range(0..4u8) == 0 {
            out.push_str(STOPWORDS[rng.random_range(0..STOPWORDS.len())]);
        } else {
            out.push_str(&synth_word(rng, lang));
        }
    }
    out
}

/// Replace `k` words, spaced apart, to create a near-duplicate with a
/// predictable shingle-set Jaccard.
pub fn perturb_words(rng: &mut ChaCha8Rng, text: &str, lang: &SynthLanguage, k: usize) -> String {
    let mut words: Vec<String> = text.split_whitespace().map(String::from).collect();
    let stride = (words.len() / (k + 1)).max(6);
    for i in 0..k {
        let pos = (i + 1) * stride;
        if pos < words.len() {
            words[pos] = synth_word(rng, lang);
        }
    }
    words.join(" ")
}

pub struct FixtureSpec {
    /// Approximate corpus size in bytes.
    pub target_bytes: usize,
    /// Fraction of lines duplicated verbatim from earlier lines.
    pub exact_dup_share: f64,
    /// Fraction of lines that are near-duplicates of earlier lines.
    pub near_dup_share: f64,
    /// Plant documents that the cleaning filters must reject.
    pub plant_rejects: bool,
    pub seed: u64,
}

pub struct Fixture {
    pub dir: PathBuf,
    pub manifest_path: PathBuf,
}

/// Write a multilingual corpus under `root/in`: two files per language plus
/// a digit-only dataset, and a manifest covering them all.
pub fn write_fixture(root: &Path, spec: &FixtureSpec) -> Fixture {
    let input_dir = root.join("in");
    std::fs::create_dir_all(&input_dir).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(spec.seed);
    let mut manifest_files = String::new();

    let per_file = spec.target_bytes / (LANGUAGES.len() * 2);
    for lang in &LANGUAGES {
        for file_no in 0..2 {
            let name = format!("{}_{file_no}.txt", lang.declared);
            let mut content = String::new();
            let mut lines: Vec<String> = Vec::new();
            while content.len() < per_file {
                let draw: f64 = rng.random();
                let line = if !lines.is_empty() && draw < spec.exact_dup_share {
                    lines[rng.random_range(0..lines.len())].clone()
                } else if !lines.is_empty() && !lang.spaceless && draw < spec.exact_dup_share + spec.near_dup_share {
                    let base = lines[rng.random_range(0..lines.len())].clone();
                    perturb_words(&mut rng, &base, lang, 2)
                } else if spec.plant_rejects && draw > 0.995 {
                    // scraper junk: a run of repeated timestamps
                    "2020-01-01 2020-01-01 2020-01-01 2020-01-01".to_string()
                } else if spec.plant_rejects && draw > 0.99 {
                    "hi".to_string()
                } else {
                    let words = rng.random_range(120..220);
                    synth_doc(&mut rng, lang, words)
                };
                content.push_str(&line);
                content.push('\n');
                lines.push(line);
            }
            std::fs::write(input_dir.join(&name), &content).unwrap();
            let _ = writeln!(
                manifest_files,
                r#"    {{"path": "{name}", "collection": "synth", "source": "synth-{declared}-{file_no}", "original_code": "{declared}"}},"#,
                declared = lang.declared
            );
        }
    }

    // A digit-only dataset: script detection must fall through to the
    // default map (bel → Cyrl).
    let digits = (0..50).map(|i| format!("{} {}", i * 37, i * 91)).collect::<Vec<_>>().join("\n");
    std::fs::write(input_dir.join("be_digits.txt"), format!("{digits}\n")).unwrap();
    let _ = writeln!(
        manifest_files,
        r#"    {{"path": "be_digits.txt", "collection": "synth", "source": "synth-be", "original_code": "be"}}"#
    );

    let manifest = format!("{{\n  \"files\": [\n{manifest_files}  ]\n}}\n");
    let manifest_path = input_dir.join("manifest.json");
    std::fs::write(&manifest_path, manifest).unwrap();
    Fixture {
        dir: root.to_path_buf(),
        manifest_path,
    }
}

/// A pipeline config JSON for a fixture, pointing output at `root/<out>`.
pub fn write_config(root: &Path, out: &str, seed: u64, workers: usize) -> PathBuf {
    let config = format!(
        r#"{{
  "manifest": "in/manifest.json",
  "output_root": "{out}",
  "seed": {seed},
  "workers": {workers},
  "mix": {{
    "rates": {{
      "mono high EN": 0.5,
      "mono high": 0.5,
      "mono medium-high": 1.0,
      "mono medium": 1.0,
      "mono medium-low": 1.0,
      "mono low": 2.0
    }}
  }}
}}
"#
    );
    let path = root.join(format!("config_{out}.json"));
    std::fs::write(&path, config).unwrap();
    path
}

/// All doc_ids in a corpus version directory (recursively).
pub fn doc_id_set(version_dir: &Path) -> HashSet<u64> {
    let mut ids = HashSet::new();
    collect_ids(version_dir, &mut ids);
    ids
}

fn collect_ids(dir: &Path, ids: &mut HashSet<u64>) {
    if !dir.is_dir() {
        return;
    }
    for entry in std::fs::read_dir(dir).unwrap() {
        let path = entry.unwrap().path();
        if path.is_dir() {
            collect_ids(&path, ids);
        } else if path.extension().is_some_and(|e| e == "jsonl") {
            for record in babelprep::pipeline::read_shard(&path).unwrap() {
                ids.insert(record.doc_id);
            }
        }
    }
}

/// Byte-compare two directory trees; returns the first differing relative
/// path, if any.
pub fn tree_diff(a: &Path, b: &Path) -> Option<String> {
    let list = |root: &Path| -> Vec<PathBuf> {
        let mut files = Vec::new();
        fn walk(dir: &Path, root: &Path, files: &mut Vec<PathBuf>) {
            if !dir.is_dir() {
                return;
            }
            for entry in std::fs::read_dir(dir).unwrap() {
                let path = entry.unwrap().path();
                if path.is_dir() {
                    walk(&path, root, files);
                } else {
                    files.push(path.strip_prefix(root).unwrap().to_path_buf());
                }
            }
        }
        walk(root, root, &mut files);
        files.sort();
        files
    };
    let files_a = list(a);
    let files_b = list(b);
    if files_a != files_b {
        let set_a: HashSet<_> = files_a.iter().collect();
        let set_b: HashSet<_> = files_b.iter().collect();
        let missing = files_a
            .iter()
            .find(|f| !set_b.contains(f))
            .or_else(|| files_b.iter().find(|f| !set_a.contains(f)));
        return missing.map(|f| format!("file set differs at {}", f.display()));
    }
    for file in files_a {
        let bytes_a = std::fs::read(a.join(&file)).unwrap();
        let bytes_b = std::fs::read(b.join(&file)).unwrap();
        if bytes_a != bytes_b {
            return Some(format!("content differs at {}", file.display()));
        }
    }
    None
}
