//! Language code normalization to ISO 639-3.
//!
//! Sources declare languages as ISO 639-1/2/3 codes, legacy codes, collective
//! family codes, or plain names with assorted spellings. Resolution follows a
//! fixed priority so results are deterministic and idempotent:
//!
//! 1. exact ISO 639-3 code (including the `qaa`–`qtz` private-use range)
//! 2. ISO 639-1 / 639-2 variant mapping to 639-3
//! 3. retirement/merge table (e.g. codes merged into another language)
//! 4. known family/group codes, retained verbatim
//! 5. language-name lookup with misspelling correction
//! 6. retention of the original code, counted as unresolved
//!
//! Tables are plain tab-separated data files; the built-in set can be
//! replaced by pointing the pipeline config at a table directory.

use std::collections::{BTreeMap, HashMap, HashSet};
use std::fmt;
use std::path::Path;

use thiserror::Error;
use unicode_normalization::char::is_combining_mark;
use unicode_normalization::UnicodeNormalization;

use crate::record::LanguageLabel;

#[derive(Debug, Error)]
pub enum TableError {
    #[error("cannot read table {name}: {source}")]
    Io {
        name: String,
        #[source]
        source: std::io::Error,
    },
    #[error("table {name} line {line}: expected at least {expected} tab-separated fields")]
    Malformed {
        name: String,
        line: usize,
        expected: usize,
    },
}

/// How an input code or name was resolved.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum ResolutionKind {
    /// Already a valid ISO 639-3 code.
    Exact,
    /// Mapped from an ISO 639-1 code or an ISO 639-2 variant.
    PartMapped,
    /// A retired code updated to the language it was merged into.
    MergedInto,
    /// A known family/group code (ISO 639-2 collective), retained verbatim.
    RetainedGroup,
    /// Resolved by (possibly corrected) language-name lookup.
    NameCorrected,
    /// Nothing matched; the original code is retained and counted.
    Unresolved,
}

impl fmt::Display for ResolutionKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            ResolutionKind::Exact => "exact",
            ResolutionKind::PartMapped => "part_mapped",
            ResolutionKind::MergedInto => "merged_into",
            ResolutionKind::RetainedGroup => "retained_group",
            ResolutionKind::NameCorrected => "name_corrected",
            ResolutionKind::Unresolved => "unresolved",
        };
        f.write_str(s)
    }
}

/// Outcome of normalizing one declared code or name.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CodeResolution {
    pub input: String,
    pub resolved: String,
    pub kind: ResolutionKind,
}

impl CodeResolution {
    /// True when the resolved code does not conform to individual ISO 639-3.
    pub fn retained_original(&self) -> bool {
        matches!(
            self.kind,
            ResolutionKind::RetainedGroup | ResolutionKind::Unresolved
        )
    }
}

/// Immutable resolution tables, loaded once and shared across workers.
#[derive(Debug, Clone)]
pub struct ResolutionTables {
    exact: HashSet<String>,
    part_map: HashMap<String, String>,
    merges: HashMap<String, String>,
    groups: BTreeMap<String, String>,
    /// canonical name -> code
    name_to_code: HashMap<String, String>,
    /// folded form -> canonical name(s); folding collisions keep all
    canonical_names: Vec<String>,
}

const ISO639_TSV: &str = include_str!("../data/iso639.tsv");
const VARIANTS_TSV: &str = include_str!("../data/iso639_variants.tsv");
const RETIRED_TSV: &str = include_str!("../data/iso639_retired.tsv");
const GROUPS_TSV: &str = include_str!("../data/iso639_groups.tsv");

fn tsv_rows(name: &str, content: &str, expected: usize) -> Result<Vec<Vec<String>>, TableError> {
    let mut rows = Vec::new();
    for (i, raw) in content.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let fields: Vec<String> = line.split('\t').map(|f| f.trim().to_string()).collect();
        if fields.len() < expected {
            return Err(TableError::Malformed {
                name: name.to_string(),
                line: i + 1,
                expected,
            });
        }
        rows.push(fields);
    }
    Ok(rows)
}

impl ResolutionTables {
    /// The tables bundled with the crate.
    pub fn builtin() -> ResolutionTables {
        Self::from_contents(ISO639_TSV, VARIANTS_TSV, RETIRED_TSV, GROUPS_TSV)
            .expect("bundled tables are well-formed")
    }

    /// Load tables from a directory holding `iso639.tsv`, `iso639_variants.tsv`,
    /// `iso639_retired.tsv`, and `iso639_groups.tsv`. Missing files fall back
    /// to the bundled versions.
    pub fn from_dir(dir: &Path) -> Result<ResolutionTables, TableError> {
        let read = |file: &str, fallback: &str| -> Result<String, TableError> {
            let path = dir.join(file);
            if path.exists() {
                std::fs::read_to_string(&path).map_err(|source| TableError::Io {
                    name: path.display().to_string(),
                    source,
                })
            } else {
                Ok(fallback.to_string())
            }
        };
        Self::from_contents(
            &read("iso639.tsv", ISO639_TSV)?,
            &read("iso639_variants.tsv", VARIANTS_TSV)?,
            &read("iso639_retired.tsv", RETIRED_TSV)?,
            &read("iso639_groups.tsv", GROUPS_TSV)?,
        )
    }

    fn from_contents(
        iso639: &str,
        variants: &str,
        retired: &str,
        groups: &str,
    ) -> Result<ResolutionTables, TableError> {
        let mut exact = HashSet::new();
        let mut part_map = HashMap::new();
        let mut name_to_code = HashMap::new();
        let mut canonical_names = Vec::new();

        for row in tsv_rows("iso639.tsv", iso639, 3)? {
            let (alpha1, alpha3, name) = (&row[0], &row[1], &row[2]);
            exact.insert(alpha3.clone());
            if alpha1 != "-" {
                part_map.insert(alpha1.clone(), alpha3.clone());
            }
            if name_to_code.insert(name.clone(), alpha3.clone()).is_none() {
                canonical_names.push(name.clone());
            }
        }
        for row in tsv_rows("iso639_variants.tsv", variants, 2)? {
            part_map.insert(row[0].clone(), row[1].clone());
        }
        let mut merges = HashMap::new();
        for row in tsv_rows("iso639_retired.tsv", retired, 2)? {
            merges.insert(row[0].clone(), row[1].clone());
        }
        let mut group_map = BTreeMap::new();
        for row in tsv_rows("iso639_groups.tsv", groups, 2)? {
            group_map.insert(row[0].clone(), row[1].clone());
        }
        Ok(ResolutionTables {
            exact,
            part_map,
            merges,
            groups: group_map,
            name_to_code,
            canonical_names,
        })
    }

    pub fn is_exact(&self, code: &str) -> bool {
        self.exact.contains(code) || is_private_use(code)
    }

    pub fn is_group(&self, code: &str) -> bool {
        self.groups.contains_key(code)
    }

    pub fn canonical_names(&self) -> &[String] {
        &self.canonical_names
    }

    /// Resolve a declared code or language name. Never fails: inputs that
    /// match nothing are retained as-is with kind `Unresolved`.
    pub fn normalize_code(&self, input: &str) -> CodeResolution {
        let trimmed = input.trim();
        let folded = trimmed.to_ascii_lowercase();

        if self.is_exact(&folded) {
            return CodeResolution {
                input: input.to_string(),
                resolved: folded,
                kind: ResolutionKind::Exact,
            };
        }
        if let Some(target) = self.part_map.get(&folded) {
            // A variant may map onto a collective code (e.g. legacy `bh`).
            let kind = if self.is_group(target) {
                ResolutionKind::RetainedGroup
            } else {
                ResolutionKind::PartMapped
            };
            return CodeResolution {
                input: input.to_string(),
                resolved: target.clone(),
                kind,
            };
        }
        if let Some(target) = self.merges.get(&folded) {
            return CodeResolution {
                input: input.to_string(),
                resolved: target.clone(),
                kind: ResolutionKind::MergedInto,
            };
        }
        if self.groups.contains_key(&folded) {
            return CodeResolution {
                input: input.to_string(),
                resolved: folded,
                kind: ResolutionKind::RetainedGroup,
            };
        }
        if let Some(canonical) = correct_name(trimmed, &self.canonical_names) {
            if let Some(code) = self.name_to_code.get(&canonical) {
                return CodeResolution {
                    input: input.to_string(),
                    resolved: code.clone(),
                    kind: ResolutionKind::NameCorrected,
                };
            }
        }
        CodeResolution {
            input: input.to_string(),
            resolved: trimmed.to_string(),
            kind: ResolutionKind::Unresolved,
        }
    }
}

/// `qaa`–`qtz` is reserved for local use and accepted as valid ISO 639-3.
fn is_private_use(code: &str) -> bool {
    let b = code.as_bytes();
    b.len() == 3
        && b[0] == b'q'
        && (b'a'..=b't').contains(&b[1])
        && b[2].is_ascii_lowercase()
}

/// Case- and diacritic-fold a name for comparison.
fn fold_name(name: &str) -> String {
    name.nfd()
        .filter(|c| !is_combining_mark(*c))
        .flat_map(char::to_lowercase)
        .collect()
}

/// Levenshtein distance at most 1, without building the full matrix.
fn within_one_edit(a: &str, b: &str) -> bool {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    let (short, long) = if a.len() <= b.len() { (&a, &b) } else { (&b, &a) };
    match long.len() - short.len() {
        0 => short.iter().zip(long.iter()).filter(|(x, y)| x != y).count() <= 1,
        1 => {
            // one insertion into the shorter string
            let mut i = 0;
            let mut j = 0;
            let mut skipped = false;
            while i < short.len() && j < long.len() {
                if short[i] == long[j] {
                    i += 1;
                    j += 1;
                } else if skipped {
                    return false;
                } else {
                    skipped = true;
                    j += 1;
                }
            }
            true
        }
        _ => false,
    }
}

/// Find the unique canonical name within edit distance 1 of `name` after
/// case/diacritic folding. Returns `None` when no candidate matches or when
/// several do — ambiguous corrections must not silently relabel a language.
pub fn correct_name<S: AsRef<str>>(name: &str, canonical: &[S]) -> Option<String> {
    let folded = fold_name(name);
    let mut found: Option<&str> = None;
    for candidate in canonical {
        let c = candidate.as_ref();
        if within_one_edit(&folded, &fold_name(c)) {
            if found.is_some() {
                return None;
            }
            found = Some(c);
        }
    }
    found.map(|s| s.to_string())
}

/// Compose the `code_Script` label from a resolved code and detected script.
pub fn make_label(code: &str, script: Option<&str>) -> LanguageLabel {
    LanguageLabel::new(code, script.map(|s| s.to_string()))
}
