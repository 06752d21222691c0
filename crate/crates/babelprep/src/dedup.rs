//! Near-deduplication (MinHash + LSH) and exact deduplication (MD5).
//!
//! Runs per `language_Script` partition, in document-id order, so the kept
//! set is deterministic: the representative of every duplicate group is the
//! group's earliest document. Near-dedup first, exact dedup second.
//!
//! - Shingles are word 5-grams for space-delimited scripts and codepoint
//!   5-grams for no-space scripts. Documents shorter than one window yield a
//!   singleton whole-text shingle; empty documents get a sentinel signature
//!   that never matches anything.
//! - The hash family is seeded 64-bit multiply-shift permutations over a
//!   base content hash — reproducible across platforms and releases.
//! - Band parameters minimize the integrated false-positive/false-negative
//!   area of the LSH S-curve `P(J) = 1 - (1 - J^r)^b` around the threshold.
//! - Duplicate confirmation trusts the signature estimate at the declared
//!   threshold; true Jaccard is not recomputed.
//!
//! The LSH index can run fully in memory or with disk-backed signatures
//! (`spill_dir`), and an optional memory budget turns overruns into a hard
//! error instead of an OOM kill.

use std::collections::{BTreeSet, HashMap, HashSet};
use std::fs::File;
use std::io::Write;
use std::os::unix::fs::FileExt;
use std::path::PathBuf;

use md5::{Digest, Md5};
use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::clean::NoSpaceScriptSet;
use crate::hashing::content_hash;
use crate::record::{DocumentRecord, LanguageLabel};

#[derive(Debug, Error)]
pub enum DedupError {
    #[error("dedup memory budget of {budget} bytes exceeded (approx {used} bytes in use)")]
    MemoryBudget { budget: u64, used: u64 },
    #[error("spill storage: {0}")]
    Io(#[from] std::io::Error),
}

/// Shingling unit, chosen from the document's script.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShingleUnit {
    Word,
    Codepoint,
}

impl ShingleUnit {
    pub fn for_label(label: Option<&LanguageLabel>, no_space: &NoSpaceScriptSet) -> ShingleUnit {
        if no_space.contains_label(label) {
            ShingleUnit::Codepoint
        } else {
            ShingleUnit::Word
        }
    }
}

/// The set of n-gram shingles of a text. Duplicates collapse (set
/// semantics); texts shorter than one window yield the whole text as a
/// single shingle; empty texts yield the empty set.
pub fn shingle(text: &str, n: usize, unit: ShingleUnit) -> HashSet<String> {
    assert!(n >= 1, "shingle size must be at least 1");
    match unit {
        ShingleUnit::Word => {
            let words: Vec<&str> = text.split_whitespace().collect();
            if words.is_empty() {
                return HashSet::new();
            }
            if words.len() < n {
                return HashSet::from([words.join(" ")]);
            }
            words.windows(n).map(|w| w.join(" ")).collect()
        }
        ShingleUnit::Codepoint => {
            let chars: Vec<char> = text.chars().collect();
            if chars.is_empty() {
                return HashSet::new();
            }
            if chars.len() < n {
                return HashSet::from([chars.iter().collect()]);
            }
            chars.windows(n).map(|w| w.iter().collect()).collect()
        }
    }
}

/// Per-permutation minima over a document's shingle set.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct MinHashSignature {
    minima: Vec<u64>,
    empty: bool,
}

impl MinHashSignature {
    pub fn num_perm(&self) -> usize {
        self.minima.len()
    }

    /// Flagged for documents with no shingles; never considered similar to
    /// anything, including another empty signature.
    pub fn is_empty(&self) -> bool {
        self.empty
    }

    pub fn minima(&self) -> &[u64] {
        &self.minima
    }
}

/// Seeded multiply-shift permutation family shared across documents.
#[derive(Debug, Clone)]
pub struct MinHasher {
    params: Vec<(u64, u64)>,
}

impl MinHasher {
    pub fn new(num_perm: usize, seed: u64) -> MinHasher {
        assert!(num_perm >= 16, "at least 16 permutations required");
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let params = (0..num_perm)
            .map(|_| (rng.next_u64() | 1, rng.next_u64()))
            .collect();
        MinHasher { params }
    }

    pub fn num_perm(&self) -> usize {
        self.params.len()
    }

    pub fn sign<S: AsRef<str>>(&self, shingles: impl IntoIterator<Item = S>) -> MinHashSignature {
        let mut minima = vec![u64::MAX; self.params.len()];
        let mut empty = true;
        for shingle in shingles {
            empty = false;
            let base = content_hash(shingle.as_ref().as_bytes());
            for (m, (a, b)) in minima.iter_mut().zip(&self.params) {
                let h = a.wrapping_mul(base).wrapping_add(*b);
                if h < *m {
                    *m = h;
                }
            }
        }
        MinHashSignature { minima, empty }
    }
}

/// Compute a signature with a fresh permutation family.
pub fn minhash(shingles: &HashSet<String>, num_perm: usize, seed: u64) -> MinHashSignature {
    MinHasher::new(num_perm, seed).sign(shingles)
}

/// Fraction of matching minima — an unbiased estimate of Jaccard
/// similarity. Sentinel (empty) signatures estimate 0 against everything.
pub fn estimate_jaccard(a: &MinHashSignature, b: &MinHashSignature) -> f64 {
    assert_eq!(a.num_perm(), b.num_perm(), "signature widths differ");
    if a.empty || b.empty {
        return 0.0;
    }
    let matches = a
        .minima
        .iter()
        .zip(&b.minima)
        .filter(|(x, y)| x == y)
        .count();
    matches as f64 / a.num_perm() as f64
}

/// Find `(b, r)` with `b*r <= num_perm` minimizing the integrated
/// false-positive plus false-negative area of the S-curve around
/// `threshold`. Deterministic exhaustive search.
pub fn optimal_bands(threshold: f64, num_perm: usize) -> (usize, usize) {
    assert!(threshold > 0.0 && threshold < 1.0);
    let mut best = (1usize, 1usize);
    let mut best_err = f64::INFINITY;
    for b in 1..=num_perm {
        for r in 1..=(num_perm / b) {
            let err = scurve_error_area(b, r, threshold);
            if err < best_err {
                best_err = err;
                best = (b, r);
            }
        }
    }
    best
}

fn scurve_error_area(b: usize, r: usize, threshold: f64) -> f64 {
    // Trapezoid rule on a fixed grid; fine enough that the argmin is stable.
    const STEPS: usize = 2000;
    let h = 1.0 / STEPS as f64;
    let mut fp = 0.0;
    let mut fn_ = 0.0;
    for i in 0..=STEPS {
        let j = i as f64 * h;
        let p = 1.0 - (1.0 - j.powi(r as i32)).powi(b as i32);
        let w = if i == 0 || i == STEPS { 0.5 } else { 1.0 };
        if j < threshold {
            fp += w * p * h;
        } else {
            fn_ += w * (1.0 - p) * h;
        }
    }
    fp + fn_
}

/// Knobs for one near-dedup run.
#[derive(Debug, Clone)]
pub struct DedupParams {
    /// Shingle size.
    pub ngram: usize,
    /// Jaccard similarity threshold.
    pub threshold: f64,
    /// Signature width.
    pub num_perm: usize,
    /// Seed for the permutation family.
    pub seed: u64,
    /// Keep signatures on disk instead of in memory.
    pub spill_dir: Option<PathBuf>,
    /// Approximate cap on index memory; exceeding it is a hard error.
    pub memory_budget: Option<u64>,
}

impl Default for DedupParams {
    fn default() -> Self {
        DedupParams {
            ngram: 5,
            threshold: 0.7,
            num_perm: 128,
            seed: 0,
            spill_dir: None,
            memory_budget: None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DedupStage {
    Near,
    Exact,
}

/// One removal-log entry: which kept document displaced which removed one.
#[derive(Debug, Clone, Serialize)]
pub struct Removal {
    pub removed_id: u64,
    pub kept_id: u64,
    pub stage: DedupStage,
    pub estimate: f64,
}

/// Counts plus the removal log for one partition.
#[derive(Debug, Clone, Default, Serialize)]
pub struct DedupReport {
    pub input_docs: u64,
    pub kept_docs: u64,
    pub near_dup_clusters: u64,
    pub exact_dup_groups: u64,
    #[serde(skip)]
    pub removals: Vec<Removal>,
}

/// Signature storage: in memory or appended to a spill file.
enum SignatureStore {
    Memory(Vec<Vec<u64>>),
    Disk {
        write: File,
        read: File,
        path: PathBuf,
        num_perm: usize,
        count: u32,
    },
}

impl SignatureStore {
    fn open(params: &DedupParams) -> Result<SignatureStore, DedupError> {
        match &params.spill_dir {
            None => Ok(SignatureStore::Memory(Vec::new())),
            Some(dir) => {
                std::fs::create_dir_all(dir)?;
                let path = dir.join(format!(
                    "sigs-{}-{}.bin",
                    std::process::id(),
                    params.seed
                ));
                let write = File::create(&path)?;
                let read = File::open(&path)?;
                Ok(SignatureStore::Disk {
                    write,
                    read,
                    path,
                    num_perm: params.num_perm,
                    count: 0,
                })
            }
        }
    }

    fn push(&mut self, sig: &[u64]) -> Result<u32, DedupError> {
        match self {
            SignatureStore::Memory(v) => {
                v.push(sig.to_vec());
                Ok((v.len() - 1) as u32)
            }
            SignatureStore::Disk { write, count, .. } => {
                let mut bytes = Vec::with_capacity(sig.len() * 8);
                for m in sig {
                    bytes.extend_from_slice(&m.to_le_bytes());
                }
                write.write_all(&bytes)?;
                let slot = *count;
                *count += 1;
                Ok(slot)
            }
        }
    }

    fn matches(&mut self, slot: u32, sig: &[u64]) -> Result<usize, DedupError> {
        match self {
            SignatureStore::Memory(v) => Ok(v[slot as usize]
                .iter()
                .zip(sig)
                .filter(|(a, b)| a == b)
                .count()),
            SignatureStore::Disk {
                write,
                read,
                num_perm,
                ..
            } => {
                write.flush()?;
                let mut bytes = vec![0u8; *num_perm * 8];
                read.read_exact_at(&mut bytes, slot as u64 * *num_perm as u64 * 8)?;
                Ok(bytes
                    .chunks_exact(8)
                    .map(|c| u64::from_le_bytes(c.try_into().unwrap()))
                    .zip(sig)
                    .filter(|(a, b)| *a == **b)
                    .count())
            }
        }
    }

    fn bytes_per_doc(&self, num_perm: usize) -> u64 {
        match self {
            SignatureStore::Memory(_) => (num_perm * 8 + 32) as u64,
            SignatureStore::Disk { .. } => 0,
        }
    }
}

impl Drop for SignatureStore {
    fn drop(&mut self) {
        if let SignatureStore::Disk { path, .. } = self {
            let _ = std::fs::remove_file(path);
        }
    }
}

/// Near-deduplicate one `language_Script` partition.
///
/// Documents are processed in ascending `doc_id` order. A document whose
/// estimated Jaccard against an earlier kept bucket-mate reaches the
/// threshold is removed and logged; otherwise it is kept and indexed.
/// Rerunning on the output removes nothing.
pub fn near_dedup(
    mut records: Vec<DocumentRecord>,
    params: &DedupParams,
    no_space: &NoSpaceScriptSet,
) -> Result<(Vec<DocumentRecord>, DedupReport), DedupError> {
    records.sort_by_key(|r| r.doc_id);
    let (bands, rows) = optimal_bands(params.threshold, params.num_perm);
    let hasher = MinHasher::new(params.num_perm, params.seed);

    let mut store = SignatureStore::open(params)?;
    // Band tables: exact row keys in memory, hashed row keys when spilling.
    let mut band_index: Vec<HashMap<u64, Vec<u32>>> = vec![HashMap::new(); bands];
    let mut slot_doc_ids: Vec<u64> = Vec::new();

    let bytes_per_doc =
        store.bytes_per_doc(params.num_perm) + (bands as u64) * (8 + 4 + 48) + 8;
    let mut used_bytes = 0u64;

    let mut report = DedupReport {
        input_docs: records.len() as u64,
        ..DedupReport::default()
    };
    let mut cluster_heads: HashSet<u64> = HashSet::new();
    let mut kept = Vec::with_capacity(records.len());

    let mut band_keys = vec![0u64; bands];
    for record in records {
        let unit = ShingleUnit::for_label(record.label.as_ref(), no_space);
        let shingles = shingle(&record.text, params.ngram, unit);
        let sig = hasher.sign(&shingles);

        if sig.is_empty() {
            kept.push(record);
            continue;
        }

        for (band, key) in band_keys.iter_mut().enumerate() {
            let row = &sig.minima()[band * rows..(band + 1) * rows];
            let mut bytes = Vec::with_capacity(rows * 8 + 8);
            bytes.extend_from_slice(&(band as u64).to_le_bytes());
            for m in row {
                bytes.extend_from_slice(&m.to_le_bytes());
            }
            *key = content_hash(&bytes);
        }

        let mut candidates: BTreeSet<u32> = BTreeSet::new();
        for (band, key) in band_keys.iter().enumerate() {
            if let Some(slots) = band_index[band].get(key) {
                candidates.extend(slots.iter().copied());
            }
        }

        let mut duplicate_of: Option<(u64, f64)> = None;
        for slot in candidates {
            let matches = store.matches(slot, sig.minima())?;
            let estimate = matches as f64 / params.num_perm as f64;
            if estimate >= params.threshold {
                duplicate_of = Some((slot_doc_ids[slot as usize], estimate));
                break;
            }
        }

        match duplicate_of {
            Some((kept_id, estimate)) => {
                cluster_heads.insert(kept_id);
                report.removals.push(Removal {
                    removed_id: record.doc_id,
                    kept_id,
                    stage: DedupStage::Near,
                    estimate,
                });
            }
            None => {
                if let Some(budget) = params.memory_budget {
                    used_bytes += bytes_per_doc;
                    if used_bytes > budget {
                        return Err(DedupError::MemoryBudget {
                            budget,
                            used: used_bytes,
                        });
                    }
                }
                let slot = store.push(sig.minima())?;
                slot_doc_ids.push(record.doc_id);
                for (band, key) in band_keys.iter().enumerate() {
                    band_index[band].entry(*key).or_default().push(slot);
                }
                kept.push(record);
            }
        }
    }

    report.kept_docs = kept.len() as u64;
    report.near_dup_clusters = cluster_heads.len() as u64;
    Ok((kept, report))
}

/// MD5 digest of the raw UTF-8 text bytes, as a hex string.
pub fn md5_hex(text: &str) -> String {
    let digest = Md5::digest(text.as_bytes());
    let mut hex = String::with_capacity(32);
    for byte in digest {
        hex.push_str(&format!("{byte:02x}"));
    }
    hex
}

/// Exact-deduplicate one partition: first document per MD5 digest (in
/// `doc_id` order) is kept, later ones are removed and logged.
pub fn exact_dedup(mut records: Vec<DocumentRecord>) -> (Vec<DocumentRecord>, DedupReport) {
    records.sort_by_key(|r| r.doc_id);
    let mut report = DedupReport {
        input_docs: records.len() as u64,
        ..DedupReport::default()
    };
    let mut first_by_digest: HashMap<[u8; 16], u64> = HashMap::new();
    let mut groups: HashSet<u64> = HashSet::new();
    let mut kept = Vec::with_capacity(records.len());

    for record in records {
        let digest: [u8; 16] = Md5::digest(record.text.as_bytes()).into();
        match first_by_digest.get(&digest) {
            Some(&kept_id) => {
                groups.insert(kept_id);
                report.removals.push(Removal {
                    removed_id: record.doc_id,
                    kept_id,
                    stage: DedupStage::Exact,
                    estimate: 1.0,
                });
            }
            None => {
                first_by_digest.insert(digest, record.doc_id);
                kept.push(record);
            }
        }
    }
    report.kept_docs = kept.len() as u64;
    report.exact_dup_groups = groups.len() as u64;
    (kept, report)
}
