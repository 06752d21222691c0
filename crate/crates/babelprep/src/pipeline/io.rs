//! Filesystem layout and atomic I/O for pipeline stages.
//!
//! Corpus versions live under `<output_root>/<version>/<language_Script>/`,
//! one JSONL shard per ingested input file (`f00000.jsonl`, numbered by
//! manifest index). Stage outputs are immutable inputs to the next stage;
//! reruns overwrite atomically via write-then-rename.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use flate2::read::MultiGzDecoder;

use crate::record::{DocumentRecord, JsonlReader, JsonlWriter, RecordError};

pub const VERSION_NOISY: &str = "noisy";
pub const VERSION_NORMALIZED: &str = "normalized";
pub const VERSION_CLEANED: &str = "cleaned";
pub const VERSION_DEDUPLICATED: &str = "deduplicated";
pub const VERSION_SPLIT: &str = "split";
pub const VERSION_MIX: &str = "mix";

/// Directory-safe partition name.
pub fn sanitize_partition(name: &str) -> String {
    let cleaned: String = name
        .chars()
        .map(|c| {
            if c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '+' {
                c
            } else {
                '-'
            }
        })
        .collect();
    if cleaned.is_empty() {
        "unknown".to_string()
    } else {
        cleaned
    }
}

/// Shard filename for a manifest file index.
pub fn shard_name(file_index: u64) -> String {
    format!("f{file_index:05}.jsonl")
}

/// Open a manifest input as a line reader; `.gz` paths are gunzipped.
pub fn open_text_lines(path: &Path) -> std::io::Result<Box<dyn BufRead>> {
    let file = File::open(path)?;
    if path.extension().is_some_and(|e| e == "gz") {
        Ok(Box::new(BufReader::new(MultiGzDecoder::new(file))))
    } else {
        Ok(Box::new(BufReader::new(file)))
    }
}

/// All `<partition>/<shard>.jsonl` files of a version, sorted by partition
/// then shard name, with the partition label attached.
pub fn list_version_shards(version_dir: &Path) -> std::io::Result<Vec<(String, PathBuf)>> {
    let mut shards = Vec::new();
    let mut partitions: Vec<PathBuf> = std::fs::read_dir(version_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.is_dir())
        .collect();
    partitions.sort();
    for partition in partitions {
        let label = partition
            .file_name()
            .map(|n| n.to_string_lossy().to_string())
            .unwrap_or_default();
        let mut files: Vec<PathBuf> = std::fs::read_dir(&partition)?
            .filter_map(|e| e.ok())
            .map(|e| e.path())
            .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
            .collect();
        files.sort();
        for file in files {
            shards.push((label.clone(), file));
        }
    }
    Ok(shards)
}

/// Partition labels of a version, sorted.
pub fn list_partitions(version_dir: &Path) -> std::io::Result<Vec<String>> {
    let mut labels: Vec<String> = std::fs::read_dir(version_dir)?
        .filter_map(|e| e.ok())
        .filter(|e| e.path().is_dir())
        .map(|e| e.file_name().to_string_lossy().to_string())
        .collect();
    labels.sort();
    Ok(labels)
}

/// Read every record of one JSONL shard.
pub fn read_shard(path: &Path) -> Result<Vec<DocumentRecord>, RecordError> {
    let file = File::open(path)?;
    JsonlReader::new(BufReader::new(file)).collect()
}

/// Read a whole partition (all shards, sorted) in document-id order.
pub fn read_partition(partition_dir: &Path) -> Result<Vec<DocumentRecord>, RecordError> {
    let mut files: Vec<PathBuf> = std::fs::read_dir(partition_dir)?
        .filter_map(|e| e.ok())
        .map(|e| e.path())
        .filter(|p| p.extension().is_some_and(|e| e == "jsonl"))
        .collect();
    files.sort();
    let mut records = Vec::new();
    for file in files {
        records.extend(read_shard(&file)?);
    }
    records.sort_by_key(|r| r.doc_id);
    Ok(records)
}

/// Write records to a shard atomically (temp file + rename). No file is
/// created for an empty record set.
pub fn write_shard(path: &Path, records: &[DocumentRecord]) -> Result<(), RecordError> {
    if records.is_empty() {
        return Ok(());
    }
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = temp_sibling(path);
    {
        let mut writer = JsonlWriter::new(BufWriter::new(File::create(&tmp)?));
        for record in records {
            writer.write_record(record)?;
        }
        writer.into_inner().flush()?;
    }
    std::fs::rename(&tmp, path)?;
    Ok(())
}

/// Atomically replace `path` with `content`.
pub fn write_atomic(path: &Path, content: &str) -> std::io::Result<()> {
    if let Some(parent) = path.parent() {
        std::fs::create_dir_all(parent)?;
    }
    let tmp = temp_sibling(path);
    std::fs::write(&tmp, content)?;
    std::fs::rename(&tmp, path)
}

fn temp_sibling(path: &Path) -> PathBuf {
    let mut name = path
        .file_name()
        .map(|n| n.to_string_lossy().to_string())
        .unwrap_or_else(|| "out".to_string());
    name.push_str(&format!(".tmp{}", std::process::id()));
    path.with_file_name(name)
}

/// Read one raw text file into per-line strings, reporting invalid UTF-8
/// with its line number.
pub fn read_raw_lines(path: &Path) -> Result<Vec<String>, String> {
    let mut reader =
        open_text_lines(path).map_err(|e| format!("cannot open {}: {e}", path.display()))?;
    let mut bytes = Vec::new();
    reader
        .read_to_end(&mut bytes)
        .map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut lines = Vec::new();
    for (i, chunk) in bytes.split(|b| *b == b'\n').enumerate() {
        let chunk = chunk.strip_suffix(b"\r").unwrap_or(chunk);
        match std::str::from_utf8(chunk) {
            Ok(s) => lines.push(s.to_string()),
            Err(_) => {
                return Err(format!(
                    "{}: invalid UTF-8 on line {}",
                    path.display(),
                    i + 1
                ))
            }
        }
    }
    // a trailing newline produces one empty tail entry, not a document
    if lines.last().is_some_and(|l| l.is_empty()) {
        lines.pop();
    }
    Ok(lines)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sanitize_names() {
        assert_eq!(sanitize_partition("eng_Latn"), "eng_Latn");
        assert_eq!(sanitize_partition("pt-BR"), "pt-BR");
        assert_eq!(sanitize_partition("zh/../../etc"), "zh-------etc");
        assert_eq!(sanitize_partition(""), "unknown");
    }

    #[test]
    fn raw_lines_plain_and_gz() {
        let dir = tempfile::tempdir().unwrap();
        let plain = dir.path().join("a.txt");
        std::fs::write(&plain, "one\ntwo\n").unwrap();
        assert_eq!(read_raw_lines(&plain).unwrap(), vec!["one", "two"]);

        let gz = dir.path().join("b.txt.gz");
        let mut enc =
            flate2::write::GzEncoder::new(File::create(&gz).unwrap(), flate2::Compression::fast());
        enc.write_all(b"eins\nzwei\n").unwrap();
        enc.finish().unwrap();
        assert_eq!(read_raw_lines(&gz).unwrap(), vec!["eins", "zwei"]);
    }

    #[test]
    fn raw_lines_invalid_utf8_names_line() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("bad.txt");
        std::fs::write(&path, b"good\n\xff\xfe\n").unwrap();
        let err = read_raw_lines(&path).unwrap_err();
        assert!(err.contains("line 2"), "{err}");
    }

    #[test]
    fn shard_roundtrip_and_atomicity() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("p/f00000.jsonl");
        let records = vec![
            DocumentRecord::new(1, "a", "c", "s", "en"),
            DocumentRecord::new(2, "b", "c", "s", "en"),
        ];
        write_shard(&path, &records).unwrap();
        assert_eq!(read_shard(&path).unwrap(), records);
        // overwrite leaves no temp files behind
        write_shard(&path, &records).unwrap();
        let names: Vec<String> = std::fs::read_dir(path.parent().unwrap())
            .unwrap()
            .map(|e| e.unwrap().file_name().to_string_lossy().to_string())
            .collect();
        assert_eq!(names, vec!["f00000.jsonl"]);
    }
}
