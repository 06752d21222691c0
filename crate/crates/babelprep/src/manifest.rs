//! Input manifests: which files to ingest and what they claim to contain.
//!
//! The toolkit ships generic adapters rather than per-dataset downloaders, so
//! every input is declared up front: one entry per text file with the
//! collection, source, and declared language code. Entry order matters — it
//! fixes the manifest file index embedded in every document id.

use std::fs::File;
use std::io::BufReader;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ManifestError {
    #[error("cannot read manifest {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("cannot parse manifest {path}: {source}")]
    Parse {
        path: PathBuf,
        #[source]
        source: serde_json::Error,
    },
    #[error("manifest entry {index}: {message}")]
    Entry { index: usize, message: String },
}

/// One input file. `path` is resolved relative to the manifest's directory
/// when not absolute. Files ending in `.gz` are read as gzip streams; plain
/// text otherwise, one document per line.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq, Eq)]
pub struct ManifestEntry {
    pub path: PathBuf,
    pub collection: String,
    pub source: String,
    pub original_code: String,
}

#[derive(Debug, Clone, Serialize, Deserialize, Default)]
pub struct Manifest {
    pub files: Vec<ManifestEntry>,
}

impl Manifest {
    pub fn load(path: &Path) -> Result<Manifest, ManifestError> {
        let file = File::open(path).map_err(|source| ManifestError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        let mut manifest: Manifest =
            serde_json::from_reader(BufReader::new(file)).map_err(|source| ManifestError::Parse {
                path: path.to_path_buf(),
                source,
            })?;
        let base = path.parent().unwrap_or(Path::new("."));
        for (index, entry) in manifest.files.iter_mut().enumerate() {
            if entry.original_code.trim().is_empty() {
                return Err(ManifestError::Entry {
                    index,
                    message: "original_code must not be empty".into(),
                });
            }
            if !entry.path.is_absolute() {
                entry.path = base.join(&entry.path);
            }
        }
        Ok(manifest)
    }

    pub fn save(&self, path: &Path) -> Result<(), ManifestError> {
        let json = serde_json::to_string_pretty(self).expect("manifest serializes");
        std::fs::write(path, json).map_err(|source| ManifestError::Io {
            path: path.to_path_buf(),
            source,
        })
    }
}
