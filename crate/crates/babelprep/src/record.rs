//! Harmonized document records and their JSONL wire format.
//!
//! Every pipeline stage exchanges data as JSON Lines: one UTF-8 JSON object
//! per line, LF-terminated, no BOM. Encoding is bit-exact and deterministic —
//! identical records always produce identical bytes — so corpus versions can
//! be diffed and reruns verified by byte comparison.
//!
//! Keys are emitted in a fixed order: `doc_id`, `url`, `text`, `collection`,
//! `source`, `original_code`, `label`, followed by any retained unknown keys
//! in sorted order. Source datasets carry heterogeneous metadata; unknown
//! keys are kept rather than dropped.

use std::collections::BTreeMap;
use std::io::{BufRead, Write};

use serde_json::{Map, Value};
use thiserror::Error;

/// Bits reserved for the line number inside a document id.
pub const DOC_ID_LINE_BITS: u32 = 40;

#[derive(Debug, Error)]
pub enum RecordError {
    #[error("line {line}: malformed JSON: {source}")]
    Parse {
        line: u64,
        #[source]
        source: serde_json::Error,
    },
    #[error("line {line}: not a JSON object")]
    NotAnObject { line: u64 },
    #[error("line {line}: missing required `text` field")]
    MissingText { line: u64 },
    #[error("line {line}: field `{field}` has the wrong type")]
    FieldType { line: u64, field: &'static str },
    #[error("doc {doc_id}: {message}")]
    Encode { doc_id: u64, message: String },
    #[error("line {line}: invalid UTF-8 in input")]
    InvalidUtf8 { line: u64 },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// A normalized language identity: resolved (or retained) code plus the
/// detected ISO 15924 script.
///
/// Renders as `code_Script`, e.g. `eng_Latn`; a missing script renders with
/// a literal `None` segment, e.g. `rus_None`.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct LanguageLabel {
    /// ISO 639-3 code, or a retained non-conforming original code.
    pub code: String,
    /// ISO 15924 script code in Title-case form (e.g. `Latn`), if detected.
    pub script: Option<String>,
}

impl LanguageLabel {
    pub fn new(code: impl Into<String>, script: Option<String>) -> Self {
        LanguageLabel {
            code: code.into(),
            script,
        }
    }

    /// The compound `code_Script` form used in file layouts and reports.
    pub fn render(&self) -> String {
        match &self.script {
            Some(s) => format!("{}_{}", self.code, s),
            None => format!("{}_None", self.code),
        }
    }

    /// Parse a rendered label. The segment after the last `_` must be a
    /// Title-case four-letter script code or the literal `None`.
    pub fn parse(rendered: &str) -> Option<Self> {
        let (code, script) = rendered.rsplit_once('_')?;
        if code.is_empty() {
            return None;
        }
        if script == "None" {
            return Some(LanguageLabel::new(code, None));
        }
        if is_script_shaped(script) {
            return Some(LanguageLabel::new(code, Some(script.to_string())));
        }
        None
    }
}

impl std::fmt::Display for LanguageLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.render())
    }
}

/// Title-case four-letter shape check for ISO 15924 codes.
pub fn is_script_shaped(s: &str) -> bool {
    let b = s.as_bytes();
    b.len() == 4
        && b[0].is_ascii_uppercase()
        && b[1..].iter().all(|c| c.is_ascii_lowercase())
}

/// One harmonized text unit with its source metadata.
#[derive(Debug, Clone, PartialEq)]
pub struct DocumentRecord {
    /// Stable unique identifier, assigned at ingestion in manifest order.
    pub doc_id: u64,
    /// Web address the text was extracted from, if available.
    pub url: Option<String>,
    /// Document body. Granularity is whatever the source delivers.
    pub text: String,
    /// Name of the source collection.
    pub collection: String,
    /// Specific corpus or file within the collection.
    pub source: String,
    /// Language code as declared by the source.
    pub original_code: String,
    /// Normalized label; absent until the normalize stage runs.
    pub label: Option<LanguageLabel>,
    /// Unknown keys from the source line, preserved verbatim.
    pub extras: BTreeMap<String, Value>,
}

impl DocumentRecord {
    pub fn new(
        doc_id: u64,
        text: impl Into<String>,
        collection: impl Into<String>,
        source: impl Into<String>,
        original_code: impl Into<String>,
    ) -> Self {
        DocumentRecord {
            doc_id,
            url: None,
            text: text.into(),
            collection: collection.into(),
            source: source.into(),
            original_code: original_code.into(),
            label: None,
            extras: BTreeMap::new(),
        }
    }

    /// Compose a document id from a manifest file index and a 0-based line
    /// number: `(file_index << 40) | line`. Stable and reproducible with no
    /// cross-worker coordination.
    pub fn make_doc_id(file_index: u64, line_number: u64) -> u64 {
        debug_assert!(line_number < (1 << DOC_ID_LINE_BITS));
        (file_index << DOC_ID_LINE_BITS) | line_number
    }

    /// The manifest file index encoded in a document id.
    pub fn file_index(doc_id: u64) -> u64 {
        doc_id >> DOC_ID_LINE_BITS
    }
}

/// Encode one record as a single newline-terminated JSONL line.
///
/// All seven known keys are always present (`url` and `label` as `null` when
/// absent) so every corpus version carries an identical schema.
pub fn encode_jsonl(record: &DocumentRecord) -> Result<String, RecordError> {
    let mut obj = Map::new();
    obj.insert("doc_id".into(), Value::from(record.doc_id));
    obj.insert(
        "url".into(),
        record.url.as_ref().map_or(Value::Null, |u| Value::from(u.as_str())),
    );
    obj.insert("text".into(), Value::from(record.text.as_str()));
    obj.insert("collection".into(), Value::from(record.collection.as_str()));
    obj.insert("source".into(), Value::from(record.source.as_str()));
    obj.insert(
        "original_code".into(),
        Value::from(record.original_code.as_str()),
    );
    obj.insert(
        "label".into(),
        record
            .label
            .as_ref()
            .map_or(Value::Null, |l| Value::from(l.render())),
    );
    for (k, v) in &record.extras {
        if KNOWN_KEYS.contains(&k.as_str()) {
            return Err(RecordError::Encode {
                doc_id: record.doc_id,
                message: format!("extras must not shadow the known key `{k}`"),
            });
        }
        obj.insert(k.clone(), v.clone());
    }
    let mut line = serde_json::to_string(&Value::Object(obj)).map_err(|e| RecordError::Encode {
        doc_id: record.doc_id,
        message: e.to_string(),
    })?;
    line.push('\n');
    Ok(line)
}

const KNOWN_KEYS: [&str; 7] = [
    "doc_id",
    "url",
    "text",
    "collection",
    "source",
    "original_code",
    "label",
];

/// Decode one JSONL line. `line_number` is 1-based and only used in errors.
pub fn decode_jsonl(line: &str, line_number: u64) -> Result<DocumentRecord, RecordError> {
    let value: Value = serde_json::from_str(line).map_err(|e| RecordError::Parse {
        line: line_number,
        source: e,
    })?;
    let Value::Object(mut obj) = value else {
        return Err(RecordError::NotAnObject { line: line_number });
    };

    let take_string = |obj: &mut Map<String, Value>,
                       key: &'static str|
     -> Result<Option<String>, RecordError> {
        match obj.remove(key) {
            None | Some(Value::Null) => Ok(None),
            Some(Value::String(s)) => Ok(Some(s)),
            Some(_) => Err(RecordError::FieldType {
                line: line_number,
                field: key,
            }),
        }
    };

    let doc_id = match obj.remove("doc_id") {
        Some(Value::Number(n)) => n.as_u64().ok_or(RecordError::FieldType {
            line: line_number,
            field: "doc_id",
        })?,
        None | Some(Value::Null) => 0,
        Some(_) => {
            return Err(RecordError::FieldType {
                line: line_number,
                field: "doc_id",
            })
        }
    };
    let url = take_string(&mut obj, "url")?;
    let text = take_string(&mut obj, "text")?.ok_or(RecordError::MissingText {
        line: line_number,
    })?;
    let collection = take_string(&mut obj, "collection")?.unwrap_or_default();
    let source = take_string(&mut obj, "source")?.unwrap_or_default();
    let original_code = take_string(&mut obj, "original_code")?.unwrap_or_default();
    let label = match take_string(&mut obj, "label")? {
        None => None,
        Some(s) => Some(LanguageLabel::parse(&s).ok_or(RecordError::FieldType {
            line: line_number,
            field: "label",
        })?),
    };

    Ok(DocumentRecord {
        doc_id,
        url,
        text,
        collection,
        source,
        original_code,
        label,
        extras: obj.into_iter().collect(),
    })
}

/// Streaming JSONL reader: N input lines decode to exactly N records, with
/// no cross-line state. Blank lines are rejected as malformed.
pub struct JsonlReader<R: BufRead> {
    reader: R,
    line_number: u64,
    buf: String,
}

impl<R: BufRead> JsonlReader<R> {
    pub fn new(reader: R) -> Self {
        JsonlReader {
            reader,
            line_number: 0,
            buf: String::new(),
        }
    }
}

impl<R: BufRead> Iterator for JsonlReader<R> {
    type Item = Result<DocumentRecord, RecordError>;

    fn next(&mut self) -> Option<Self::Item> {
        self.buf.clear();
        match self.reader.read_line(&mut self.buf) {
            Ok(0) => None,
            Ok(_) => {
                self.line_number += 1;
                Some(decode_jsonl(self.buf.trim_end_matches('\n'), self.line_number))
            }
            Err(e) => {
                self.line_number += 1;
                if e.kind() == std::io::ErrorKind::InvalidData {
                    Some(Err(RecordError::InvalidUtf8 {
                        line: self.line_number,
                    }))
                } else {
                    Some(Err(e.into()))
                }
            }
        }
    }
}

/// JSONL writer owning one output file; single-owner per file by contract.
pub struct JsonlWriter<W: Write> {
    writer: W,
    written: u64,
}

impl<W: Write> JsonlWriter<W> {
    pub fn new(writer: W) -> Self {
        JsonlWriter { writer, written: 0 }
    }

    pub fn write_record(&mut self, record: &DocumentRecord) -> Result<(), RecordError> {
        let line = encode_jsonl(record)?;
        self.writer.write_all(line.as_bytes())?;
        self.written += 1;
        Ok(())
    }

    pub fn records_written(&self) -> u64 {
        self.written
    }

    pub fn into_inner(self) -> W {
        self.writer
    }
}
