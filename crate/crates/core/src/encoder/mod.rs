//! Text encoders: the black-box `text -> vector` function that relatedness is
//! computed on.
//!
//! Three providers are available behind the [`Encoder`] trait:
//!
//! - [`HashedEncoder`]: deterministic signed feature hashing, no external state.
//! - [`PrecomputedEncoder`]: lookup into a vector store dumped by a real model.
//! - [`HttpEncoder`]: client for an embedding service speaking the `/embed`
//!   JSON protocol.
//!
//! Providers are described by an [`EncoderDescriptor`] and can be written on
//! the command line as `kind:key=value,...`, e.g. `hashed:dim=128,seed=7`.

mod hashed;
mod http;
mod store;

use std::collections::BTreeMap;
use std::fmt;
use std::fs::File;
use std::io::{BufRead, BufReader};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LdirError, Result};
use crate::vector::Vector;

pub use hashed::{hash64, hashed_encode, HashedEncoder};
pub use http::{HttpEncoder, HttpSettings, EMBED_PATH, TIMEOUT_ENV};
pub use store::{load_precomputed_store, PrecomputedEncoder, StoreRecord, VectorStore};

/// An identified text.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TextRecord {
    pub id: String,
    pub text: String,
}

impl TextRecord {
    pub fn new(id: impl Into<String>, text: impl Into<String>) -> Result<Self> {
        let id = id.into();
        validate_id(&id)?;
        Ok(TextRecord {
            id,
            text: text.into(),
        })
    }
}

pub(crate) fn validate_id(id: &str) -> Result<()> {
    if id.is_empty() {
        return Err(LdirError::InvalidDataset("empty record id".into()));
    }
    if id.contains(['\t', '\n', '\r']) {
        return Err(LdirError::InvalidDataset(format!(
            "record id {id:?} contains a tab or newline"
        )));
    }
    Ok(())
}

/// Checks that every id is valid and unique.
pub fn validate_corpus(records: &[TextRecord]) -> Result<()> {
    let mut seen = std::collections::HashSet::with_capacity(records.len());
    for r in records {
        validate_id(&r.id)?;
        if !seen.insert(r.id.as_str()) {
            return Err(LdirError::DuplicateId(r.id.clone()));
        }
    }
    Ok(())
}

/// Reads JSON-lines `{"id": ..., "text": ...}`. Blank lines are skipped.
pub fn read_corpus_jsonl(path: impl AsRef<Path>) -> Result<Vec<TextRecord>> {
    let path = path.as_ref();
    let reader = BufReader::new(File::open(path)?);
    let mut records = Vec::new();
    for (lineno, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: TextRecord = serde_json::from_str(&line).map_err(|e| {
            LdirError::parse(format!("{}:{}", path.display(), lineno + 1), e.to_string())
        })?;
        records.push(record);
    }
    validate_corpus(&records)?;
    Ok(records)
}

pub fn write_corpus_jsonl(path: impl AsRef<Path>, records: &[TextRecord]) -> Result<()> {
    let mut out = String::new();
    for r in records {
        out.push_str(&serde_json::to_string(r).expect("records serialize"));
        out.push('\n');
    }
    std::fs::write(path, out)?;
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum EncoderKind {
    Precomputed,
    Http,
    Hashed,
}

impl EncoderKind {
    pub fn name(self) -> &'static str {
        match self {
            EncoderKind::Precomputed => "precomputed",
            EncoderKind::Http => "http",
            EncoderKind::Hashed => "hashed",
        }
    }
}

impl FromStr for EncoderKind {
    type Err = LdirError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "precomputed" => Ok(EncoderKind::Precomputed),
            "http" => Ok(EncoderKind::Http),
            "hashed" => Ok(EncoderKind::Hashed),
            other => Err(LdirError::InvalidParameter(format!(
                "unknown provider kind {other:?} (expected hashed, precomputed or http)"
            ))),
        }
    }
}

/// Parameters that change how a provider runs but not what it returns; they
/// are ignored when checking whether two descriptors name the same encoder.
const OPERATIONAL_PARAMS: &[&str] = &[
    "batch_size",
    "max_in_flight",
    "timeout_ms",
    "retry_backoff_ms",
];

/// Fully resolved description of an encoder.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct EncoderDescriptor {
    pub kind: EncoderKind,
    pub name: String,
    pub dim: usize,
    pub params: BTreeMap<String, String>,
}

impl EncoderDescriptor {
    /// Canonical string of everything that affects the vectors produced.
    pub fn identity(&self) -> String {
        let params: Vec<String> = self
            .params
            .iter()
            .filter(|(k, _)| !OPERATIONAL_PARAMS.contains(&k.as_str()))
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        format!(
            "{}:{}:{}:{}",
            self.kind.name(),
            self.name,
            self.dim,
            params.join(",")
        )
    }

    pub fn same_encoder(&self, other: &EncoderDescriptor) -> bool {
        self.identity() == other.identity()
    }

    /// The provider spec that reopens this encoder.
    pub fn to_spec(&self) -> ProviderSpec {
        let mut params = self.params.clone();
        params.insert("dim".into(), self.dim.to_string());
        params.insert("name".into(), self.name.clone());
        ProviderSpec {
            kind: self.kind,
            params,
        }
    }
}

impl fmt::Display for EncoderDescriptor {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_spec())
    }
}

/// Unresolved provider description as written by a user:
/// `kind:key=value,key=value`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ProviderSpec {
    pub kind: EncoderKind,
    pub params: BTreeMap<String, String>,
}

impl ProviderSpec {
    pub fn get(&self, key: &str) -> Option<&str> {
        self.params.get(key).map(String::as_str)
    }

    pub(crate) fn parsed<T: FromStr>(&self, key: &str) -> Result<Option<T>> {
        self.get(key)
            .map(|raw| {
                raw.parse::<T>().map_err(|_| {
                    LdirError::InvalidParameter(format!(
                        "provider parameter {key}={raw:?} is not valid"
                    ))
                })
            })
            .transpose()
    }

    pub(crate) fn required<T: FromStr>(&self, key: &str) -> Result<T> {
        self.parsed(key)?.ok_or_else(|| {
            LdirError::InvalidParameter(format!(
                "{} provider needs a {key}= parameter",
                self.kind.name()
            ))
        })
    }
}

impl FromStr for ProviderSpec {
    type Err = LdirError;

    fn from_str(s: &str) -> Result<Self> {
        let (kind, rest) = s.split_once(':').unwrap_or((s, ""));
        let kind: EncoderKind = kind.trim().parse()?;
        let mut params = BTreeMap::new();
        for pair in rest.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = pair.split_once('=').ok_or_else(|| {
                LdirError::InvalidParameter(format!("provider parameter {pair:?} is not key=value"))
            })?;
            if params
                .insert(key.trim().to_owned(), value.trim().to_owned())
                .is_some()
            {
                return Err(LdirError::InvalidParameter(format!(
                    "provider parameter {key:?} given twice"
                )));
            }
        }
        Ok(ProviderSpec { kind, params })
    }
}

impl fmt::Display for ProviderSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let params: Vec<String> = self
            .params
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect();
        write!(f, "{}:{}", self.kind.name(), params.join(","))
    }
}

/// Ids and row-aligned vectors returned by an encoder.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingBatch {
    pub ids: Vec<String>,
    pub vectors: Vec<Vector>,
}

impl EmbeddingBatch {
    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }
}

/// A text encoder. Implementations are read-only after construction and may
/// be shared across threads.
pub trait Encoder: Send + Sync {
    fn descriptor(&self) -> &EncoderDescriptor;

    /// One vector per input, in input order, each of width `descriptor().dim`.
    fn embed_batch(&self, texts: &[TextRecord]) -> Result<EmbeddingBatch>;
}

impl<E: Encoder + ?Sized> Encoder for Box<E> {
    fn descriptor(&self) -> &EncoderDescriptor {
        (**self).descriptor()
    }

    fn embed_batch(&self, texts: &[TextRecord]) -> Result<EmbeddingBatch> {
        (**self).embed_batch(texts)
    }
}

/// Wraps unnamed texts as records with positional ids.
pub fn anonymous_records<S: AsRef<str>>(texts: &[S]) -> Vec<TextRecord> {
    texts
        .iter()
        .enumerate()
        .map(|(i, t)| TextRecord {
            id: format!("#{i}"),
            text: t.as_ref().to_owned(),
        })
        .collect()
}

pub fn embed_batch(provider: &dyn Encoder, texts: &[TextRecord]) -> Result<EmbeddingBatch> {
    provider.embed_batch(texts)
}

pub fn open_encoder(spec: &ProviderSpec) -> Result<Box<dyn Encoder>> {
    Ok(match spec.kind {
        EncoderKind::Hashed => Box::new(HashedEncoder::from_spec(spec)?),
        EncoderKind::Precomputed => Box::new(PrecomputedEncoder::from_spec(spec)?),
        EncoderKind::Http => Box::new(HttpEncoder::from_spec(spec)?),
    })
}
