use std::collections::{BTreeMap, HashMap};
use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::{
    validate_id, EmbeddingBatch, Encoder, EncoderDescriptor, EncoderKind, ProviderSpec, TextRecord,
};
use crate::error::{LdirError, Result};
use crate::format::{self, RecordBlock};
use crate::vector::Vector;

/// One line of the JSON-lines store.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StoreRecord {
    pub id: String,
    #[serde(default)]
    pub text: String,
    pub vector: Vec<f64>,
}

/// In-memory vector store with constant-time lookup by id (and by text, for
/// stores that carry texts).
#[derive(Debug, Clone, Default)]
pub struct VectorStore {
    dim: usize,
    records: Vec<StoreRecord>,
    by_id: HashMap<String, usize>,
    by_text: HashMap<String, usize>,
}

impl VectorStore {
    pub fn new(dim: usize) -> Self {
        VectorStore {
            dim,
            ..Default::default()
        }
    }

    pub fn from_records(records: Vec<StoreRecord>) -> Result<Self> {
        let dim = records.first().map_or(0, |r| r.vector.len());
        let mut store = VectorStore::new(dim);
        for r in records {
            store.push(r)?;
        }
        Ok(store)
    }

    pub fn push(&mut self, record: StoreRecord) -> Result<()> {
        validate_id(&record.id)?;
        if self.records.is_empty() && self.dim == 0 {
            self.dim = record.vector.len();
        }
        if record.vector.len() != self.dim || self.dim == 0 {
            return Err(LdirError::DimensionMismatch {
                expected: self.dim,
                found: record.vector.len(),
            });
        }
        if let Some(index) = record.vector.iter().position(|v| !v.is_finite()) {
            return Err(LdirError::NonFinite { index });
        }
        if self.by_id.contains_key(&record.id) {
            return Err(LdirError::DuplicateId(record.id));
        }
        let index = self.records.len();
        self.by_id.insert(record.id.clone(), index);
        if !record.text.is_empty() {
            self.by_text.entry(record.text.clone()).or_insert(index);
        }
        self.records.push(record);
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn records(&self) -> &[StoreRecord] {
        &self.records
    }

    pub fn get(&self, id: &str) -> Option<&StoreRecord> {
        self.by_id.get(id).map(|&i| &self.records[i])
    }

    /// Looks up by id, then by exact text. An id hit counts only when either
    /// text is empty or both are equal.
    pub fn lookup(&self, record: &TextRecord) -> Result<Vector> {
        let index = self
            .by_id
            .get(&record.id)
            .filter(|&&i| {
                let stored = &self.records[i].text;
                stored.is_empty() || record.text.is_empty() || *stored == record.text
            })
            .or_else(|| self.by_text.get(&record.text))
            .ok_or_else(|| LdirError::MissingText(record.id.clone()))?;
        Vector::new(self.records[*index].vector.clone())
    }

    /// Loads either format; binary files are recognized by their magic bytes.
    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let mut bytes = Vec::new();
        File::open(path)?.read_to_end(&mut bytes)?;
        if format::has_magic(&bytes) {
            Self::from_binary(&bytes).map_err(|e| prefix_location(e, path))
        } else {
            Self::read_jsonl(
                BufReader::new(bytes.as_slice()),
                &path.display().to_string(),
            )
        }
    }

    pub fn read_jsonl(reader: impl BufRead, source: &str) -> Result<Self> {
        let mut store = VectorStore::default();
        for (lineno, line) in reader.lines().enumerate() {
            let line = line?;
            if line.trim().is_empty() {
                continue;
            }
            let location = format!("{source}:{}", lineno + 1);
            let record: StoreRecord = serde_json::from_str(&line)
                .map_err(|e| LdirError::parse(&location, e.to_string()))?;
            let id = record.id.clone();
            store.push(record).map_err(|e| match e {
                LdirError::DimensionMismatch { expected, found } => LdirError::parse(
                    &location,
                    format!("record {id:?} has {found} values, expected {expected}"),
                ),
                LdirError::NonFinite { .. } => {
                    LdirError::parse(&location, format!("record {id:?} has a non-finite value"))
                }
                other => other,
            })?;
        }
        Ok(store)
    }

    pub fn from_binary(bytes: &[u8]) -> Result<Self> {
        let block = format::decode_records(bytes)?;
        let mut store = VectorStore::new(block.dim);
        for (id, values) in block.records {
            store.push(StoreRecord {
                id,
                text: String::new(),
                vector: values.iter().map(|&v| f64::from(v)).collect(),
            })?;
        }
        Ok(store)
    }

    pub fn to_binary(&self) -> Result<Vec<u8>> {
        let block = RecordBlock {
            dim: self.dim,
            records: self
                .records
                .iter()
                .map(|r| (r.id.clone(), r.vector.iter().map(|&v| v as f32).collect()))
                .collect(),
        };
        format::encode_records(&block)
    }

    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for r in &self.records {
            out.push_str(&serde_json::to_string(r).expect("store records serialize"));
            out.push('\n');
        }
        out
    }

    pub fn save_binary(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_binary()?)?;
        Ok(())
    }

    pub fn save_jsonl(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_jsonl())?;
        Ok(())
    }
}

fn prefix_location(e: LdirError, path: &Path) -> LdirError {
    match e {
        LdirError::Parse { location, message } => LdirError::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    }
}

pub fn load_precomputed_store(path: impl AsRef<Path>) -> Result<PrecomputedEncoder> {
    let path = path.as_ref();
    let store = VectorStore::load(path)?;
    PrecomputedEncoder::new("precomputed", &path.display().to_string(), store)
}

/// Encoder that serves vectors dumped ahead of time by a real model.
#[derive(Debug, Clone)]
pub struct PrecomputedEncoder {
    descriptor: EncoderDescriptor,
    store: Arc<VectorStore>,
}

impl PrecomputedEncoder {
    pub fn new(name: &str, path: &str, store: VectorStore) -> Result<Self> {
        Ok(PrecomputedEncoder {
            descriptor: EncoderDescriptor {
                kind: EncoderKind::Precomputed,
                name: name.to_owned(),
                dim: store.dim(),
                params: BTreeMap::from([("path".to_owned(), path.to_owned())]),
            },
            store: Arc::new(store),
        })
    }

    pub fn from_spec(spec: &ProviderSpec) -> Result<Self> {
        for key in spec.params.keys() {
            if !matches!(key.as_str(), "path" | "dim" | "name") {
                return Err(LdirError::InvalidParameter(format!(
                    "precomputed provider has no parameter {key:?}"
                )));
            }
        }
        let path: String = spec.required("path")?;
        let store = VectorStore::load(&path)?;
        if let Some(dim) = spec.parsed::<usize>("dim")? {
            if dim != store.dim() {
                return Err(LdirError::DimensionMismatch {
                    expected: dim,
                    found: store.dim(),
                });
            }
        }
        Self::new(spec.get("name").unwrap_or("precomputed"), &path, store)
    }

    pub fn len(&self) -> usize {
        self.store.len()
    }

    pub fn is_empty(&self) -> bool {
        self.store.is_empty()
    }

    pub fn store(&self) -> &VectorStore {
        &self.store
    }
}

impl Encoder for PrecomputedEncoder {
    fn descriptor(&self) -> &EncoderDescriptor {
        &self.descriptor
    }

    fn embed_batch(&self, texts: &[TextRecord]) -> Result<EmbeddingBatch> {
        if texts.is_empty() {
            return Err(LdirError::EmptyInput);
        }
        let vectors = texts
            .iter()
            .map(|t| self.store.lookup(t))
            .collect::<Result<Vec<_>>>()?;
        Ok(EmbeddingBatch {
            ids: texts.iter().map(|t| t.id.clone()).collect(),
            vectors,
        })
    }
}
