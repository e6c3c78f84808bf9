//! Anchor-text selection and anchor-set files.
//!
//! An [`AnchorSet`] is the ordered list of anchor texts whose relatedness
//! scores form the embedding dimensions, together with the encoder vectors
//! they were selected on and enough provenance to rebuild them.
//!
//! On disk an anchor set is the compact record layout (ids and `f32`
//! vectors) followed by a `u32` length-prefixed JSON block holding the
//! provenance and the anchor texts.

mod length;
mod sampling;

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::encoder::{Encoder, EncoderDescriptor, StoreRecord, TextRecord};
use crate::error::{LdirError, Result};
use crate::format::{self, Reader};
use crate::vector::{euclidean, unit_direction, Vector};

pub use length::{filter_by_length, token_count, LengthBucket};
pub use sampling::{
    farthest_point_sampling, farthest_point_sampling_with, kmeans_sample, uniform_sample, FpsStart,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SamplingMethod {
    #[default]
    Fps,
    Uniform,
    Kmeans,
}

impl SamplingMethod {
    pub fn name(self) -> &'static str {
        match self {
            SamplingMethod::Fps => "fps",
            SamplingMethod::Uniform => "uniform",
            SamplingMethod::Kmeans => "kmeans",
        }
    }
}

impl fmt::Display for SamplingMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SamplingMethod {
    type Err = LdirError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fps" => Ok(SamplingMethod::Fps),
            "uniform" => Ok(SamplingMethod::Uniform),
            "kmeans" => Ok(SamplingMethod::Kmeans),
            other => Err(LdirError::InvalidParameter(format!(
                "unknown sampling method {other:?}"
            ))),
        }
    }
}

/// Everything needed to rebuild an anchor set besides the corpus itself.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Provenance {
    pub method: SamplingMethod,
    pub seed: u64,
    pub bucket: LengthBucket,
    pub start: FpsStart,
    pub normalize: bool,
    pub encoder: EncoderDescriptor,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Anchor {
    pub record: TextRecord,
    pub vector: Vector,
}

#[derive(Debug, Clone, PartialEq)]
pub struct AnchorSet {
    anchors: Vec<Anchor>,
    provenance: Provenance,
    id: String,
}

/// Trailing metadata block of an anchor-set file.
#[derive(Serialize, Deserialize)]
struct MetadataBody {
    #[serde(flatten)]
    provenance: Provenance,
    texts: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct Metadata {
    #[serde(flatten)]
    body: MetadataBody,
    /// SHA-256 over the record block followed by the serialized body, hex.
    checksum: String,
}

fn checksum(records: &[u8], body: &MetadataBody) -> String {
    let mut hasher = Sha256::new();
    hasher.update(records);
    hasher.update(serde_json::to_vec(body).expect("metadata serializes"));
    hasher
        .finalize()
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

fn hex_digest(bytes: &[u8]) -> String {
    Sha256::digest(bytes)
        .iter()
        .map(|b| format!("{b:02x}"))
        .collect()
}

impl AnchorSet {
    pub fn new(anchors: Vec<Anchor>, provenance: Provenance) -> Result<Self> {
        if anchors.is_empty() {
            return Err(LdirError::EmptyInput);
        }
        let dim = provenance.encoder.dim;
        let mut seen = HashSet::new();
        for a in &anchors {
            if a.vector.dim() != dim {
                return Err(LdirError::DimensionMismatch {
                    expected: dim,
                    found: a.vector.dim(),
                });
            }
            if !seen.insert(a.record.id.as_str()) {
                return Err(LdirError::DuplicateId(a.record.id.clone()));
            }
        }
        let mut set = AnchorSet {
            anchors,
            provenance,
            id: String::new(),
        };
        set.id = hex_digest(&set.to_bytes()?)[..16].to_owned();
        Ok(set)
    }

    pub fn anchors(&self) -> &[Anchor] {
        &self.anchors
    }

    pub fn len(&self) -> usize {
        self.anchors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.anchors.is_empty()
    }

    pub fn provenance(&self) -> &Provenance {
        &self.provenance
    }

    pub fn encoder(&self) -> &EncoderDescriptor {
        &self.provenance.encoder
    }

    /// Content hash of the serialized set.
    pub fn id(&self) -> &str {
        &self.id
    }

    pub fn records(&self) -> Vec<TextRecord> {
        self.anchors.iter().map(|a| a.record.clone()).collect()
    }

    pub fn vectors(&self) -> Vec<Vector> {
        self.anchors.iter().map(|a| a.vector.clone()).collect()
    }

    /// Euclidean distances between the unit directions of every anchor pair.
    pub fn pairwise_distances(&self) -> Result<Vec<f64>> {
        let units = self
            .anchors
            .iter()
            .map(|a| unit_direction(&a.vector))
            .collect::<Result<Vec<_>>>()?;
        let mut out = Vec::with_capacity(units.len() * units.len().saturating_sub(1) / 2);
        for i in 0..units.len() {
            for j in i + 1..units.len() {
                out.push(euclidean(&units[i], &units[j]));
            }
        }
        Ok(out)
    }

    pub fn to_bytes(&self) -> Result<Vec<u8>> {
        let vectors: Vec<Vec<f32>> = self.anchors.iter().map(|a| a.vector.to_f32()).collect();
        let mut out = Vec::new();
        format::write_records(
            &mut out,
            self.provenance.encoder.dim,
            self.anchors
                .iter()
                .zip(&vectors)
                .map(|(a, v)| (a.record.id.as_str(), v.as_slice())),
        )?;
        let body = MetadataBody {
            provenance: self.provenance.clone(),
            texts: self.anchors.iter().map(|a| a.record.text.clone()).collect(),
        };
        let metadata = Metadata {
            checksum: checksum(&out, &body),
            body,
        };
        let json = serde_json::to_vec(&metadata).expect("metadata serializes");
        out.extend_from_slice(&(json.len() as u32).to_le_bytes());
        out.extend_from_slice(&json);
        Ok(out)
    }

    pub fn from_bytes(bytes: &[u8]) -> Result<Self> {
        let mut reader = Reader::new(bytes);
        let block = format::read_records(&mut reader)?;
        let block_end = reader.position();
        let len = reader.u32("metadata length")? as usize;
        let at = reader.position();
        let json = reader.take(len, "metadata")?;
        if reader.remaining() != 0 {
            return Err(reader.error("trailing bytes after metadata"));
        }
        let Metadata {
            body,
            checksum: stored,
        } = serde_json::from_slice(json).map_err(|e| {
            LdirError::parse(format!("byte offset {at}"), format!("bad metadata: {e}"))
        })?;
        if stored != checksum(&bytes[..block_end], &body) {
            return Err(LdirError::parse(
                format!("byte offset {at}"),
                "checksum does not match the file contents",
            ));
        }
        if body.texts.len() != block.records.len() {
            return Err(LdirError::parse(
                format!("byte offset {at}"),
                format!(
                    "{} texts for {} anchors",
                    body.texts.len(),
                    block.records.len()
                ),
            ));
        }
        if block.dim != body.provenance.encoder.dim {
            return Err(LdirError::parse(
                "byte offset 5",
                format!(
                    "vector width {} but encoder dim {}",
                    block.dim, body.provenance.encoder.dim
                ),
            ));
        }
        let anchors = block
            .records
            .into_iter()
            .zip(body.texts)
            .map(|((id, values), text)| {
                Ok(Anchor {
                    record: TextRecord::new(id, text)?,
                    vector: Vector::from_f32(&values)?,
                })
            })
            .collect::<Result<Vec<_>>>()?;
        AnchorSet::new(anchors, body.provenance)
    }

    /// Copy with vectors rounded to the `f32` precision of the file format.
    pub fn quantized(&self) -> Result<Self> {
        Self::from_bytes(&self.to_bytes()?)
    }

    /// JSON-lines view: one vector-store record per anchor, in order.
    pub fn to_jsonl(&self) -> String {
        let mut out = String::new();
        for a in &self.anchors {
            let record = StoreRecord {
                id: a.record.id.clone(),
                text: a.record.text.clone(),
                vector: a.vector.as_slice().to_vec(),
            };
            out.push_str(&serde_json::to_string(&record).expect("anchor serializes"));
            out.push('\n');
        }
        out
    }
}

pub fn save_anchor_set(set: &AnchorSet, path: impl AsRef<Path>) -> Result<()> {
    std::fs::write(path, set.to_bytes()?)?;
    Ok(())
}

pub fn load_anchor_set(path: impl AsRef<Path>) -> Result<AnchorSet> {
    let path = path.as_ref();
    let bytes = std::fs::read(path)?;
    AnchorSet::from_bytes(&bytes).map_err(|e| match e {
        LdirError::Parse { location, message } => LdirError::Parse {
            location: format!("{}: {location}", path.display()),
            message,
        },
        other => other,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AnchorOptions {
    pub method: SamplingMethod,
    pub n: usize,
    pub seed: u64,
    pub bucket: LengthBucket,
    pub start: FpsStart,
    /// Sample on unit directions rather than raw encoder outputs.
    pub normalize: bool,
}

impl AnchorOptions {
    pub fn new(method: SamplingMethod, n: usize, seed: u64) -> Self {
        AnchorOptions {
            method,
            n,
            seed,
            bucket: LengthBucket::All,
            start: FpsStart::CentroidFarthest,
            normalize: true,
        }
    }
}

/// Filters the corpus by length, embeds it and runs the chosen sampler.
pub fn build_anchor_set(
    corpus: &[TextRecord],
    provider: &dyn Encoder,
    options: &AnchorOptions,
) -> Result<AnchorSet> {
    if options.n == 0 {
        return Err(LdirError::InvalidN {
            n: 0,
            available: corpus.len(),
        });
    }
    let filtered = filter_by_length(corpus, options.bucket);
    if filtered.len() < options.n {
        return Err(LdirError::CorpusTooSmall {
            required: options.n,
            available: filtered.len(),
        });
    }
    let batch = provider.embed_batch(&filtered)?;
    let rows = if options.normalize {
        // unit directions make the selection independent of encoder output scale
        batch
            .vectors
            .iter()
            .map(unit_direction)
            .collect::<Result<Vec<_>>>()?
    } else {
        batch.vectors.clone()
    };
    let picks = match options.method {
        SamplingMethod::Fps => {
            farthest_point_sampling_with(&rows, options.n, options.start, options.normalize)?
        }
        SamplingMethod::Uniform => uniform_sample(rows.len(), options.n, options.seed)?,
        SamplingMethod::Kmeans => kmeans_sample(&rows, options.n, options.seed)?,
    };
    let anchors = picks
        .into_iter()
        .map(|i| Anchor {
            record: filtered[i].clone(),
            vector: batch.vectors[i].clone(),
        })
        .collect();
    AnchorSet::new(
        anchors,
        Provenance {
            method: options.method,
            seed: options.seed,
            bucket: options.bucket,
            start: options.start,
            normalize: options.normalize,
            encoder: provider.descriptor().clone(),
        },
    )
}
