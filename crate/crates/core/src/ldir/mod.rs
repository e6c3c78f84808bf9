//! Relative embeddings: one score per anchor text.

mod cognitive;
mod dump;

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::Serialize;

use crate::anchors::AnchorSet;
use crate::encoder::{Encoder, TextRecord};
use crate::error::{LdirError, Result};
use crate::vector::{
    binarize_top_k, binary_distance, dense_distance, dot, surface_distance, unit_direction,
    BinaryMetric, BinaryVector, DenseMetric, SurfaceMetric, Vector,
};

pub use cognitive::{cognitive_load_pairs, dense_cognitive_load, CognitiveLoad, DEFAULT_K};
pub use dump::{
    read_binary_dump, read_jsonl_dump, write_binary_dump, write_jsonl_dump, DumpRecord,
};

/// Relatedness between an anchor and a text. Every variant is symmetric and
/// larger means more related:
///
/// | metric | score |
/// |---|---|
/// | cosine | cosine of encoder vectors |
/// | euclidean, manhattan, chebyshev | negated distance |
/// | hamming, jaccard, dice, sokalsneath | `1 − d` on top-`k` binarized encoder vectors |
/// | edit | negated Levenshtein distance |
/// | token_jaccard | `1 − d` |
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Relatedness {
    #[default]
    Cosine,
    Dense(DenseMetric),
    Binary {
        metric: BinaryMetric,
        k: usize,
    },
    Surface(SurfaceMetric),
}

impl Relatedness {
    /// Whether the score reads encoder vectors.
    pub fn uses_vectors(self) -> bool {
        !matches!(self, Relatedness::Surface(_))
    }
}

impl fmt::Display for Relatedness {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Relatedness::Cosine => f.write_str("cosine"),
            Relatedness::Dense(m) => write!(f, "{m}"),
            Relatedness::Binary { metric, k } => write!(f, "{metric}@{k}"),
            Relatedness::Surface(m) => write!(f, "{m}"),
        }
    }
}

impl FromStr for Relatedness {
    type Err = LdirError;

    /// Accepts `cosine`, a dense or surface metric name, or a binary metric
    /// name with an optional `@k` suffix (default 25).
    fn from_str(s: &str) -> Result<Self> {
        if s == "cosine" {
            return Ok(Relatedness::Cosine);
        }
        if let Ok(m) = s.parse::<DenseMetric>() {
            return Ok(Relatedness::Dense(m));
        }
        if let Ok(m) = s.parse::<SurfaceMetric>() {
            return Ok(Relatedness::Surface(m));
        }
        let (name, k) = match s.split_once('@') {
            Some((name, k)) => {
                let k = k.parse().map_err(|_| {
                    LdirError::InvalidParameter(format!("bad binarization k in {s:?}"))
                })?;
                (name, k)
            }
            None => (s, DEFAULT_K),
        };
        let metric = name.parse::<BinaryMetric>().map_err(|_| {
            LdirError::InvalidParameter(format!("unknown relatedness metric {s:?}"))
        })?;
        if k == 0 {
            return Err(LdirError::InvalidParameter(
                "binarization k must be positive".into(),
            ));
        }
        Ok(Relatedness::Binary { metric, k })
    }
}

/// LDIR vector of one text.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RelativeEmbedding {
    pub scores: Vector,
    pub anchor_set_id: String,
    pub metric: String,
}

impl RelativeEmbedding {
    pub fn len(&self) -> usize {
        self.scores.dim()
    }

    pub fn is_empty(&self) -> bool {
        false
    }
}

impl AsRef<Vector> for RelativeEmbedding {
    fn as_ref(&self) -> &Vector {
        &self.scores
    }
}

enum Prepared {
    Unit(Vec<Vector>),
    Raw(Vec<Vector>),
    Bits(Vec<BinaryVector>),
    Texts(Vec<String>),
}

/// Anchor set prepared for repeated scoring under one metric.
pub struct Scorer<'a> {
    set: &'a AnchorSet,
    metric: Relatedness,
    prepared: Prepared,
}

impl<'a> Scorer<'a> {
    pub fn new(set: &'a AnchorSet, metric: Relatedness) -> Result<Self> {
        let prepared = match metric {
            Relatedness::Cosine => Prepared::Unit(
                set.anchors()
                    .iter()
                    .map(|a| unit_direction(&a.vector))
                    .collect::<Result<_>>()?,
            ),
            Relatedness::Dense(_) => Prepared::Raw(set.vectors()),
            Relatedness::Binary { k, .. } => Prepared::Bits(
                set.anchors()
                    .iter()
                    .map(|a| binarize_top_k(&a.vector, k))
                    .collect::<Result<_>>()?,
            ),
            Relatedness::Surface(_) => Prepared::Texts(
                set.anchors()
                    .iter()
                    .map(|a| a.record.text.clone())
                    .collect(),
            ),
        };
        Ok(Scorer {
            set,
            metric,
            prepared,
        })
    }

    pub fn anchor_set(&self) -> &AnchorSet {
        self.set
    }

    pub fn metric(&self) -> Relatedness {
        self.metric
    }

    /// Scores one text against every anchor. `vector` is the text's encoder
    /// output and may be `None` only for surface metrics.
    pub fn score(&self, text: &str, vector: Option<&Vector>) -> Result<RelativeEmbedding> {
        let need = || {
            LdirError::InvalidParameter(format!("metric {} needs an encoder vector", self.metric))
        };
        let scores: Vec<f64> = match (&self.prepared, self.metric) {
            (Prepared::Unit(anchors), _) => {
                let u = unit_direction(self.check_width(vector.ok_or_else(need)?)?)?;
                anchors
                    .iter()
                    .map(|a| dot(a, &u).clamp(-1.0, 1.0))
                    .collect()
            }
            (Prepared::Raw(anchors), Relatedness::Dense(m)) => {
                let v = self.check_width(vector.ok_or_else(need)?)?;
                anchors
                    .iter()
                    .map(|a| dense_distance(m, a, v).map(|d| -d))
                    .collect::<Result<_>>()?
            }
            (Prepared::Bits(anchors), Relatedness::Binary { metric, k }) => {
                let b = binarize_top_k(self.check_width(vector.ok_or_else(need)?)?, k)?;
                anchors
                    .iter()
                    .map(|a| binary_distance(metric, a, &b).map(|d| 1.0 - d))
                    .collect::<Result<_>>()?
            }
            (Prepared::Texts(anchors), Relatedness::Surface(m)) => anchors
                .iter()
                .map(|a| {
                    let d = surface_distance(m, a, text);
                    match m {
                        SurfaceMetric::Edit => -d,
                        SurfaceMetric::TokenJaccard => 1.0 - d,
                    }
                })
                .collect(),
            _ => unreachable!("prepared state follows the metric"),
        };
        Ok(RelativeEmbedding {
            scores: Vector::new(scores)?,
            anchor_set_id: self.set.id().to_owned(),
            metric: self.metric.to_string(),
        })
    }

    fn check_width<'v>(&self, v: &'v Vector) -> Result<&'v Vector> {
        let dim = self.set.encoder().dim;
        if v.dim() != dim {
            return Err(LdirError::DimensionMismatch {
                expected: dim,
                found: v.dim(),
            });
        }
        Ok(v)
    }

    /// Scores rows in parallel; row `i` is exactly `score(texts[i], vectors[i])`.
    pub fn score_all(
        &self,
        texts: &[TextRecord],
        vectors: Option<&[Vector]>,
    ) -> Result<Vec<RelativeEmbedding>> {
        if let Some(v) = vectors {
            if v.len() != texts.len() {
                return Err(LdirError::LengthMismatch {
                    left: texts.len(),
                    right: v.len(),
                });
            }
        }
        texts
            .par_iter()
            .enumerate()
            .map(|(i, t)| self.score(&t.text, vectors.map(|v| &v[i])))
            .collect()
    }
}

fn check_encoder(set: &AnchorSet, provider: &dyn Encoder) -> Result<()> {
    if !set.encoder().same_encoder(provider.descriptor()) {
        return Err(LdirError::EncoderMismatch {
            expected: set.encoder().identity(),
            found: provider.descriptor().identity(),
        });
    }
    Ok(())
}

/// LDIR embeddings of `texts`, in input order.
pub fn embed_corpus_relative(
    texts: &[TextRecord],
    set: &AnchorSet,
    provider: &dyn Encoder,
    metric: Relatedness,
) -> Result<Vec<RelativeEmbedding>> {
    check_encoder(set, provider)?;
    if texts.is_empty() {
        return Ok(Vec::new());
    }
    let scorer = Scorer::new(set, metric)?;
    if metric.uses_vectors() {
        let batch = provider.embed_batch(texts)?;
        scorer.score_all(texts, Some(&batch.vectors))
    } else {
        scorer.score_all(texts, None)
    }
}

pub fn embed_relative(
    text: &TextRecord,
    set: &AnchorSet,
    provider: &dyn Encoder,
    metric: Relatedness,
) -> Result<RelativeEmbedding> {
    let mut out = embed_corpus_relative(std::slice::from_ref(text), set, provider, metric)?;
    Ok(out.pop().expect("one row per text"))
}

/// Anchor set and encoder pair contributing one block of a fine-grained
/// embedding.
#[derive(Clone, Copy)]
pub struct Segment<'a> {
    pub anchors: &'a AnchorSet,
    pub provider: &'a dyn Encoder,
}

/// Shape of a multi-encoder concatenation.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FineGrainedConfig {
    pub providers: Vec<crate::encoder::EncoderDescriptor>,
    pub per_provider_n: Vec<usize>,
}

impl FineGrainedConfig {
    /// Requires at least two segments.
    pub fn from_segments(segments: &[Segment<'_>]) -> Result<Self> {
        if segments.len() < 2 {
            return Err(LdirError::InvalidParameter(format!(
                "fine-grained embedding needs at least 2 providers, got {}",
                segments.len()
            )));
        }
        Ok(FineGrainedConfig {
            providers: segments
                .iter()
                .map(|s| s.provider.descriptor().clone())
                .collect(),
            per_provider_n: segments.iter().map(|s| s.anchors.len()).collect(),
        })
    }

    pub fn total_dim(&self) -> usize {
        self.per_provider_n.iter().sum()
    }
}

/// Concatenates per-segment relative embeddings in segment order. Segment
/// values are copied unchanged.
pub fn embed_corpus_fine_grained(
    texts: &[TextRecord],
    segments: &[Segment<'_>],
    metric: Relatedness,
) -> Result<Vec<RelativeEmbedding>> {
    if segments.is_empty() {
        return Err(LdirError::EmptyInput);
    }
    let parts = segments
        .iter()
        .map(|s| embed_corpus_relative(texts, s.anchors, s.provider, metric))
        .collect::<Result<Vec<_>>>()?;
    let set_id = segments
        .iter()
        .map(|s| s.anchors.id())
        .collect::<Vec<_>>()
        .join("+");
    let width: usize = segments.iter().map(|s| s.anchors.len()).sum();
    (0..texts.len())
        .map(|i| {
            let mut scores = Vec::with_capacity(width);
            for part in &parts {
                scores.extend_from_slice(part[i].scores.as_slice());
            }
            Ok(RelativeEmbedding {
                scores: Vector::new(scores)?,
                anchor_set_id: set_id.clone(),
                metric: metric.to_string(),
            })
        })
        .collect()
}

pub fn embed_fine_grained(
    text: &TextRecord,
    segments: &[Segment<'_>],
    metric: Relatedness,
) -> Result<RelativeEmbedding> {
    let mut out = embed_corpus_fine_grained(std::slice::from_ref(text), segments, metric)?;
    Ok(out.pop().expect("one row per text"))
}
