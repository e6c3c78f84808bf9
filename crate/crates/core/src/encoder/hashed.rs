use std::collections::BTreeMap;

use super::{EmbeddingBatch, Encoder, EncoderDescriptor, EncoderKind, ProviderSpec, TextRecord};
use crate::error::{LdirError, Result};
use crate::vector::{l2_normalize, Vector};

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub const DEFAULT_DIM: usize = 256;
pub const DEFAULT_SEED: u64 = 42;

fn fmix64(mut h: u64) -> u64 {
    h ^= h >> 33;
    h = h.wrapping_mul(0xff51_afd7_ed55_8ccd);
    h ^= h >> 33;
    h = h.wrapping_mul(0xc4ce_b9fe_1a85_ec53);
    h ^ (h >> 33)
}

/// Seeded 64-bit hash: FNV-1a over the bytes with a seed-dependent offset
/// basis, followed by the murmur3 finalizer so that every output bit depends
/// on every input bit. Stable across platforms and releases.
pub fn hash64(bytes: &[u8], seed: u64) -> u64 {
    let mut h = FNV_OFFSET ^ fmix64(seed.wrapping_add(0x9e37_79b9_7f4a_7c15));
    for &b in bytes {
        h ^= u64::from(b);
        h = h.wrapping_mul(FNV_PRIME);
    }
    fmix64(h)
}

/// Signed feature hashing of lowercased whitespace tokens into `dim` buckets,
/// L2-normalized. Texts without tokens (or whose signs cancel out) map to the
/// first basis vector.
pub fn hashed_encode(text: &str, dim: usize, seed: u64) -> Result<Vector> {
    if dim < 8 {
        return Err(LdirError::InvalidParameter(format!(
            "hashed encoder needs dim >= 8, got {dim}"
        )));
    }
    let mut acc = vec![0.0f64; dim];
    for token in text.split_whitespace() {
        let h = hash64(token.to_lowercase().as_bytes(), seed);
        let bucket = (h % dim as u64) as usize;
        acc[bucket] += if h >> 63 == 0 { 1.0 } else { -1.0 };
    }
    let v = Vector::new(acc)?;
    if v.is_zero() {
        let mut basis = vec![0.0; dim];
        basis[0] = 1.0;
        return Vector::new(basis);
    }
    l2_normalize(&v)
}

/// Deterministic offline encoder backed by [`hashed_encode`].
#[derive(Debug, Clone)]
pub struct HashedEncoder {
    descriptor: EncoderDescriptor,
    seed: u64,
}

impl HashedEncoder {
    pub fn new(dim: usize, seed: u64) -> Result<Self> {
        Self::named("hashed", dim, seed)
    }

    pub fn named(name: &str, dim: usize, seed: u64) -> Result<Self> {
        if dim < 8 {
            return Err(LdirError::InvalidParameter(format!(
                "hashed encoder needs dim >= 8, got {dim}"
            )));
        }
        Ok(HashedEncoder {
            descriptor: EncoderDescriptor {
                kind: EncoderKind::Hashed,
                name: name.to_owned(),
                dim,
                params: BTreeMap::from([("seed".to_owned(), seed.to_string())]),
            },
            seed,
        })
    }

    pub fn from_spec(spec: &ProviderSpec) -> Result<Self> {
        for key in spec.params.keys() {
            if !matches!(key.as_str(), "dim" | "seed" | "name") {
                return Err(LdirError::InvalidParameter(format!(
                    "hashed provider has no parameter {key:?}"
                )));
            }
        }
        let dim = spec.parsed("dim")?.unwrap_or(DEFAULT_DIM);
        let seed = spec.parsed("seed")?.unwrap_or(DEFAULT_SEED);
        Self::named(spec.get("name").unwrap_or("hashed"), dim, seed)
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn encode(&self, text: &str) -> Vector {
        hashed_encode(text, self.descriptor.dim, self.seed)
            .expect("dimension validated at construction")
    }
}

impl Encoder for HashedEncoder {
    fn descriptor(&self) -> &EncoderDescriptor {
        &self.descriptor
    }

    fn embed_batch(&self, texts: &[TextRecord]) -> Result<EmbeddingBatch> {
        if texts.is_empty() {
            return Err(LdirError::EmptyInput);
        }
        Ok(EmbeddingBatch {
            ids: texts.iter().map(|t| t.id.clone()).collect(),
            vectors: texts.iter().map(|t| self.encode(&t.text)).collect(),
        })
    }
}
