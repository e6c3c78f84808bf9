use serde::Serialize;

use crate::error::{LdirError, Result};
use crate::vector::{binarize_top_k, binary_inner_product, dot, Vector};

pub const DEFAULT_K: usize = 25;

/// Mean top-`k` overlap over a set of embedding pairs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CognitiveLoad {
    pub mean: f64,
    /// `mean` rounded half away from zero.
    pub rounded: i64,
    pub pairs: usize,
    pub k: usize,
}

fn check_pairs<A: AsRef<Vector>>(pairs: &[(A, A)]) -> Result<usize> {
    let first = pairs.first().ok_or(LdirError::EmptyInput)?;
    let dim = first.0.as_ref().dim();
    for (a, b) in pairs {
        for v in [a.as_ref(), b.as_ref()] {
            if v.dim() != dim {
                return Err(LdirError::DimensionMismatch {
                    expected: dim,
                    found: v.dim(),
                });
            }
        }
    }
    Ok(dim)
}

/// Binarizes both sides of each pair to their top `k` dimensions and averages
/// the binary inner products.
pub fn cognitive_load_pairs<A: AsRef<Vector>>(pairs: &[(A, A)], k: usize) -> Result<CognitiveLoad> {
    check_pairs(pairs)?;
    let mut total = 0usize;
    for (a, b) in pairs {
        let a = binarize_top_k(a.as_ref(), k)?;
        let b = binarize_top_k(b.as_ref(), k)?;
        total += binary_inner_product(&a, &b)?;
    }
    let mean = total as f64 / pairs.len() as f64;
    Ok(CognitiveLoad {
        mean,
        rounded: mean.round() as i64,
        pairs: pairs.len(),
        k,
    })
}

/// Mean raw inner product of the dense scores. Advisory only: the overlap
/// reading of the load does not apply to real-valued embeddings.
pub fn dense_cognitive_load<A: AsRef<Vector>>(pairs: &[(A, A)]) -> Result<f64> {
    check_pairs(pairs)?;
    let total: f64 = pairs.iter().map(|(a, b)| dot(a.as_ref(), b.as_ref())).sum();
    Ok(total / pairs.len() as f64)
}
