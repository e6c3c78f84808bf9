use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Vector;
use crate::error::{LdirError, Result};

/// Bit vector packed into 64-bit words. Bits past `dim` in the last word are
/// always zero.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BinaryVector {
    words: Vec<u64>,
    dim: usize,
    k: usize,
}

impl BinaryVector {
    pub fn from_bits(bits: &[bool]) -> Result<Self> {
        if bits.is_empty() {
            return Err(LdirError::EmptyInput);
        }
        let mut words = vec![0u64; bits.len().div_ceil(64)];
        for (i, _) in bits.iter().enumerate().filter(|(_, &b)| b) {
            words[i / 64] |= 1 << (i % 64);
        }
        Ok(Self::from_words(words, bits.len()))
    }

    fn from_words(words: Vec<u64>, dim: usize) -> Self {
        let k = words.iter().map(|w| w.count_ones() as usize).sum();
        BinaryVector { words, dim, k }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// Number of set bits.
    pub fn k(&self) -> usize {
        self.k
    }

    pub fn get(&self, index: usize) -> bool {
        index < self.dim && self.words[index / 64] >> (index % 64) & 1 == 1
    }

    pub fn bits(&self) -> Vec<bool> {
        (0..self.dim).map(|i| self.get(i)).collect()
    }

    /// Indices of set bits, ascending.
    pub fn ones(&self) -> Vec<usize> {
        (0..self.dim).filter(|&i| self.get(i)).collect()
    }

    fn check_dims(&self, other: &Self) -> Result<()> {
        if self.dim != other.dim {
            return Err(LdirError::DimensionMismatch {
                expected: self.dim,
                found: other.dim,
            });
        }
        Ok(())
    }

    /// `(c_TT, c_D)`: positions set in both, and positions that disagree.
    fn agreement(&self, other: &Self) -> (usize, usize) {
        self.words
            .iter()
            .zip(&other.words)
            .fold((0, 0), |(tt, d), (a, b)| {
                (
                    tt + (a & b).count_ones() as usize,
                    d + (a ^ b).count_ones() as usize,
                )
            })
    }
}

/// Sets exactly the `k` largest entries of `v`. Equal values go to the lower
/// index first.
pub fn binarize_top_k(v: &Vector, k: usize) -> Result<BinaryVector> {
    if k == 0 {
        return Err(LdirError::InvalidParameter(
            "top-k binarization needs k >= 1".into(),
        ));
    }
    if k > v.dim() {
        return Err(LdirError::KTooLarge { k, dim: v.dim() });
    }
    let mut order: Vec<usize> = (0..v.dim()).collect();
    order.sort_by(|&i, &j| v[j].total_cmp(&v[i]).then(i.cmp(&j)));
    let mut words = vec![0u64; v.dim().div_ceil(64)];
    for &i in &order[..k] {
        words[i / 64] |= 1 << (i % 64);
    }
    Ok(BinaryVector::from_words(words, v.dim()))
}

/// `Σ a_i·b_i`, the number of positions set in both vectors.
pub fn binary_inner_product(a: &BinaryVector, b: &BinaryVector) -> Result<usize> {
    a.check_dims(b)?;
    Ok(a.agreement(b).0)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BinaryMetric {
    Hamming,
    Jaccard,
    Dice,
    Sokalsneath,
}

impl BinaryMetric {
    pub fn name(self) -> &'static str {
        match self {
            BinaryMetric::Hamming => "hamming",
            BinaryMetric::Jaccard => "jaccard",
            BinaryMetric::Dice => "dice",
            BinaryMetric::Sokalsneath => "sokalsneath",
        }
    }
}

impl fmt::Display for BinaryMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for BinaryMetric {
    type Err = LdirError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "hamming" => Ok(BinaryMetric::Hamming),
            "jaccard" => Ok(BinaryMetric::Jaccard),
            "dice" => Ok(BinaryMetric::Dice),
            "sokalsneath" => Ok(BinaryMetric::Sokalsneath),
            other => Err(LdirError::InvalidParameter(format!(
                "unknown binary metric {other:?}"
            ))),
        }
    }
}

/// Dissimilarity from the agreement table of two bit vectors.
///
/// With `c_TT` positions set in both and `c_D` positions that disagree:
/// hamming `c_D/m`, jaccard `c_D/(c_TT+c_D)`, dice `c_D/(2c_TT+c_D)`,
/// sokalsneath `2c_D/(c_TT+2c_D)`. The last three are 0 when neither vector
/// has a set bit.
pub fn binary_distance(metric: BinaryMetric, a: &BinaryVector, b: &BinaryVector) -> Result<f64> {
    a.check_dims(b)?;
    let (tt, d) = a.agreement(b);
    let (tt, d) = (tt as f64, d as f64);
    if metric != BinaryMetric::Hamming && tt + d == 0.0 {
        return Ok(0.0);
    }
    Ok(match metric {
        BinaryMetric::Hamming => d / a.dim as f64,
        BinaryMetric::Jaccard => d / (tt + d),
        BinaryMetric::Dice => d / (2.0 * tt + d),
        BinaryMetric::Sokalsneath => 2.0 * d / (tt + 2.0 * d),
    })
}
