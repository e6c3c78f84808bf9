//! Dense and binary vectors plus the relatedness and distance kernels used
//! to compare texts: cosine, L1/L2/L∞, agreement-table binary distances and
//! surface string distances.
//!
//! All kernels run in `f64` and sum sequentially so that the same inputs give
//! the same bits on every platform.

mod binary;
mod surface;

use std::fmt;
use std::ops::Deref;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LdirError, Result};

pub use binary::{
    binarize_top_k, binary_distance, binary_inner_product, BinaryMetric, BinaryVector,
};
pub use surface::{edit_distance, surface_distance, token_jaccard_distance, SurfaceMetric};

/// A dense embedding: at least one value, all finite.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(transparent)]
pub struct Vector(Vec<f64>);

impl Vector {
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if values.is_empty() {
            return Err(LdirError::EmptyInput);
        }
        if let Some(index) = values.iter().position(|v| !v.is_finite()) {
            return Err(LdirError::NonFinite { index });
        }
        Ok(Vector(values))
    }

    /// Widens `f32` values; used when reading stored vectors.
    pub fn from_f32(values: &[f32]) -> Result<Self> {
        Self::new(values.iter().map(|&v| f64::from(v)).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn as_slice(&self) -> &[f64] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn norm(&self) -> f64 {
        dot(&self.0, &self.0).sqrt()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }

    /// Values rounded to `f32`, the precision of every on-disk format.
    pub fn to_f32(&self) -> Vec<f32> {
        self.0.iter().map(|&v| v as f32).collect()
    }

    /// Multiplies every value by `factor`.
    pub fn scaled(&self, factor: f64) -> Result<Self> {
        Self::new(self.0.iter().map(|v| v * factor).collect())
    }
}

impl Deref for Vector {
    type Target = [f64];

    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl AsRef<Vector> for Vector {
    fn as_ref(&self) -> &Vector {
        self
    }
}

impl<'de> Deserialize<'de> for Vector {
    fn deserialize<D: serde::Deserializer<'de>>(
        deserializer: D,
    ) -> std::result::Result<Self, D::Error> {
        let values = Vec::<f64>::deserialize(deserializer)?;
        Vector::new(values).map_err(serde::de::Error::custom)
    }
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn check_dims(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(LdirError::DimensionMismatch {
            expected: a.len(),
            found: b.len(),
        });
    }
    Ok(())
}

/// `a·b / (‖a‖·‖b‖)`, clamped to `[-1, 1]`.
pub fn cosine_similarity(a: &Vector, b: &Vector) -> Result<f64> {
    check_dims(a, b)?;
    let na = a.norm();
    let nb = b.norm();
    if na == 0.0 || nb == 0.0 {
        return Err(LdirError::ZeroVector);
    }
    Ok((dot(a, b) / (na * nb)).clamp(-1.0, 1.0))
}

pub fn l2_normalize(v: &Vector) -> Result<Vector> {
    let norm = v.norm();
    if norm == 0.0 {
        return Err(LdirError::ZeroVector);
    }
    Ok(Vector(v.iter().map(|x| x / norm).collect()))
}

/// Unit vector whose bits do not depend on the input's positive scale.
///
/// The direction is normalized in `f64`, snapped to the `f32` grid and
/// normalized again. Rescaled inputs differ from each other by a few `f64`
/// ulps after the first normalization; the snap absorbs that difference, so
/// `unit_direction(c·v)` and `unit_direction(v)` agree bit for bit except when
/// a component sits within a few ulps of an `f32` rounding boundary.
pub fn unit_direction(v: &Vector) -> Result<Vector> {
    let first = l2_normalize(v)?;
    let snapped = Vector(first.iter().map(|&x| f64::from(x as f32)).collect());
    l2_normalize(&snapped)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DenseMetric {
    Euclidean,
    Manhattan,
    Chebyshev,
}

impl DenseMetric {
    pub fn name(self) -> &'static str {
        match self {
            DenseMetric::Euclidean => "euclidean",
            DenseMetric::Manhattan => "manhattan",
            DenseMetric::Chebyshev => "chebyshev",
        }
    }
}

impl fmt::Display for DenseMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for DenseMetric {
    type Err = LdirError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "euclidean" => Ok(DenseMetric::Euclidean),
            "manhattan" => Ok(DenseMetric::Manhattan),
            "chebyshev" => Ok(DenseMetric::Chebyshev),
            other => Err(LdirError::InvalidParameter(format!(
                "unknown dense metric {other:?}"
            ))),
        }
    }
}

pub(crate) fn euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt()
}

pub(crate) fn squared_euclidean(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

pub fn dense_distance(metric: DenseMetric, a: &Vector, b: &Vector) -> Result<f64> {
    check_dims(a, b)?;
    let d = match metric {
        DenseMetric::Euclidean => euclidean(a, b),
        DenseMetric::Manhattan => a.iter().zip(b.iter()).map(|(x, y)| (x - y).abs()).sum(),
        DenseMetric::Chebyshev => a
            .iter()
            .zip(b.iter())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max),
    };
    Ok(d)
}
