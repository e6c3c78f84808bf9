//! Anchor samplers: greedy farthest point sampling, uniform draws and k-means
//! medoids. All return distinct row indices into the input matrix.

use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LdirError, Result};
use crate::eval::kmeans::{kmeans_fit, KMeansConfig};
use crate::vector::{euclidean, l2_normalize, squared_euclidean, Vector};

/// How the first farthest-point index is chosen.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "rule", content = "seed")]
pub enum FpsStart {
    /// Row farthest from the mean row, ties to the lower index.
    CentroidFarthest,
    /// Uniformly random row from a seeded generator.
    Seeded(u64),
}

impl fmt::Display for FpsStart {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            FpsStart::CentroidFarthest => f.write_str("centroid_farthest"),
            FpsStart::Seeded(seed) => write!(f, "seeded({seed})"),
        }
    }
}

impl FromStr for FpsStart {
    type Err = LdirError;

    fn from_str(s: &str) -> Result<Self> {
        if s == "centroid_farthest" {
            return Ok(FpsStart::CentroidFarthest);
        }
        s.strip_prefix("seeded(")
            .and_then(|rest| rest.strip_suffix(')'))
            .and_then(|seed| seed.parse().ok())
            .map(FpsStart::Seeded)
            .ok_or_else(|| LdirError::InvalidParameter(format!("unknown FPS start rule {s:?}")))
    }
}

fn check_matrix(vectors: &[Vector], n: usize) -> Result<usize> {
    if vectors.is_empty() {
        return Err(LdirError::EmptyInput);
    }
    if n == 0 || n > vectors.len() {
        return Err(LdirError::InvalidN {
            n,
            available: vectors.len(),
        });
    }
    let dim = vectors[0].dim();
    if let Some(bad) = vectors.iter().find(|v| v.dim() != dim) {
        return Err(LdirError::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    Ok(dim)
}

fn normalized_rows(vectors: &[Vector]) -> Result<Vec<Vector>> {
    vectors.iter().map(l2_normalize).collect()
}

/// Index of the largest value, lowest index on ties, skipping `excluded`.
fn argmax(values: &[f64], excluded: &[bool]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        if excluded[i] {
            continue;
        }
        if best.is_none_or(|b| v > values[b]) {
            best = Some(i);
        }
    }
    best
}

fn mean_row(rows: &[Vector], dim: usize) -> Vec<f64> {
    let mut mean = vec![0.0; dim];
    for row in rows {
        for (m, v) in mean.iter_mut().zip(row.iter()) {
            *m += v;
        }
    }
    let n = rows.len() as f64;
    mean.iter_mut().for_each(|m| *m /= n);
    mean
}

/// Greedy max-min selection on L2-normalized rows.
pub fn farthest_point_sampling(
    vectors: &[Vector],
    n: usize,
    start: FpsStart,
) -> Result<Vec<usize>> {
    farthest_point_sampling_with(vectors, n, start, true)
}

/// Farthest point sampling with optional row normalization.
///
/// Keeps one running minimum distance per row, so each step costs one
/// distance per row: `O(N·n·d)` overall.
pub fn farthest_point_sampling_with(
    vectors: &[Vector],
    n: usize,
    start: FpsStart,
    normalize: bool,
) -> Result<Vec<usize>> {
    let dim = check_matrix(vectors, n)?;
    let normalized;
    let rows: &[Vector] = if normalize {
        normalized = normalized_rows(vectors)?;
        &normalized
    } else {
        vectors
    };
    let total = rows.len();
    let mut selected = vec![false; total];
    let first = match start {
        FpsStart::CentroidFarthest => {
            let mean = mean_row(rows, dim);
            let dist: Vec<f64> = rows.iter().map(|r| euclidean(r, &mean)).collect();
            argmax(&dist, &selected).expect("non-empty")
        }
        FpsStart::Seeded(seed) => ChaCha8Rng::seed_from_u64(seed).random_range(0..total),
    };

    let mut order = Vec::with_capacity(n);
    let mut min_dist = vec![f64::INFINITY; total];
    let mut current = first;
    loop {
        order.push(current);
        selected[current] = true;
        if order.len() == n {
            break;
        }
        let anchor = &rows[current];
        min_dist
            .par_iter_mut()
            .zip(rows.par_iter())
            .with_min_len(512)
            .for_each(|(d, row)| {
                let candidate = euclidean(row, anchor);
                if candidate < *d {
                    *d = candidate;
                }
            });
        current = argmax(&min_dist, &selected).expect("n <= N leaves a candidate");
    }
    Ok(order)
}

/// `n` distinct indices from `0..total`, drawn without replacement.
pub fn uniform_sample(total: usize, n: usize, seed: u64) -> Result<Vec<usize>> {
    if n == 0 || n > total {
        return Err(LdirError::InvalidN {
            n,
            available: total,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok(rand::seq::index::sample(&mut rng, total, n).into_vec())
}

/// Runs k-means with `k = n` on L2-normalized rows and returns, per centroid,
/// the nearest row that no earlier centroid has claimed.
pub fn kmeans_sample(vectors: &[Vector], n: usize, seed: u64) -> Result<Vec<usize>> {
    check_matrix(vectors, n)?;
    let rows = normalized_rows(vectors)?;
    let fit = kmeans_fit(&rows, &KMeansConfig::new(n, seed))?;
    let mut claimed = vec![false; rows.len()];
    let mut picks = Vec::with_capacity(n);
    for centroid in &fit.centroids {
        let dist: Vec<f64> = rows
            .iter()
            .map(|r| -squared_euclidean(r, centroid))
            .collect();
        let nearest = argmax(&dist, &claimed).expect("n <= N leaves an unclaimed row");
        claimed[nearest] = true;
        picks.push(nearest);
    }
    Ok(picks)
}
