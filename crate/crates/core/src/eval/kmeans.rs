//! Lloyd's k-means with k-means++ seeding and best-of-n restarts.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::error::{LdirError, Result};
use crate::vector::{squared_euclidean, Vector};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KMeansConfig {
    pub k: usize,
    pub seed: u64,
    pub restarts: usize,
    pub max_iters: usize,
    /// Convergence threshold on the summed squared centroid shift.
    pub tol: f64,
}

impl KMeansConfig {
    pub fn new(k: usize, seed: u64) -> Self {
        KMeansConfig {
            k,
            seed,
            restarts: 10,
            max_iters: 300,
            tol: 1e-6,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KMeansFit {
    pub labels: Vec<usize>,
    pub centroids: Vec<Vec<f64>>,
    pub inertia: f64,
    /// Inertia after every assignment step of the winning restart.
    pub inertia_trace: Vec<f64>,
    pub restart: usize,
}

/// Cluster labels from [`kmeans_fit`] with the default configuration.
pub fn kmeans(vectors: &[Vector], k: usize, seed: u64) -> Result<Vec<usize>> {
    Ok(kmeans_fit(vectors, &KMeansConfig::new(k, seed))?.labels)
}

pub fn kmeans_fit(vectors: &[Vector], config: &KMeansConfig) -> Result<KMeansFit> {
    let n = vectors.len();
    if n == 0 {
        return Err(LdirError::EmptyInput);
    }
    if config.k == 0 || config.k > n {
        return Err(LdirError::InvalidK { k: config.k, n });
    }
    if config.restarts == 0 {
        return Err(LdirError::InvalidParameter(
            "k-means needs at least one restart".into(),
        ));
    }
    let dim = vectors[0].dim();
    if let Some(bad) = vectors.iter().find(|v| v.dim() != dim) {
        return Err(LdirError::DimensionMismatch {
            expected: dim,
            found: bad.dim(),
        });
    }
    let data: Vec<&[f64]> = vectors.iter().map(|v| v.as_slice()).collect();
    let runs: Vec<KMeansFit> = (0..config.restarts)
        .into_par_iter()
        .map(|restart| {
            let mut rng = ChaCha8Rng::seed_from_u64(config.seed);
            rng.set_stream(restart as u64);
            lloyd(&data, config, &mut rng, restart)
        })
        .collect();
    let best = runs
        .into_iter()
        .reduce(|best, run| {
            if run.inertia < best.inertia {
                run
            } else {
                best
            }
        })
        .expect("at least one restart");
    Ok(best)
}

fn plus_plus_init(data: &[&[f64]], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = data.len();
    let mut chosen = vec![false; n];
    let first = rng.random_range(0..n);
    chosen[first] = true;
    let mut centroids = vec![data[first].to_vec()];
    let mut d2: Vec<f64> = data
        .iter()
        .map(|x| squared_euclidean(x, data[first]))
        .collect();
    while centroids.len() < k {
        let total: f64 = d2.iter().sum();
        let next = if total > 0.0 {
            let target = rng.random::<f64>() * total;
            let mut acc = 0.0;
            let mut pick = None;
            for (i, &d) in d2.iter().enumerate() {
                if d <= 0.0 {
                    continue;
                }
                acc += d;
                pick = Some(i);
                if acc > target {
                    break;
                }
            }
            pick.expect("positive total has a positive entry")
        } else {
            // every remaining point coincides with a centroid
            (0..n).find(|&i| !chosen[i]).expect("k <= n")
        };
        chosen[next] = true;
        for (d, x) in d2.iter_mut().zip(data) {
            *d = d.min(squared_euclidean(x, data[next]));
        }
        centroids.push(data[next].to_vec());
    }
    centroids
}

/// Nearest centroid per point (ties to the lower centroid index) and the
/// squared distance to it.
fn assign(data: &[&[f64]], centroids: &[Vec<f64>]) -> (Vec<usize>, Vec<f64>) {
    data.iter()
        .map(|x| {
            let mut best = (0, f64::INFINITY);
            for (c, centroid) in centroids.iter().enumerate() {
                let d = squared_euclidean(x, centroid);
                if d < best.1 {
                    best = (c, d);
                }
            }
            best
        })
        .unzip()
}

fn lloyd(
    data: &[&[f64]],
    config: &KMeansConfig,
    rng: &mut ChaCha8Rng,
    restart: usize,
) -> KMeansFit {
    let k = config.k;
    let dim = data[0].len();
    let mut centroids = plus_plus_init(data, k, rng);
    let mut trace = Vec::new();
    let (mut labels, mut dists) = assign(data, &centroids);
    trace.push(dists.iter().sum::<f64>());

    for _ in 0..config.max_iters {
        let mut sums = vec![vec![0.0; dim]; k];
        let mut counts = vec![0usize; k];
        for (x, &label) in data.iter().zip(&labels) {
            counts[label] += 1;
            for (s, v) in sums[label].iter_mut().zip(x.iter()) {
                *s += v;
            }
        }
        let mut updated: Vec<Vec<f64>> = sums
            .into_iter()
            .zip(&counts)
            .map(|(s, &c)| s.into_iter().map(|v| v / c.max(1) as f64).collect())
            .collect();

        // empty clusters take the points farthest from their current centroid
        let empty: Vec<usize> = (0..k).filter(|&c| counts[c] == 0).collect();
        if !empty.is_empty() {
            let mut order: Vec<usize> = (0..data.len()).collect();
            order.sort_by(|&a, &b| dists[b].total_cmp(&dists[a]).then(a.cmp(&b)));
            for (c, &donor) in empty.iter().zip(&order) {
                updated[*c] = data[donor].to_vec();
            }
        }

        let shift: f64 = centroids
            .iter()
            .zip(&updated)
            .map(|(old, new)| squared_euclidean(old, new))
            .sum();
        centroids = updated;
        let (new_labels, new_dists) = assign(data, &centroids);
        let inertia: f64 = new_dists.iter().sum();
        debug_assert!(
            inertia <= trace.last().unwrap() * (1.0 + 1e-9) + 1e-12,
            "k-means inertia increased"
        );
        trace.push(inertia);
        labels = new_labels;
        dists = new_dists;
        if shift <= config.tol {
            break;
        }
    }

    KMeansFit {
        labels,
        centroids,
        inertia: *trace.last().unwrap(),
        inertia_trace: trace,
        restart,
    }
}
