use std::collections::HashMap;
use std::hash::Hash;

use crate::error::{LdirError, Result};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VMeasure {
    pub homogeneity: f64,
    pub completeness: f64,
    pub v_measure: f64,
}

fn entropy(counts: impl Iterator<Item = usize>, n: f64) -> f64 {
    counts
        .filter(|&c| c > 0)
        .map(|c| {
            let p = c as f64 / n;
            -p * p.ln()
        })
        .sum()
}

/// Homogeneity, completeness and their harmonic mean, with entropies in nats
/// taken from the contingency table.
pub fn homogeneity_completeness_v_measure<A, B>(gold: &[A], pred: &[B]) -> Result<VMeasure>
where
    A: Eq + Hash,
    B: Eq + Hash,
{
    if gold.len() != pred.len() {
        return Err(LdirError::LengthMismatch {
            left: gold.len(),
            right: pred.len(),
        });
    }
    if gold.is_empty() {
        return Err(LdirError::EmptyInput);
    }
    let n = gold.len() as f64;
    let mut class_counts: HashMap<&A, usize> = HashMap::new();
    let mut cluster_counts: HashMap<&B, usize> = HashMap::new();
    let mut joint: HashMap<(&A, &B), usize> = HashMap::new();
    for (a, b) in gold.iter().zip(pred) {
        *class_counts.entry(a).or_default() += 1;
        *cluster_counts.entry(b).or_default() += 1;
        *joint.entry((a, b)).or_default() += 1;
    }
    let h_class = entropy(class_counts.values().copied(), n);
    let h_cluster = entropy(cluster_counts.values().copied(), n);
    // H(C|K) = -Σ n_ck/N · ln(n_ck / n_k), and symmetrically for H(K|C)
    let (mut h_class_given_cluster, mut h_cluster_given_class) = (0.0, 0.0);
    for ((a, b), &c) in &joint {
        let p = c as f64 / n;
        h_class_given_cluster -= p * (c as f64 / cluster_counts[b] as f64).ln();
        h_cluster_given_class -= p * (c as f64 / class_counts[a] as f64).ln();
    }
    let homogeneity = if h_class == 0.0 {
        1.0
    } else {
        1.0 - h_class_given_cluster / h_class
    };
    let completeness = if h_cluster == 0.0 {
        1.0
    } else {
        1.0 - h_cluster_given_class / h_cluster
    };
    let v_measure = if homogeneity + completeness == 0.0 {
        0.0
    } else {
        2.0 * homogeneity * completeness / (homogeneity + completeness)
    };
    Ok(VMeasure {
        homogeneity,
        completeness,
        v_measure,
    })
}

pub fn v_measure<A: Eq + Hash, B: Eq + Hash>(gold: &[A], pred: &[B]) -> Result<f64> {
    Ok(homogeneity_completeness_v_measure(gold, pred)?.v_measure)
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Mutual-information route: h = I(C;K)/H(C), c = I(C;K)/H(K), computed
    /// from a dense contingency matrix.
    fn oracle(gold: &[usize], pred: &[usize]) -> f64 {
        let rows = gold.iter().max().unwrap() + 1;
        let cols = pred.iter().max().unwrap() + 1;
        let mut table = vec![vec![0f64; cols]; rows];
        for (&g, &p) in gold.iter().zip(pred) {
            table[g][p] += 1.0;
        }
        let n = gold.len() as f64;
        let row_sums: Vec<f64> = table.iter().map(|r| r.iter().sum()).collect();
        let col_sums: Vec<f64> = (0..cols)
            .map(|j| table.iter().map(|r| r[j]).sum())
            .collect();
        let h = |sums: &[f64]| -> f64 {
            sums.iter()
                .filter(|&&s| s > 0.0)
                .map(|&s| -(s / n) * (s / n).ln())
                .sum()
        };
        let (hc, hk) = (h(&row_sums), h(&col_sums));
        let mut mi = 0.0;
        for i in 0..rows {
            for j in 0..cols {
                if table[i][j] > 0.0 {
                    mi += table[i][j] / n * (n * table[i][j] / (row_sums[i] * col_sums[j])).ln();
                }
            }
        }
        let hom = if hc == 0.0 { 1.0 } else { mi / hc };
        let com = if hk == 0.0 { 1.0 } else { mi / hk };
        if hom + com == 0.0 {
            0.0
        } else {
            2.0 * hom * com / (hom + com)
        }
    }

    #[test]
    fn perfect_up_to_renaming() {
        assert!((v_measure(&["a", "a", "b", "c"], &[7, 7, 3, 1]).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_cluster_scores_zero() {
        let r = homogeneity_completeness_v_measure(&[0, 0, 1, 1], &[5, 5, 5, 5]).unwrap();
        assert_eq!(r.homogeneity, 0.0);
        assert_eq!(r.completeness, 1.0);
        assert_eq!(r.v_measure, 0.0);
    }

    #[test]
    fn six_item_contingency() {
        let gold = [0, 0, 1, 1, 2, 2];
        let pred = [0, 0, 0, 1, 1, 1];
        // cells n_ck: (0,0)=2 (1,0)=1 (1,1)=1 (2,1)=2
        // H(C) = ln 3, H(K) = ln 2, H(C|K) = ln 3 − (2/3)·ln 2, H(K|C) = (1/3)·ln 2
        let ln2 = 2f64.ln();
        let ln3 = 3f64.ln();
        let h_c_given_k = ln3 - 2.0 / 3.0 * ln2;
        let h_k_given_c = ln2 / 3.0;
        let hom = 1.0 - h_c_given_k / ln3;
        let com = 1.0 - h_k_given_c / ln2;
        let expected = 2.0 * hom * com / (hom + com);
        let got = homogeneity_completeness_v_measure(&gold, &pred).unwrap();
        assert!((got.homogeneity - hom).abs() < 1e-12);
        assert!((got.completeness - com).abs() < 1e-12);
        assert!((got.v_measure - expected).abs() < 1e-12);
        assert!((oracle(&gold, &pred) - expected).abs() < 1e-12);
    }

    #[test]
    fn length_mismatch() {
        assert!(matches!(
            v_measure(&[1, 2], &[1]),
            Err(LdirError::LengthMismatch { .. })
        ));
    }

    #[test]
    fn symmetric_and_self_one() {
        let a = [0, 1, 1, 2, 2, 2, 0];
        let b = [1, 1, 0, 0, 2, 2, 2];
        assert!((v_measure(&a, &b).unwrap() - v_measure(&b, &a).unwrap()).abs() < 1e-12);
        assert_eq!(v_measure(&a, &a).unwrap(), 1.0);
        assert_eq!(v_measure(&[4, 4], &[4, 4]).unwrap(), 1.0);
    }
}
