use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{LdirError, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SurfaceMetric {
    Edit,
    TokenJaccard,
}

impl SurfaceMetric {
    pub fn name(self) -> &'static str {
        match self {
            SurfaceMetric::Edit => "edit",
            SurfaceMetric::TokenJaccard => "token_jaccard",
        }
    }
}

impl fmt::Display for SurfaceMetric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SurfaceMetric {
    type Err = LdirError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "edit" => Ok(SurfaceMetric::Edit),
            "token_jaccard" => Ok(SurfaceMetric::TokenJaccard),
            other => Err(LdirError::InvalidParameter(format!(
                "unknown surface metric {other:?}"
            ))),
        }
    }
}

/// Levenshtein distance over Unicode scalar values with unit costs.
pub fn edit_distance(a: &str, b: &str) -> usize {
    let a: Vec<char> = a.chars().collect();
    let b: Vec<char> = b.chars().collect();
    if a.is_empty() {
        return b.len();
    }
    let mut prev: Vec<usize> = (0..=b.len()).collect();
    let mut curr = vec![0; b.len() + 1];
    for (i, ca) in a.iter().enumerate() {
        curr[0] = i + 1;
        for (j, cb) in b.iter().enumerate() {
            let substitute = prev[j] + usize::from(ca != cb);
            curr[j + 1] = substitute.min(prev[j + 1] + 1).min(curr[j] + 1);
        }
        std::mem::swap(&mut prev, &mut curr);
    }
    prev[b.len()]
}

pub(crate) fn token_set(text: &str) -> HashSet<String> {
    text.split_whitespace().map(str::to_lowercase).collect()
}

/// `1 − |A∩B| / |A∪B|` over lowercased whitespace tokens; 0 when both sides
/// have no tokens.
pub fn token_jaccard_distance(a: &str, b: &str) -> f64 {
    let ta = token_set(a);
    let tb = token_set(b);
    let union = ta.union(&tb).count();
    if union == 0 {
        return 0.0;
    }
    let inter = ta.intersection(&tb).count();
    1.0 - inter as f64 / union as f64
}

pub fn surface_distance(metric: SurfaceMetric, a: &str, b: &str) -> f64 {
    match metric {
        SurfaceMetric::Edit => edit_distance(a, b) as f64,
        SurfaceMetric::TokenJaccard => token_jaccard_distance(a, b),
    }
}
