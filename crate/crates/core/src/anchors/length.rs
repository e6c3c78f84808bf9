use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::encoder::TextRecord;
use crate::error::{LdirError, Result};

/// Anchor-text length bucket by whitespace token count: short `< 20`,
/// medium `20..=100`, long `> 100`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum LengthBucket {
    Short,
    Medium,
    Long,
    #[default]
    All,
}

impl LengthBucket {
    pub fn name(self) -> &'static str {
        match self {
            LengthBucket::Short => "short",
            LengthBucket::Medium => "medium",
            LengthBucket::Long => "long",
            LengthBucket::All => "all",
        }
    }

    pub fn contains(self, tokens: usize) -> bool {
        match self {
            LengthBucket::Short => tokens < 20,
            LengthBucket::Medium => (20..=100).contains(&tokens),
            LengthBucket::Long => tokens > 100,
            LengthBucket::All => true,
        }
    }
}

impl fmt::Display for LengthBucket {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for LengthBucket {
    type Err = LdirError;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "short" => Ok(LengthBucket::Short),
            "medium" => Ok(LengthBucket::Medium),
            "long" => Ok(LengthBucket::Long),
            "all" => Ok(LengthBucket::All),
            other => Err(LdirError::InvalidParameter(format!(
                "unknown length bucket {other:?}"
            ))),
        }
    }
}

pub fn token_count(text: &str) -> usize {
    text.split_whitespace().count()
}

/// Keeps the records whose token count falls in `bucket`, in input order.
pub fn filter_by_length(corpus: &[TextRecord], bucket: LengthBucket) -> Vec<TextRecord> {
    corpus
        .iter()
        .filter(|r| bucket.contains(token_count(&r.text)))
        .cloned()
        .collect()
}
