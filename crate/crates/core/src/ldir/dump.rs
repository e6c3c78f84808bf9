//! Embedding dumps: JSON lines `{"id", "scores"}` or the compact record layout.

use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{LdirError, Result};
use crate::format;

use super::RelativeEmbedding;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DumpRecord {
    pub id: String,
    pub scores: Vec<f64>,
}

fn check_ids(ids: &[String], rows: &[RelativeEmbedding]) -> Result<usize> {
    if ids.len() != rows.len() {
        return Err(LdirError::LengthMismatch {
            left: ids.len(),
            right: rows.len(),
        });
    }
    let width = rows.first().map_or(0, RelativeEmbedding::len);
    if let Some(bad) = rows.iter().find(|r| r.len() != width) {
        return Err(LdirError::DimensionMismatch {
            expected: width,
            found: bad.len(),
        });
    }
    Ok(width)
}

pub fn write_jsonl_dump(
    mut out: impl Write,
    ids: &[String],
    rows: &[RelativeEmbedding],
) -> Result<()> {
    check_ids(ids, rows)?;
    for (id, row) in ids.iter().zip(rows) {
        let line = serde_json::json!({ "id": id, "scores": row.scores.as_slice() });
        serde_json::to_writer(&mut out, &line).map_err(std::io::Error::from)?;
        out.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_jsonl_dump(reader: impl BufRead, source: &str) -> Result<Vec<DumpRecord>> {
    let mut out = Vec::new();
    for (i, line) in reader.lines().enumerate() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        let record: DumpRecord = serde_json::from_str(&line)
            .map_err(|e| LdirError::parse(format!("{source}:{}", i + 1), e.to_string()))?;
        out.push(record);
    }
    Ok(out)
}

/// Scores are stored as `f32`.
pub fn write_binary_dump(
    mut out: impl Write,
    ids: &[String],
    rows: &[RelativeEmbedding],
) -> Result<()> {
    let width = check_ids(ids, rows)?;
    let values: Vec<Vec<f32>> = rows.iter().map(|r| r.scores.to_f32()).collect();
    let mut bytes = Vec::new();
    format::write_records(
        &mut bytes,
        width,
        ids.iter()
            .map(String::as_str)
            .zip(values.iter().map(Vec::as_slice)),
    )?;
    out.write_all(&bytes)?;
    Ok(())
}

pub fn read_binary_dump(bytes: &[u8]) -> Result<Vec<DumpRecord>> {
    let block = format::decode_records(bytes)?;
    Ok(block
        .records
        .into_iter()
        .map(|(id, values)| DumpRecord {
            id,
            scores: values.into_iter().map(f64::from).collect(),
        })
        .collect())
}
