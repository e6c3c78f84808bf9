//! Compact binary record layout shared by vector stores, anchor-set files and
//! embedding dumps.
//!
//! ```text
//! "LDIR" | u8 version = 1 | u32 dim | u64 count
//! count × ( u32 id_len | id bytes (UTF-8) | dim × f32 )
//! ```
//!
//! All integers and floats are little-endian.

use crate::error::{LdirError, Result};

pub const MAGIC: &[u8; 4] = b"LDIR";
pub const VERSION: u8 = 1;

const HEADER_LEN: usize = 4 + 1 + 4 + 8;

pub fn has_magic(bytes: &[u8]) -> bool {
    bytes.starts_with(MAGIC)
}

/// Decoded record block.
#[derive(Debug, Clone, PartialEq)]
pub struct RecordBlock {
    pub dim: usize,
    pub records: Vec<(String, Vec<f32>)>,
}

pub fn write_records<'a, I>(out: &mut Vec<u8>, dim: usize, records: I) -> Result<()>
where
    I: ExactSizeIterator<Item = (&'a str, &'a [f32])>,
{
    let dim32 = u32::try_from(dim)
        .map_err(|_| LdirError::InvalidParameter(format!("dimension {dim} too large")))?;
    out.extend_from_slice(MAGIC);
    out.push(VERSION);
    out.extend_from_slice(&dim32.to_le_bytes());
    out.extend_from_slice(&(records.len() as u64).to_le_bytes());
    for (id, values) in records {
        if values.len() != dim {
            return Err(LdirError::DimensionMismatch {
                expected: dim,
                found: values.len(),
            });
        }
        let len = u32::try_from(id.len())
            .map_err(|_| LdirError::InvalidParameter("id too long".into()))?;
        out.extend_from_slice(&len.to_le_bytes());
        out.extend_from_slice(id.as_bytes());
        for v in values {
            out.extend_from_slice(&v.to_le_bytes());
        }
    }
    Ok(())
}

/// Cursor over a byte slice that reports offsets in its errors.
pub(crate) struct Reader<'a> {
    bytes: &'a [u8],
    pos: usize,
}

impl<'a> Reader<'a> {
    pub(crate) fn new(bytes: &'a [u8]) -> Self {
        Reader { bytes, pos: 0 }
    }

    pub(crate) fn position(&self) -> usize {
        self.pos
    }

    pub(crate) fn remaining(&self) -> usize {
        self.bytes.len() - self.pos
    }

    pub(crate) fn error(&self, message: impl Into<String>) -> LdirError {
        LdirError::parse(format!("byte offset {}", self.pos), message)
    }

    pub(crate) fn take(&mut self, n: usize, what: &str) -> Result<&'a [u8]> {
        if self.remaining() < n {
            return Err(self.error(format!("truncated while reading {what}")));
        }
        let slice = &self.bytes[self.pos..self.pos + n];
        self.pos += n;
        Ok(slice)
    }

    pub(crate) fn u8(&mut self, what: &str) -> Result<u8> {
        Ok(self.take(1, what)?[0])
    }

    pub(crate) fn u32(&mut self, what: &str) -> Result<u32> {
        Ok(u32::from_le_bytes(self.take(4, what)?.try_into().unwrap()))
    }

    pub(crate) fn u64(&mut self, what: &str) -> Result<u64> {
        Ok(u64::from_le_bytes(self.take(8, what)?.try_into().unwrap()))
    }
}

/// Reads one record block from the front of `reader`, leaving the cursor just
/// past it.
pub(crate) fn read_records(reader: &mut Reader<'_>) -> Result<RecordBlock> {
    if reader.remaining() < HEADER_LEN {
        return Err(reader.error("truncated header"));
    }
    if reader.take(4, "magic")? != MAGIC {
        return Err(LdirError::parse(
            "byte offset 0",
            "bad magic bytes, expected \"LDIR\"",
        ));
    }
    let version = reader.u8("version")?;
    if version != VERSION {
        return Err(LdirError::VersionMismatch { found: version });
    }
    let dim = reader.u32("dimension")? as usize;
    let count = reader.u64("record count")?;
    if dim == 0 && count > 0 {
        return Err(reader.error("zero dimension with non-empty record list"));
    }
    // every record needs at least its length prefix and vector
    let min_record = 4 + 4 * dim as u64;
    if count.saturating_mul(min_record) > reader.remaining() as u64 {
        return Err(reader.error(format!(
            "header declares {count} records but the file is too short"
        )));
    }
    let mut records = Vec::with_capacity(count as usize);
    for index in 0..count {
        let len = reader.u32("id length")? as usize;
        let id_bytes = reader.take(len, "id")?;
        let id = std::str::from_utf8(id_bytes)
            .map_err(|_| reader.error(format!("record {index}: id is not UTF-8")))?
            .to_owned();
        let raw = reader.take(4 * dim, &format!("vector of record {id:?}"))?;
        let values: Vec<f32> = raw
            .chunks_exact(4)
            .map(|c| f32::from_le_bytes(c.try_into().unwrap()))
            .collect();
        if values.iter().any(|v| !v.is_finite()) {
            return Err(reader.error(format!("record {id:?} contains a non-finite value")));
        }
        records.push((id, values));
    }
    Ok(RecordBlock { dim, records })
}

/// Decodes a file that holds exactly one record block.
pub fn decode_records(bytes: &[u8]) -> Result<RecordBlock> {
    let mut reader = Reader::new(bytes);
    let block = read_records(&mut reader)?;
    if reader.remaining() != 0 {
        return Err(reader.error("trailing bytes after last record"));
    }
    Ok(block)
}

pub fn encode_records(block: &RecordBlock) -> Result<Vec<u8>> {
    let mut out = Vec::new();
    write_records(
        &mut out,
        block.dim,
        block
            .records
            .iter()
            .map(|(id, v)| (id.as_str(), v.as_slice())),
    )?;
    Ok(out)
}

#[cfg(test)]
mod tests {
    use proptest::prelude::*;

    use super::*;

    fn sample() -> RecordBlock {
        RecordBlock {
            dim: 2,
            records: vec![
                ("a".into(), vec![0.5, -1.25]),
                ("βeta".into(), vec![3.0, 1e-7]),
            ],
        }
    }

    #[test]
    fn layout_is_bit_exact() {
        let bytes = encode_records(&sample()).unwrap();
        assert_eq!(&bytes[..4], b"LDIR");
        assert_eq!(bytes[4], 1);
        assert_eq!(&bytes[5..9], &2u32.to_le_bytes());
        assert_eq!(&bytes[9..17], &2u64.to_le_bytes());
        assert_eq!(&bytes[17..21], &1u32.to_le_bytes());
        assert_eq!(bytes[21], b'a');
        assert_eq!(&bytes[22..26], &0.5f32.to_le_bytes());
        assert_eq!(bytes.len(), 17 + (4 + 1 + 8) + (4 + "βeta".len() + 8));
    }

    #[test]
    fn every_truncation_fails() {
        let bytes = encode_records(&sample()).unwrap();
        for cut in 0..bytes.len() {
            assert!(
                matches!(decode_records(&bytes[..cut]), Err(LdirError::Parse { .. })),
                "cut {cut}"
            );
        }
        let mut extra = bytes.clone();
        extra.push(0);
        assert!(decode_records(&extra).is_err());
    }

    #[test]
    fn version_and_magic_are_checked() {
        let mut bytes = encode_records(&sample()).unwrap();
        bytes[4] = 2;
        assert!(matches!(
            decode_records(&bytes),
            Err(LdirError::VersionMismatch { found: 2 })
        ));
        bytes[4] = 1;
        bytes[0] = b'X';
        assert!(matches!(
            decode_records(&bytes),
            Err(LdirError::Parse { .. })
        ));
    }

    #[test]
    fn huge_count_is_rejected_without_allocating() {
        let mut bytes = encode_records(&sample()).unwrap();
        bytes[9..17].copy_from_slice(&u64::MAX.to_le_bytes());
        assert!(matches!(
            decode_records(&bytes),
            Err(LdirError::Parse { .. })
        ));
    }

    proptest! {
        #[test]
        fn reencoding_is_byte_identical(
            dim in 1usize..6,
            rows in proptest::collection::vec(("[a-z0-9]{0,6}", proptest::collection::vec(-1e6f32..1e6, 6)), 0..8),
        ) {
            let block = RecordBlock {
                dim,
                records: rows.into_iter().map(|(id, v)| (id, v[..dim].to_vec())).collect(),
            };
            let bytes = encode_records(&block).unwrap();
            let decoded = decode_records(&bytes).unwrap();
            prop_assert_eq!(&decoded, &block);
            prop_assert_eq!(encode_records(&decoded).unwrap(), bytes);
        }
    }
}
