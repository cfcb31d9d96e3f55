//! The data map and its canonical JSON form.
//!
//! ```text
//! {"version":"idse-v1","file_size":10,"chunks":[{"index":0,"src_hash":"…","dst_hash":"…","src_size":4,"dst_size":16},…]}
//! ```
//!
//! Keys appear in exactly that order with no whitespace. The identity is
//! deliberately absent: decryption needs it separately.

use serde::{Deserialize, Serialize};

use crate::cipher::encrypted_len;
use crate::hash::ChunkHash;
use crate::{Error, Result, MIN_CHUNKS};

pub const DATAMAP_VERSION: &str = "idse-v1";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ChunkRecord {
    pub index: usize,
    /// Digest of the plaintext chunk.
    pub src_hash: ChunkHash,
    /// Digest of the stored, obfuscated chunk.
    pub dst_hash: ChunkHash,
    pub src_size: u64,
    pub dst_size: u64,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DataMap {
    pub version: String,
    pub file_size: u64,
    pub chunks: Vec<ChunkRecord>,
}

impl DataMap {
    pub fn new(file_size: u64, chunks: Vec<ChunkRecord>) -> Self {
        DataMap {
            version: DATAMAP_VERSION.to_owned(),
            file_size,
            chunks,
        }
    }

    pub fn src_hashes(&self) -> Vec<ChunkHash> {
        self.chunks.iter().map(|c| c.src_hash).collect()
    }

    pub fn dst_hashes(&self) -> Vec<ChunkHash> {
        self.chunks.iter().map(|c| c.dst_hash).collect()
    }

    /// Checks the structural invariants, reporting the first violation.
    pub fn validate(&self) -> Result<()> {
        if self.version != DATAMAP_VERSION {
            return Err(Error::UnsupportedVersion(self.version.clone()));
        }
        if self.chunks.len() < MIN_CHUNKS {
            return Err(Error::InvalidMap(format!(
                "{} chunks, at least {MIN_CHUNKS} required",
                self.chunks.len()
            )));
        }
        let mut total = 0u64;
        for (pos, c) in self.chunks.iter().enumerate() {
            if c.index != pos {
                return Err(Error::InvalidMap(format!(
                    "chunk at position {pos} has index {}",
                    c.index
                )));
            }
            let expected = usize::try_from(c.src_size)
                .map(|s| encrypted_len(s) as u64)
                .ok();
            if expected != Some(c.dst_size) {
                return Err(Error::InvalidMap(format!(
                    "chunk {pos}: dst_size {} inconsistent with src_size {}",
                    c.dst_size, c.src_size
                )));
            }
            total = total
                .checked_add(c.src_size)
                .ok_or_else(|| Error::InvalidMap("chunk sizes overflow".into()))?;
        }
        if total != self.file_size {
            return Err(Error::InvalidMap(format!(
                "chunk sizes sum to {total}, file_size is {}",
                self.file_size
            )));
        }
        Ok(())
    }
}

pub fn serialize_datamap(map: &DataMap) -> Result<Vec<u8>> {
    map.validate().map_err(|e| match e {
        Error::UnsupportedVersion(v) => Error::InvalidMap(format!("version {v:?}")),
        e => e,
    })?;
    Ok(serde_json::to_vec(map).expect("data map serialization is infallible"))
}

pub fn parse_datamap(bytes: &[u8]) -> Result<DataMap> {
    let doc: serde_json::Value =
        serde_json::from_slice(bytes).map_err(|e| Error::MalformedMap(e.to_string()))?;
    match doc.get("version") {
        Some(serde_json::Value::String(v)) if v == DATAMAP_VERSION => {}
        Some(serde_json::Value::String(v)) => return Err(Error::UnsupportedVersion(v.clone())),
        _ => return Err(Error::MalformedMap("missing string field `version`".into())),
    }
    // Hash strings that are not lowercase 64-char hex surface here as serde
    // errors; they are invariant violations rather than syntax errors.
    let map: DataMap = serde_json::from_value(doc).map_err(|e| {
        let msg = e.to_string();
        if msg.contains("lowercase hex") {
            Error::InvalidMap(msg)
        } else {
            Error::MalformedMap(msg)
        }
    })?;
    map.validate()?;
    Ok(map)
}
