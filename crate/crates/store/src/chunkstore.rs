//! Content-addressed blob storage standing in for an IPFS node.

use std::collections::HashMap;
use std::fmt;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};
use std::str::FromStr;
use std::sync::RwLock;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::fsutil::write_atomic;

/// Content identifier: 64 lowercase hex characters of the SHA-256 of a blob.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(try_from = "String", into = "String")]
pub struct Cid(String);

impl Cid {
    pub fn as_str(&self) -> &str {
        &self.0
    }
}

pub fn cid_of(blob: &[u8]) -> Cid {
    Cid(hex::encode(Sha256::digest(blob)))
}

impl fmt::Display for Cid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Debug for Cid {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Cid({})", self.0)
    }
}

impl FromStr for Cid {
    type Err = StoreError;

    fn from_str(s: &str) -> Result<Self, StoreError> {
        let ok = s.len() == 64
            && s.bytes()
                .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b));
        if ok {
            Ok(Cid(s.to_owned()))
        } else {
            Err(StoreError::InvalidCid(s.to_owned()))
        }
    }
}

impl TryFrom<String> for Cid {
    type Error = StoreError;

    fn try_from(s: String) -> Result<Self, StoreError> {
        s.parse()
    }
}

impl From<Cid> for String {
    fn from(c: Cid) -> String {
        c.0
    }
}

#[derive(Debug, thiserror::Error)]
pub enum StoreError {
    #[error("no object with CID {0}")]
    NotFound(Cid),
    #[error("stored object {0} no longer matches its CID")]
    CorruptObject(Cid),
    #[error("not a CID: {0:?}")]
    InvalidCid(String),
    #[error("storage failure at {path}: {source}")]
    StorageFailure { path: PathBuf, source: io::Error },
}

pub trait ChunkStore {
    /// Stores `blob` and returns its CID. Storing identical bytes again is a
    /// no-op returning the same CID.
    fn put_chunk(&self, blob: &[u8]) -> Result<Cid, StoreError>;

    /// Fetches the blob named `cid`, verifying its digest.
    fn get_chunk(&self, cid: &Cid) -> Result<Vec<u8>, StoreError>;

    /// Whether [`ChunkStore::get_chunk`] would succeed for `cid`.
    fn has_chunk(&self, cid: &Cid) -> bool {
        self.get_chunk(cid).is_ok()
    }
}

/// Where chunks live.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StoreBackend {
    /// Process-local; contents vanish with the store.
    Memory,
    /// One file per object named by its CID under `root`.
    Directory(PathBuf),
}

impl StoreBackend {
    pub fn open(&self) -> Result<Box<dyn ChunkStore + Send + Sync>, StoreError> {
        Ok(match self {
            StoreBackend::Memory => Box::new(MemoryStore::default()),
            StoreBackend::Directory(root) => Box::new(DirectoryStore::open(root)?),
        })
    }
}

#[derive(Debug, Default)]
pub struct MemoryStore {
    objects: RwLock<HashMap<Cid, Vec<u8>>>,
}

impl MemoryStore {
    pub fn len(&self) -> usize {
        self.objects.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}

impl ChunkStore for MemoryStore {
    fn put_chunk(&self, blob: &[u8]) -> Result<Cid, StoreError> {
        let cid = cid_of(blob);
        self.objects
            .write()
            .unwrap()
            .entry(cid.clone())
            .or_insert_with(|| blob.to_vec());
        Ok(cid)
    }

    fn get_chunk(&self, cid: &Cid) -> Result<Vec<u8>, StoreError> {
        let objects = self.objects.read().unwrap();
        let blob = objects
            .get(cid)
            .ok_or_else(|| StoreError::NotFound(cid.clone()))?;
        if &cid_of(blob) != cid {
            return Err(StoreError::CorruptObject(cid.clone()));
        }
        Ok(blob.clone())
    }
}

#[derive(Debug, Clone)]
pub struct DirectoryStore {
    root: PathBuf,
}

impl DirectoryStore {
    /// Opens (creating if needed) a store rooted at `root`.
    pub fn open(root: impl AsRef<Path>) -> Result<Self, StoreError> {
        let root = root.as_ref().to_path_buf();
        fs::create_dir_all(&root).map_err(|source| StoreError::StorageFailure {
            path: root.clone(),
            source,
        })?;
        Ok(DirectoryStore { root })
    }

    pub fn root(&self) -> &Path {
        &self.root
    }

    pub fn object_path(&self, cid: &Cid) -> PathBuf {
        self.root.join(cid.as_str())
    }
}

impl ChunkStore for DirectoryStore {
    fn put_chunk(&self, blob: &[u8]) -> Result<Cid, StoreError> {
        let cid = cid_of(blob);
        let path = self.object_path(&cid);
        if matches!(fs::read(&path), Ok(existing) if existing == blob) {
            return Ok(cid);
        }
        write_atomic(&path, blob).map_err(|source| StoreError::StorageFailure { path, source })?;
        Ok(cid)
    }

    fn get_chunk(&self, cid: &Cid) -> Result<Vec<u8>, StoreError> {
        let path = self.object_path(cid);
        let blob = fs::read(&path).map_err(|source| match source.kind() {
            io::ErrorKind::NotFound => StoreError::NotFound(cid.clone()),
            _ => StoreError::StorageFailure { path, source },
        })?;
        if &cid_of(&blob) != cid {
            return Err(StoreError::CorruptObject(cid.clone()));
        }
        Ok(blob)
    }
}
