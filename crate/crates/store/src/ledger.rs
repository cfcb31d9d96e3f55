//! World-state simulation of the asset contract.
//!
//! Semantics follow the usual chaincode conventions: creating an existing
//! key fails, and reading, updating or deleting a missing key fails. When
//! backed by a file, every successful mutation rewrites the whole state as
//! canonical JSON (a map from asset id to asset, sorted by id) before
//! returning; a failed write leaves the in-memory state untouched.

use std::collections::BTreeMap;
use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use uuid::Uuid;

use crate::chunkstore::Cid;
use crate::fsutil::write_atomic;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Asset {
    /// UUIDv4, hyphenated lowercase.
    pub id: String,
    /// Lowercase hex of the creator's public key.
    pub owner: String,
    pub cids: Vec<Cid>,
}

#[derive(Debug, thiserror::Error)]
pub enum LedgerError {
    #[error("the asset {0} does not exist")]
    NotFound(String),
    #[error("the asset {0} already exists")]
    AlreadyExists(String),
    #[error("an asset needs at least one CID")]
    EmptyCids,
    #[error("asset id {0:?} is not a UUIDv4")]
    InvalidId(String),
    #[error("owner {0:?} is not lowercase hex of even length")]
    InvalidOwner(String),
    #[error("ledger storage failure at {path}: {source}")]
    StorageFailure { path: PathBuf, source: io::Error },
    #[error("ledger file {path} is corrupt: {detail}")]
    Corrupt { path: PathBuf, detail: String },
}

fn check_owner(owner: &str) -> Result<(), LedgerError> {
    let hex = owner
        .bytes()
        .all(|b| b.is_ascii_digit() || (b'a'..=b'f').contains(&b));
    if owner.is_empty() || owner.len() % 2 != 0 || !hex {
        return Err(LedgerError::InvalidOwner(owner.to_owned()));
    }
    Ok(())
}

fn check_id(id: &str) -> Result<(), LedgerError> {
    match Uuid::parse_str(id) {
        Ok(u) if u.get_version_num() == 4 && u.hyphenated().to_string() == id => Ok(()),
        _ => Err(LedgerError::InvalidId(id.to_owned())),
    }
}

#[derive(Debug, Default)]
pub struct Ledger {
    path: Option<PathBuf>,
    state: BTreeMap<String, Asset>,
}

impl Ledger {
    pub fn in_memory() -> Self {
        Ledger::default()
    }

    /// Opens the ledger persisted at `path`, starting empty if the file does
    /// not exist yet.
    pub fn open(path: impl AsRef<Path>) -> Result<Self, LedgerError> {
        let path = path.as_ref().to_path_buf();
        let state = match fs::read(&path) {
            Ok(bytes) => Self::decode(&path, &bytes)?,
            Err(e) if e.kind() == io::ErrorKind::NotFound => BTreeMap::new(),
            Err(source) => return Err(LedgerError::StorageFailure { path, source }),
        };
        Ok(Ledger {
            path: Some(path),
            state,
        })
    }

    fn decode(path: &Path, bytes: &[u8]) -> Result<BTreeMap<String, Asset>, LedgerError> {
        let corrupt = |detail: String| LedgerError::Corrupt {
            path: path.to_path_buf(),
            detail,
        };
        let state: BTreeMap<String, Asset> =
            serde_json::from_slice(bytes).map_err(|e| corrupt(e.to_string()))?;
        for (key, asset) in &state {
            if key != &asset.id {
                return Err(corrupt(format!("key {key} holds asset {}", asset.id)));
            }
        }
        Ok(state)
    }

    /// Canonical JSON encoding of the whole world state.
    pub fn to_canonical_json(&self) -> Vec<u8> {
        serde_json::to_vec(&self.state).expect("ledger state serializes")
    }

    /// Applies `change` to a copy of the state, persists it, then commits.
    fn commit<T>(
        &mut self,
        change: impl FnOnce(&mut BTreeMap<String, Asset>) -> Result<T, LedgerError>,
    ) -> Result<T, LedgerError> {
        let mut next = self.state.clone();
        let out = change(&mut next)?;
        if let Some(path) = &self.path {
            let bytes = serde_json::to_vec(&next).expect("ledger state serializes");
            write_atomic(path, &bytes).map_err(|source| LedgerError::StorageFailure {
                path: path.clone(),
                source,
            })?;
        }
        self.state = next;
        Ok(out)
    }

    /// Creates an asset under a freshly generated UUIDv4.
    pub fn create_asset(&mut self, owner: &str, cids: Vec<Cid>) -> Result<Asset, LedgerError> {
        let id = Uuid::new_v4().hyphenated().to_string();
        self.create_asset_with_id(&id, owner, cids)
    }

    pub fn create_asset_with_id(
        &mut self,
        id: &str,
        owner: &str,
        cids: Vec<Cid>,
    ) -> Result<Asset, LedgerError> {
        check_id(id)?;
        check_owner(owner)?;
        if cids.is_empty() {
            return Err(LedgerError::EmptyCids);
        }
        let asset = Asset {
            id: id.to_owned(),
            owner: owner.to_owned(),
            cids,
        };
        self.commit(|state| {
            if state.contains_key(id) {
                return Err(LedgerError::AlreadyExists(id.to_owned()));
            }
            state.insert(id.to_owned(), asset.clone());
            Ok(asset)
        })
    }

    pub fn asset_exists(&self, id: &str) -> bool {
        self.state.contains_key(id)
    }

    pub fn read_asset(&self, id: &str) -> Result<Asset, LedgerError> {
        self.state
            .get(id)
            .cloned()
            .ok_or_else(|| LedgerError::NotFound(id.to_owned()))
    }

    /// Replaces the stored record wholesale.
    pub fn update_asset(
        &mut self,
        id: &str,
        owner: &str,
        cids: Vec<Cid>,
    ) -> Result<Asset, LedgerError> {
        check_owner(owner)?;
        self.commit(|state| {
            let slot = state
                .get_mut(id)
                .ok_or_else(|| LedgerError::NotFound(id.to_owned()))?;
            slot.owner = owner.to_owned();
            slot.cids = cids;
            Ok(slot.clone())
        })
    }

    pub fn delete_asset(&mut self, id: &str) -> Result<(), LedgerError> {
        self.commit(|state| {
            state
                .remove(id)
                .map(drop)
                .ok_or_else(|| LedgerError::NotFound(id.to_owned()))
        })
    }

    /// All assets, sorted by id.
    pub fn list_assets(&self) -> Vec<Asset> {
        self.state.values().cloned().collect()
    }
}
