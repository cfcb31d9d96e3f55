//! Storage for encrypted chunks and the records that reference them.
//!
//! * [`chunkstore`]: blobs addressed by the hex SHA-256 of their content.
//! * [`ledger`]: a world-state map of assets `{id, owner, cids}` with
//!   create/read/update/delete semantics, optionally persisted to a file.
//! * [`wallet`]: the Ed25519 keypair whose public key names the owner.

pub mod chunkstore;
mod fsutil;
pub mod ledger;
pub mod wallet;

pub use chunkstore::{
    cid_of, ChunkStore, Cid, DirectoryStore, MemoryStore, StoreBackend, StoreError,
};
pub use ledger::{Asset, Ledger, LedgerError};
pub use wallet::{init_wallet, Wallet, WalletError};
