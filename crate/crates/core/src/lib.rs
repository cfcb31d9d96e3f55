//! ID-based self-encryption.
//!
//! A file is split into at least three chunks. Every chunk is hashed with
//! SHA-256 and the hashes become the key material: each chunk is encrypted
//! with AES-128-CBC under a key and IV taken from its neighbour's hash, and
//! the ciphertext is then XOR-obfuscated with a pad built from further chunk
//! hashes. Before use, the AES key is XORed with the SipHash-1-3 digest of
//! the data owner's identity, so the resulting [`DataMap`] only decrypts the
//! file for the identity that produced it.
//!
//! ```
//! use ibse_core::{self_decrypt, self_encrypt, Identity};
//!
//! let id = Identity::new("alice").unwrap();
//! let (map, blobs) = self_encrypt(b"some file contents", &id).unwrap();
//! assert_eq!(self_decrypt(&map, &blobs, &id).unwrap(), b"some file contents");
//!
//! let bob = Identity::new("bob").unwrap();
//! assert!(self_decrypt(&map, &blobs, &bob).is_err());
//! ```

pub mod abi;
pub mod chunk;
pub mod cipher;
pub mod datamap;
mod error;
pub mod fileio;
pub mod hash;
pub mod identity;
pub mod material;
mod selfenc;
pub mod siphash;

pub use chunk::{join_chunks, split_chunks, MAX_CHUNK_SIZE, MIN_CHUNKS, MIN_INPUT_SIZE};
pub use cipher::{decrypt_chunk, encrypt_chunk, encrypted_len};
pub use datamap::{parse_datamap, serialize_datamap, ChunkRecord, DataMap, DATAMAP_VERSION};
pub use error::{Error, Result};
pub use hash::{chunk_hash, ChunkHash};
pub use identity::{cycle_bytes, identity_digest, Identity};
pub use material::{derive_chunk_material, ChunkMaterial};
pub use selfenc::{self_decrypt, self_encrypt};
