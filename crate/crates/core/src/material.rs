//! Per-chunk key material.
//!
//! For chunk `i` of `n`, with `H` the list of plaintext chunk hashes:
//!
//! * key and IV come from `H[i-1]` (cyclic): the first 16 bytes are the key
//!   base, the last 16 the IV;
//! * the key base is XORed with the identity digest cycled to 16 bytes;
//! * the obfuscation pad seed is `H[i] || H[i-2]` (cyclic).

use crate::hash::ChunkHash;
use crate::identity::Identity;
use crate::{Error, Result, MIN_CHUNKS};

pub const KEY_LEN: usize = 16;
pub const IV_LEN: usize = 16;
pub const PAD_SEED_LEN: usize = 64;

#[derive(Clone, PartialEq, Eq)]
pub struct ChunkMaterial {
    pub key: [u8; KEY_LEN],
    pub iv: [u8; IV_LEN],
    pub pad_seed: [u8; PAD_SEED_LEN],
}

impl std::fmt::Debug for ChunkMaterial {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("ChunkMaterial").finish_non_exhaustive()
    }
}

/// The identity digest cycled to the AES key length.
pub fn identity_pad(id: &Identity) -> [u8; KEY_LEN] {
    let digest = id.digest();
    std::array::from_fn(|i| digest[i % digest.len()])
}

/// Index of the chunk whose hash keys chunk `index`.
pub fn key_source_index(index: usize, count: usize) -> usize {
    (index + count - 1) % count
}

/// Index of the chunk whose hash forms the second half of the pad seed.
pub fn pad_partner_index(index: usize, count: usize) -> usize {
    (index + count - 2) % count
}

pub fn derive_chunk_material(
    index: usize,
    hashes: &[ChunkHash],
    id: &Identity,
) -> Result<ChunkMaterial> {
    derive_with_pad(index, hashes, &identity_pad(id))
}

pub(crate) fn derive_with_pad(
    index: usize,
    hashes: &[ChunkHash],
    id_pad: &[u8; KEY_LEN],
) -> Result<ChunkMaterial> {
    let count = hashes.len();
    if count < MIN_CHUNKS {
        return Err(Error::InvalidMap(format!(
            "{count} chunk hashes given, at least {MIN_CHUNKS} required"
        )));
    }
    if index >= count {
        return Err(Error::IndexOutOfRange { index, count });
    }

    let source = hashes[key_source_index(index, count)].as_bytes();
    let mut key = [0u8; KEY_LEN];
    for (k, (s, p)) in key.iter_mut().zip(source[..KEY_LEN].iter().zip(id_pad)) {
        *k = s ^ p;
    }
    let iv = source[KEY_LEN..].try_into().unwrap();

    let mut pad_seed = [0u8; PAD_SEED_LEN];
    pad_seed[..32].copy_from_slice(hashes[index].as_bytes());
    pad_seed[32..].copy_from_slice(hashes[pad_partner_index(index, count)].as_bytes());

    Ok(ChunkMaterial { key, iv, pad_seed })
}
