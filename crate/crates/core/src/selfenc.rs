use crate::chunk::split_chunks;
use crate::cipher::{decrypt_chunk, encrypt_chunk};
use crate::datamap::{ChunkRecord, DataMap};
use crate::hash::{chunk_hash, ChunkHash};
use crate::identity::Identity;
use crate::material::{derive_with_pad, identity_pad};
use crate::{Error, Result};

/// Encrypts `data` for `id`, returning the data map and one blob per chunk.
///
/// Deterministic in `(data, id)`. `blobs[i]` hashes to
/// `map.chunks[i].dst_hash`.
pub fn self_encrypt(data: &[u8], id: &Identity) -> Result<(DataMap, Vec<Vec<u8>>)> {
    let chunks = split_chunks(data)?;
    let src_hashes: Vec<ChunkHash> = chunks.iter().map(|c| chunk_hash(c)).collect();
    let id_pad = identity_pad(id);

    let mut records = Vec::with_capacity(chunks.len());
    let mut blobs = Vec::with_capacity(chunks.len());
    for (index, chunk) in chunks.iter().enumerate() {
        let material = derive_with_pad(index, &src_hashes, &id_pad)?;
        let blob = encrypt_chunk(chunk, &material);
        records.push(ChunkRecord {
            index,
            src_hash: src_hashes[index],
            dst_hash: chunk_hash(&blob),
            src_size: chunk.len() as u64,
            dst_size: blob.len() as u64,
        });
        blobs.push(blob);
    }
    Ok((DataMap::new(data.len() as u64, records), blobs))
}

/// Restores the file described by `map` from its blobs.
///
/// Every blob is checked against its destination hash before anything is
/// decrypted; a mismatch is an [`Error::Integrity`]. A padding failure or a
/// plaintext that does not match its source hash means the key was wrong,
/// reported as [`Error::IdentityMismatch`].
pub fn self_decrypt<B: AsRef<[u8]>>(map: &DataMap, blobs: &[B], id: &Identity) -> Result<Vec<u8>> {
    map.validate()?;
    if blobs.len() != map.chunks.len() {
        return Err(Error::MalformedMap(format!(
            "map lists {} chunks, {} blobs supplied",
            map.chunks.len(),
            blobs.len()
        )));
    }
    for (record, blob) in map.chunks.iter().zip(blobs) {
        if chunk_hash(blob.as_ref()) != record.dst_hash {
            return Err(Error::Integrity {
                index: record.index,
            });
        }
    }

    let src_hashes = map.src_hashes();
    let id_pad = identity_pad(id);
    let mut out = Vec::with_capacity(map.file_size as usize);
    for (record, blob) in map.chunks.iter().zip(blobs) {
        let material = derive_with_pad(record.index, &src_hashes, &id_pad)?;
        let plain = decrypt_chunk(blob.as_ref(), &material).map_err(|e| match e {
            Error::Cipher => Error::IdentityMismatch {
                index: record.index,
            },
            e => e,
        })?;
        if chunk_hash(&plain) != record.src_hash {
            return Err(Error::IdentityMismatch {
                index: record.index,
            });
        }
        out.extend_from_slice(&plain);
    }
    Ok(out)
}
