//! Chunk cipher: AES-128-CBC with PKCS#7 padding, then an XOR pad cycled
//! from the material's pad seed.

use aes::cipher::{block_padding::Pkcs7, BlockModeDecrypt, BlockModeEncrypt, KeyIvInit};

use crate::material::ChunkMaterial;
use crate::{Error, Result};

type Aes128CbcEnc = cbc::Encryptor<aes::Aes128>;
type Aes128CbcDec = cbc::Decryptor<aes::Aes128>;

const BLOCK: usize = 16;

/// Length of the stored blob for a plaintext chunk of `plain_len` bytes.
pub const fn encrypted_len(plain_len: usize) -> usize {
    (plain_len / BLOCK + 1) * BLOCK
}

fn xor_pad(buf: &mut [u8], seed: &[u8]) {
    for block in buf.chunks_mut(seed.len()) {
        for (b, s) in block.iter_mut().zip(seed) {
            *b ^= s;
        }
    }
}

pub fn encrypt_chunk(chunk: &[u8], material: &ChunkMaterial) -> Vec<u8> {
    let mut buf = vec![0u8; encrypted_len(chunk.len())];
    buf[..chunk.len()].copy_from_slice(chunk);
    let written = Aes128CbcEnc::new(&material.key.into(), &material.iv.into())
        .encrypt_padded::<Pkcs7>(&mut buf, chunk.len())
        .expect("buffer sized for PKCS#7 output")
        .len();
    debug_assert_eq!(written, buf.len());
    xor_pad(&mut buf, &material.pad_seed);
    buf
}

pub fn decrypt_chunk(blob: &[u8], material: &ChunkMaterial) -> Result<Vec<u8>> {
    if blob.is_empty() || blob.len() % BLOCK != 0 {
        return Err(Error::BadLength(blob.len()));
    }
    let mut buf = blob.to_vec();
    xor_pad(&mut buf, &material.pad_seed);
    let plain_len = Aes128CbcDec::new(&material.key.into(), &material.iv.into())
        .decrypt_padded::<Pkcs7>(&mut buf)
        .map_err(|_| Error::Cipher)?
        .len();
    buf.truncate(plain_len);
    Ok(buf)
}
