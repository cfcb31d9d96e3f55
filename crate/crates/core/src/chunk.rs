//! Splitting a file into nearly equal chunks and joining them back.

use crate::{Error, Result};

/// Upper bound on the plaintext size of a single chunk.
pub const MAX_CHUNK_SIZE: usize = 1024 * 1024;
/// Every file is split into at least this many chunks.
pub const MIN_CHUNKS: usize = 3;
/// Smallest input that still yields [`MIN_CHUNKS`] non-empty chunks.
pub const MIN_INPUT_SIZE: usize = MIN_CHUNKS;

/// Number of chunks a file of `len` bytes is split into.
pub fn chunk_count(len: usize) -> usize {
    MIN_CHUNKS.max(len.div_ceil(MAX_CHUNK_SIZE))
}

/// Sizes of the chunks for a file of `len` bytes, in index order.
///
/// The first `len % n` chunks carry one extra byte so sizes differ by at
/// most one.
pub fn chunk_sizes(len: usize) -> Result<Vec<usize>> {
    if len < MIN_INPUT_SIZE {
        return Err(Error::InputTooSmall { len });
    }
    let n = chunk_count(len);
    let base = len / n;
    let extra = len % n;
    Ok((0..n).map(|i| base + usize::from(i < extra)).collect())
}

pub fn split_chunks(data: &[u8]) -> Result<Vec<&[u8]>> {
    let mut rest = data;
    let sizes = chunk_sizes(data.len())?;
    Ok(sizes
        .into_iter()
        .map(|size| {
            let (head, tail) = rest.split_at(size);
            rest = tail;
            head
        })
        .collect())
}

pub fn join_chunks<T: AsRef<[u8]>>(chunks: &[T]) -> Vec<u8> {
    let total = chunks.iter().map(|c| c.as_ref().len()).sum();
    let mut out = Vec::with_capacity(total);
    for c in chunks {
        out.extend_from_slice(c.as_ref());
    }
    out
}
