//! File-level encrypt/decrypt used by the sandboxed module and the native
//! benchmark path. Output layout: one data map file plus one file per
//! encrypted chunk, named by the chunk's content identifier.

use std::fs::{self, File};
use std::io::{self, Read, Seek, SeekFrom};
use std::path::{Path, PathBuf};

use crate::chunk::chunk_sizes;
use crate::cipher::encrypt_chunk;
use crate::datamap::{parse_datamap, serialize_datamap, ChunkRecord, DataMap};
use crate::hash::chunk_hash;
use crate::identity::Identity;
use crate::material::{derive_with_pad, identity_pad};
use crate::{self_decrypt, Error};

/// Name of the data map inside an encryption output directory.
pub const DATA_MAP_FILE: &str = "data_map.idsemap";

#[derive(Debug, thiserror::Error)]
pub enum FileError {
    #[error("{0}: no such file")]
    NotFound(PathBuf),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error(transparent)]
    Crypto(#[from] Error),
}

fn io_err(path: &Path) -> impl FnOnce(io::Error) -> FileError + '_ {
    move |source| {
        if source.kind() == io::ErrorKind::NotFound {
            FileError::NotFound(path.to_path_buf())
        } else {
            FileError::Io {
                path: path.to_path_buf(),
                source,
            }
        }
    }
}

fn write(path: &Path, data: &[u8]) -> Result<(), FileError> {
    fs::write(path, data).map_err(|source| FileError::Io {
        path: path.to_path_buf(),
        source,
    })
}

/// Encrypts `file` into `out_dir`, creating the directory if needed.
///
/// Produces the same map and blobs as [`crate::self_encrypt`] on the file
/// contents, but reads the file in two passes (hashes, then encryption) so
/// only one chunk is held in memory at a time.
pub fn encrypt_file_to_dir(
    file: &Path,
    id: &Identity,
    out_dir: &Path,
) -> Result<DataMap, FileError> {
    let mut input = File::open(file).map_err(io_err(file))?;
    let len = input.metadata().map_err(io_err(file))?.len();
    let sizes = chunk_sizes(usize::try_from(len).map_err(|_| Error::BadLength(usize::MAX))?)?;

    let mut buf = vec![0u8; sizes[0]];
    let mut src_hashes = Vec::with_capacity(sizes.len());
    for &size in &sizes {
        input.read_exact(&mut buf[..size]).map_err(io_err(file))?;
        src_hashes.push(chunk_hash(&buf[..size]));
    }
    input.seek(SeekFrom::Start(0)).map_err(io_err(file))?;

    fs::create_dir_all(out_dir).map_err(|source| FileError::Io {
        path: out_dir.to_path_buf(),
        source,
    })?;
    let id_pad = identity_pad(id);
    let mut records = Vec::with_capacity(sizes.len());
    for (index, &size) in sizes.iter().enumerate() {
        input.read_exact(&mut buf[..size]).map_err(io_err(file))?;
        let material = derive_with_pad(index, &src_hashes, &id_pad)?;
        let blob = encrypt_chunk(&buf[..size], &material);
        let dst_hash = chunk_hash(&blob);
        write(&out_dir.join(dst_hash.to_hex()), &blob)?;
        records.push(ChunkRecord {
            index,
            src_hash: src_hashes[index],
            dst_hash,
            src_size: size as u64,
            dst_size: blob.len() as u64,
        });
    }
    let map = DataMap::new(len, records);
    write(&out_dir.join(DATA_MAP_FILE), &serialize_datamap(&map)?)?;
    Ok(map)
}

/// Decrypts the chunks in `chunks_dir` described by the map at `map_path`
/// and writes the restored file to `out_path`.
pub fn decrypt_dir_to_file(
    map_path: &Path,
    chunks_dir: &Path,
    id: &Identity,
    out_path: &Path,
) -> Result<(), FileError> {
    let map = parse_datamap(&fs::read(map_path).map_err(io_err(map_path))?)?;
    let blobs = map
        .chunks
        .iter()
        .map(|c| {
            let path = chunks_dir.join(c.dst_hash.to_hex());
            fs::read(&path).map_err(io_err(&path))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let plain = self_decrypt(&map, &blobs, id)?;
    write(out_path, &plain)
}
