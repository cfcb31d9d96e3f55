use std::fs::{self, File};
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::{storage, BenchError, Result};

/// 100, 250, 500 and 750 kB, 1 MB, then 10, 25, 50, 75 and 100 MB.
pub const DEFAULT_SIZES: [u64; 10] = [
    100_000,
    250_000,
    500_000,
    750_000,
    1_000_000,
    10_000_000,
    25_000_000,
    50_000_000,
    75_000_000,
    100_000_000,
];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CorpusFile {
    pub size: u64,
    pub path: PathBuf,
}

/// Generated input files, all inside one directory.
#[derive(Debug, Clone)]
pub struct Corpus {
    pub dir: PathBuf,
    pub files: Vec<CorpusFile>,
}

impl Corpus {
    /// Scratch area for encryption output, inside the corpus directory.
    pub fn scratch_dir(&self) -> PathBuf {
        self.dir.join("scratch")
    }
}

/// Writes one file per entry of `sizes` into `dir`. The content of each file
/// depends only on `seed` and its size.
pub fn gen_corpus(dir: &Path, sizes: &[u64], seed: u64) -> Result<Corpus> {
    if sizes.is_empty() {
        return Err(BenchError::NoSizes);
    }
    if let Some(&small) = sizes
        .iter()
        .find(|&&s| s < ibse_core::MIN_INPUT_SIZE as u64)
    {
        return Err(BenchError::SizeTooSmall(small));
    }
    fs::create_dir_all(dir).map_err(storage(dir))?;
    let mut files = Vec::with_capacity(sizes.len());
    for &size in sizes {
        let path = dir.join(format!("corpus-{size}.bin"));
        write_random(&path, size, seed).map_err(storage(&path))?;
        files.push(CorpusFile { size, path });
    }
    Ok(Corpus {
        dir: dir.to_path_buf(),
        files,
    })
}

fn write_random(path: &Path, size: u64, seed: u64) -> std::io::Result<()> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(size);
    let mut out = BufWriter::new(File::create(path)?);
    let mut buf = vec![0u8; 1 << 16];
    let mut left = size;
    while left > 0 {
        let n = left.min(buf.len() as u64) as usize;
        rng.fill_bytes(&mut buf[..n]);
        out.write_all(&buf[..n])?;
        left -= n as u64;
    }
    out.into_inner()?.sync_all()
}
