use std::fmt;
use std::fs;
use std::path::Path;
use std::time::Instant;

use ibse_core::abi;
use ibse_core::fileio::encrypt_file_to_dir;
use ibse_core::Identity;
use ibse_embed::SandboxModule;
use serde::Serialize;

use crate::corpus::Corpus;
use crate::{storage, BenchError, Result};

/// Identity used for every timed encryption.
const BENCH_IDENTITY: &str = "benchmark-identity";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum PathKind {
    /// Direct library call.
    Native,
    /// The same operation through the sandboxed module.
    Abi,
}

impl fmt::Display for PathKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PathKind::Native => "native",
            PathKind::Abi => "abi",
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRecord {
    pub size_bytes: u64,
    pub path_kind: PathKind,
    pub runs: usize,
    pub mean_s: f64,
    pub stddev_s: f64,
}

fn mean_stddev(samples: &[f64]) -> (f64, f64) {
    let n = samples.len() as f64;
    let mean = samples.iter().sum::<f64>() / n;
    if samples.len() < 2 {
        return (mean, 0.0);
    }
    let var = samples.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

fn clear(dir: &Path) -> Result<()> {
    match fs::remove_dir_all(dir) {
        Ok(()) => Ok(()),
        Err(e) if e.kind() == std::io::ErrorKind::NotFound => Ok(()),
        Err(e) => Err(storage(dir)(e)),
    }
}

/// Times `runs_per_size` encryptions of every corpus file, after one
/// discarded warm-up run per file.
///
/// Native runs time `encrypt_file_to_dir`. Sandbox runs time a fresh
/// instance of the precompiled module, the encrypt call and the shutdown
/// sweep; module compilation happens once, before any timing. Output is
/// written under the corpus scratch directory and removed between runs,
/// outside the timed region.
pub fn run_bench(
    corpus: &Corpus,
    runs_per_size: usize,
    kind: PathKind,
) -> Result<Vec<BenchRecord>> {
    if runs_per_size == 0 {
        return Err(BenchError::NoRuns);
    }
    let identity = Identity::try_from(BENCH_IDENTITY)?;
    let module = match kind {
        PathKind::Abi => Some(SandboxModule::shared()?),
        PathKind::Native => None,
    };
    let out_dir = corpus.scratch_dir();

    let mut records = Vec::with_capacity(corpus.files.len());
    for file in &corpus.files {
        let once = || -> Result<f64> {
            clear(&out_dir)?;
            let start = Instant::now();
            match module {
                None => {
                    encrypt_file_to_dir(&file.path, &identity, &out_dir)?;
                }
                Some(module) => {
                    let mut wrapper = module.instantiate(&corpus.dir)?;
                    let status = wrapper.encrypt_file(&file.path, BENCH_IDENTITY, &out_dir)?;
                    wrapper.shutdown()?;
                    if status != abi::OK {
                        return Err(BenchError::SandboxStatus {
                            path: file.path.clone(),
                            status,
                        });
                    }
                }
            }
            Ok(start.elapsed().as_secs_f64())
        };
        once()?;
        let samples = (0..runs_per_size)
            .map(|_| once())
            .collect::<Result<Vec<_>>>()?;
        let (mean_s, stddev_s) = mean_stddev(&samples);
        records.push(BenchRecord {
            size_bytes: file.size,
            path_kind: kind,
            runs: runs_per_size,
            mean_s,
            stddev_s,
        });
    }
    clear(&out_dir)?;
    Ok(records)
}
