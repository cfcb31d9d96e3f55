//! Encryption timing over a corpus of pseudo-random files, comparing the
//! native library call with the same operation run inside the sandbox.
//!
//! ```no_run
//! use ibse_bench::{fit_and_report, gen_corpus, run_bench, PathKind, DEFAULT_SIZES};
//!
//! let dir = std::path::Path::new("/tmp/corpus");
//! let corpus = gen_corpus(dir, &DEFAULT_SIZES, 7).unwrap();
//! let mut records = run_bench(&corpus, 10, PathKind::Native).unwrap();
//! records.extend(run_bench(&corpus, 10, PathKind::Abi).unwrap());
//! let report = fit_and_report(&records).unwrap();
//! report.write_csv(dir.join("report.csv")).unwrap();
//! ```

mod corpus;
mod report;
mod run;

pub use corpus::{gen_corpus, Corpus, CorpusFile, DEFAULT_SIZES};
pub use report::{fit_and_report, LinearFit, Report, ReportRow};
pub use run::{run_bench, BenchRecord, PathKind};

#[derive(Debug, thiserror::Error)]
pub enum BenchError {
    #[error("no sizes requested")]
    NoSizes,
    #[error("file size {0} is below the 3-byte minimum")]
    SizeTooSmall(u64),
    #[error("at least one run per size is required")]
    NoRuns,
    #[error("{kind} has {sizes} distinct sizes; a fit needs at least 3")]
    InsufficientData { kind: PathKind, sizes: usize },
    #[error("storage failure at {path}: {source}")]
    StorageFailure {
        path: std::path::PathBuf,
        source: std::io::Error,
    },
    #[error("invalid benchmark input: {0}")]
    Crypto(#[from] ibse_core::Error),
    #[error("native encryption failed: {0}")]
    Native(#[from] ibse_core::fileio::FileError),
    #[error("sandbox failure: {0}")]
    Sandbox(#[from] ibse_embed::EmbedError),
    #[error("sandbox encryption of {path} returned status {status}")]
    SandboxStatus {
        path: std::path::PathBuf,
        status: i32,
    },
    #[error("writing report: {0}")]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = BenchError> = std::result::Result<T, E>;

pub(crate) fn storage(path: &std::path::Path) -> impl FnOnce(std::io::Error) -> BenchError {
    let path = path.to_path_buf();
    move |source| BenchError::StorageFailure { path, source }
}
