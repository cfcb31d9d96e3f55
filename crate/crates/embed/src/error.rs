use std::path::PathBuf;

use crate::wrapper::ReturnKind;

#[derive(Debug, thiserror::Error)]
pub enum EmbedError {
    #[error("failed to load sandbox module: {0}")]
    Load(String),
    #[error("module does not export a function named {0:?}")]
    UnknownFunction(String),
    #[error("{function}: declared return kind {expected:?} does not fit: {detail}")]
    KindMismatch {
        function: String,
        expected: ReturnKind,
        detail: String,
    },
    #[error("{function}: {detail}")]
    ArgumentMismatch { function: String, detail: String },
    #[error("byte-string argument contains a zero byte")]
    EmbeddedNul,
    #[error("sandbox allocation of {0} bytes failed")]
    OutOfMemory(usize),
    #[error("sandbox rejected release of region at {offset} ({len} bytes)")]
    InvalidFree { offset: u32, len: u32 },
    #[error("{function} trapped: {message}")]
    Invocation { function: String, message: String },
    #[error("linear memory access out of bounds at {0}")]
    MemoryAccess(u32),
    #[error("{0} is outside the directory granted to the sandbox")]
    PathOutsideSandbox(PathBuf),
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        source: std::io::Error,
    },
}
