use crate::chunk::MIN_INPUT_SIZE;

/// Errors raised by the self-encryption pipeline and the data map codec.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("input of {len} bytes is too small for self-encryption (minimum {MIN_INPUT_SIZE})")]
    InputTooSmall { len: usize },
    #[error("identity must not be empty")]
    EmptyIdentity,
    #[error("cannot cycle an empty byte source")]
    EmptySource,
    #[error("chunk index {index} out of range for {count} chunks")]
    IndexOutOfRange { index: usize, count: usize },
    #[error("encrypted chunk length {0} is not a positive multiple of 16")]
    BadLength(usize),
    #[error("chunk cipher failure (invalid padding)")]
    Cipher,
    #[error("chunk {index}: blob does not match the recorded destination hash")]
    Integrity { index: usize },
    #[error("chunk {index}: decryption failed under the supplied identity")]
    IdentityMismatch { index: usize },
    #[error("malformed data map: {0}")]
    MalformedMap(String),
    #[error("unsupported data map version {0:?}")]
    UnsupportedVersion(String),
    #[error("invalid data map: {0}")]
    InvalidMap(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
