use crate::siphash::{siphash13, ZERO_KEY};
use crate::{Error, Result};

/// The data owner's identity: any non-empty byte string.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Identity(Vec<u8>);

impl Identity {
    pub fn new(bytes: impl Into<Vec<u8>>) -> Result<Self> {
        let bytes = bytes.into();
        if bytes.is_empty() {
            return Err(Error::EmptyIdentity);
        }
        Ok(Identity(bytes))
    }

    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    /// SipHash-1-3 of the identity under the all-zero key, little-endian.
    pub fn digest(&self) -> [u8; 8] {
        siphash13(&ZERO_KEY, &self.0).to_le_bytes()
    }
}

impl std::fmt::Debug for Identity {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "Identity({:?})", String::from_utf8_lossy(&self.0))
    }
}

impl TryFrom<&str> for Identity {
    type Error = Error;

    fn try_from(s: &str) -> Result<Self> {
        Identity::new(s.as_bytes())
    }
}

/// Digest of a raw identity string; fails on empty input.
pub fn identity_digest(id: &[u8]) -> Result<[u8; 8]> {
    Identity::new(id).map(|id| id.digest())
}

/// Repeats `src` until `out_len` bytes have been produced.
pub fn cycle_bytes(src: &[u8], out_len: usize) -> Result<Vec<u8>> {
    if src.is_empty() {
        return Err(Error::EmptySource);
    }
    Ok(src.iter().copied().cycle().take(out_len).collect())
}
