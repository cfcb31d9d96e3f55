//! Status codes returned across the flat sandbox interface.

use crate::fileio::FileError;
use crate::Error;

pub const OK: i32 = 0;
pub const MISSING_INPUT: i32 = 1;
pub const INPUT_TOO_SMALL: i32 = 2;
pub const EMPTY_IDENTITY: i32 = 3;
pub const IO_FAILURE: i32 = 4;
pub const MALFORMED_MAP: i32 = 5;
pub const IDENTITY_MISMATCH: i32 = 6;
pub const INTEGRITY_FAILURE: i32 = 7;
/// Null pointer or an argument that is not valid UTF-8.
pub const BAD_ARGUMENT: i32 = 8;

/// Status reported by `abi_deallocate` for an unknown region or size.
pub const INVALID_FREE: i32 = 1;

pub fn status_of(err: &FileError) -> i32 {
    match err {
        FileError::NotFound(_) => MISSING_INPUT,
        FileError::Io { .. } => IO_FAILURE,
        FileError::Crypto(e) => match e {
            Error::InputTooSmall { .. } => INPUT_TOO_SMALL,
            Error::EmptyIdentity => EMPTY_IDENTITY,
            Error::IdentityMismatch { .. } | Error::Cipher => IDENTITY_MISMATCH,
            Error::Integrity { .. } | Error::BadLength(_) => INTEGRITY_FAILURE,
            Error::MalformedMap(_)
            | Error::UnsupportedVersion(_)
            | Error::InvalidMap(_)
            | Error::IndexOutOfRange { .. }
            | Error::EmptySource => MALFORMED_MAP,
        },
    }
}

pub fn describe(status: i32) -> &'static str {
    match status {
        OK => "ok",
        MISSING_INPUT => "missing input file",
        INPUT_TOO_SMALL => "input too small",
        EMPTY_IDENTITY => "empty identity",
        IO_FAILURE => "i/o failure",
        MALFORMED_MAP => "malformed data map",
        IDENTITY_MISMATCH => "identity mismatch",
        INTEGRITY_FAILURE => "integrity failure",
        BAD_ARGUMENT => "bad argument",
        _ => "unknown status",
    }
}
