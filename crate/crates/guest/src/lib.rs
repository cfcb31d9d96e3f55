//! Flat exported interface of the encryption library, built for
//! `wasm32-wasip1`.
//!
//! All strings cross the boundary as addresses of zero-terminated UTF-8
//! byte strings in the module's linear memory. Memory for arguments is
//! obtained from [`abi_allocate`] and returned with [`abi_deallocate`];
//! the module tracks every live region so a bad free is reported instead of
//! corrupting the heap.

use std::alloc::{alloc, dealloc, Layout};
use std::collections::BTreeMap;
use std::ffi::{c_char, CStr, CString};
use std::path::Path;
use std::sync::Mutex;

use ibse_core::abi;
use ibse_core::fileio::{decrypt_dir_to_file, encrypt_file_to_dir, DATA_MAP_FILE};
use ibse_core::{Error, Identity};

const ALIGN: usize = 8;

/// Live regions handed out by `abi_allocate`, keyed by address.
static LIVE: Mutex<BTreeMap<usize, usize>> = Mutex::new(BTreeMap::new());

/// Buffer behind the address returned by `abi_echo`; valid until the next
/// call.
static LAST_RETURN: Mutex<Option<CString>> = Mutex::new(None);

/// Allocates `size` bytes. Returns 0 for a zero size or when out of memory.
#[no_mangle]
pub extern "C" fn abi_allocate(size: usize) -> *mut u8 {
    let Ok(layout) = Layout::from_size_align(size, ALIGN) else {
        return std::ptr::null_mut();
    };
    if size == 0 {
        return std::ptr::null_mut();
    }
    // SAFETY: layout has a non-zero size.
    let ptr = unsafe { alloc(layout) };
    if !ptr.is_null() {
        LIVE.lock().unwrap().insert(ptr as usize, size);
    }
    ptr
}

/// Frees a region from [`abi_allocate`]. Returns 0, or
/// [`abi::INVALID_FREE`] if `(ptr, size)` is not a live allocation.
///
/// # Safety
/// No other reference to the region may be in use.
#[no_mangle]
pub unsafe extern "C" fn abi_deallocate(ptr: *mut u8, size: usize) -> i32 {
    let mut live = LIVE.lock().unwrap();
    if live.get(&(ptr as usize)) != Some(&size) {
        return abi::INVALID_FREE;
    }
    live.remove(&(ptr as usize));
    // SAFETY: the region was allocated by `abi_allocate` with this exact
    // size and alignment and has not been freed.
    unsafe { dealloc(ptr, Layout::from_size_align_unchecked(size, ALIGN)) };
    abi::OK
}

/// Number of regions currently allocated through [`abi_allocate`].
#[no_mangle]
pub extern "C" fn abi_live_allocations() -> usize {
    LIVE.lock().unwrap().len()
}

/// Returns the address of a copy of the zero-terminated string at `s`.
///
/// # Safety
/// `s` must be null or point to a zero-terminated string.
#[no_mangle]
pub unsafe extern "C" fn abi_echo(s: *const c_char) -> *const c_char {
    if s.is_null() {
        return std::ptr::null();
    }
    // SAFETY: the caller passes a zero-terminated string.
    let copy = unsafe { CStr::from_ptr(s) }.to_owned();
    let mut slot = LAST_RETURN.lock().unwrap();
    slot.insert(copy).as_ptr()
}

fn arg<'a>(s: *const c_char) -> Result<&'a str, i32> {
    if s.is_null() {
        return Err(abi::BAD_ARGUMENT);
    }
    // SAFETY: the caller passes a zero-terminated string that outlives the
    // call.
    unsafe { CStr::from_ptr(s) }
        .to_str()
        .map_err(|_| abi::BAD_ARGUMENT)
}

fn identity(s: *const c_char) -> Result<Identity, i32> {
    Identity::new(arg(s)?).map_err(|e| match e {
        Error::EmptyIdentity => abi::EMPTY_IDENTITY,
        _ => abi::BAD_ARGUMENT,
    })
}

fn status(result: Result<(), i32>) -> i32 {
    match result {
        Ok(()) => abi::OK,
        Err(code) => code,
    }
}

/// Encrypts the file at `file_path` for `identity`, writing the data map
/// and one file per chunk into `out_dir`.
///
/// # Safety
/// Each argument must be null or point to a zero-terminated string.
#[no_mangle]
pub unsafe extern "C" fn abi_encrypt(
    file_path: *const c_char,
    identity_str: *const c_char,
    out_dir: *const c_char,
) -> i32 {
    status((|| {
        let file = arg(file_path)?;
        let out = arg(out_dir)?;
        let id = identity(identity_str)?;
        encrypt_file_to_dir(Path::new(file), &id, Path::new(out))
            .map(drop)
            .map_err(|e| abi::status_of(&e))
    })())
}

/// Restores the file described by the data map at `map_path` from the
/// chunks in `chunks_dir` and writes it to `out_path`.
///
/// # Safety
/// Each argument must be null or point to a zero-terminated string.
#[no_mangle]
pub unsafe extern "C" fn abi_decrypt(
    map_path: *const c_char,
    chunks_dir: *const c_char,
    identity_str: *const c_char,
    out_path: *const c_char,
) -> i32 {
    status((|| {
        let map = arg(map_path)?;
        let chunks = arg(chunks_dir)?;
        let out = arg(out_path)?;
        let id = identity(identity_str)?;
        decrypt_dir_to_file(Path::new(map), Path::new(chunks), &id, Path::new(out))
            .map_err(|e| abi::status_of(&e))
    })())
}

/// Name of the data map written by [`abi_encrypt`], zero-terminated.
#[no_mangle]
pub extern "C" fn abi_data_map_name() -> *const c_char {
    const NAME: &CStr = c"data_map.idsemap";
    debug_assert_eq!(NAME.to_bytes(), DATA_MAP_FILE.as_bytes());
    NAME.as_ptr()
}
