//! Host side of the sandboxed encryption module.
//!
//! The module runs in a WebAssembly VM with WASI access to a single granted
//! directory. Host memory is invisible to it, so every byte-string argument
//! is copied into memory allocated *inside* the sandbox (via the module's
//! `abi_allocate` export), terminated with a zero byte and passed by
//! address. The [`Wrapper`] records each such allocation and releases all of
//! them when it shuts down.
//!
//! ```no_run
//! use ibse_embed::{HostValue, ReturnKind, SandboxModule};
//!
//! let module = SandboxModule::shared().unwrap();
//! let mut wrapper = module.instantiate(std::path::Path::new("/tmp")).unwrap();
//! let echoed = wrapper
//!     .invoke("abi_echo", ReturnKind::ByteStringAddress, &[HostValue::from("hi")])
//!     .unwrap();
//! assert_eq!(echoed, HostValue::Bytes(b"hi".to_vec()));
//! wrapper.shutdown().unwrap();
//! ```

mod error;
mod module;
mod wrapper;

pub use error::EmbedError;
pub use module::{SandboxModule, GUEST_ROOT};
pub use wrapper::{AllocationLog, HostValue, ReturnKind, ShutdownReport, Wrapper};

/// The guest module built alongside this crate.
pub const BUNDLED_MODULE: &[u8] = include_bytes!(concat!(env!("OUT_DIR"), "/ibse_guest.wasm"));
