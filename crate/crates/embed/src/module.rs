use std::path::Path;
use std::sync::OnceLock;

use wasmtime::{Engine, InstancePre, Linker, Module, Store};
use wasmtime_wasi::p1::{self, WasiP1Ctx};
use wasmtime_wasi::{FsPerms, WasiCtxBuilder};

use crate::wrapper::Wrapper;
use crate::{EmbedError, BUNDLED_MODULE};

/// Guest-side path under which the granted host directory is mounted.
pub const GUEST_ROOT: &str = "/granted";

/// A compiled, link-ready sandbox module. Cheap to instantiate repeatedly.
pub struct SandboxModule {
    engine: Engine,
    pre: InstancePre<WasiP1Ctx>,
}

impl SandboxModule {
    pub fn from_bytes(wasm: &[u8]) -> Result<Self, EmbedError> {
        let load = |e: wasmtime::Error| EmbedError::Load(e.to_string());
        let engine = Engine::default();
        let module = Module::new(&engine, wasm).map_err(load)?;
        let mut linker: Linker<WasiP1Ctx> = Linker::new(&engine);
        p1::add_to_linker_sync(&mut linker, |ctx| ctx).map_err(load)?;
        let pre = linker.instantiate_pre(&module).map_err(load)?;
        Ok(SandboxModule { engine, pre })
    }

    pub fn from_file(path: &Path) -> Result<Self, EmbedError> {
        let wasm = std::fs::read(path).map_err(|source| EmbedError::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_bytes(&wasm)
    }

    /// The bundled module, compiled once per process.
    pub fn shared() -> Result<&'static SandboxModule, EmbedError> {
        static SHARED: OnceLock<Result<SandboxModule, String>> = OnceLock::new();
        SHARED
            .get_or_init(|| SandboxModule::from_bytes(BUNDLED_MODULE).map_err(|e| e.to_string()))
            .as_ref()
            .map_err(|e| EmbedError::Load(e.clone()))
    }

    /// Starts a fresh sandbox whose only filesystem access is `granted_dir`,
    /// mounted at [`GUEST_ROOT`]. Standard output and error are inherited.
    pub fn instantiate(&self, granted_dir: &Path) -> Result<Wrapper, EmbedError> {
        let io = |source| EmbedError::Io {
            path: granted_dir.to_path_buf(),
            source,
        };
        let granted = granted_dir.canonicalize().map_err(io)?;
        let ctx = WasiCtxBuilder::new()
            .inherit_stdout()
            .inherit_stderr()
            .preopened_dir(&granted, GUEST_ROOT, FsPerms::ReadWrite)
            .map_err(|e| EmbedError::Load(e.to_string()))?
            .build_p1();
        let mut store = Store::new(&self.engine, ctx);
        let instance = self
            .pre
            .instantiate(&mut store)
            .map_err(|e| EmbedError::Load(e.to_string()))?;
        Wrapper::new(store, instance, granted)
    }
}
