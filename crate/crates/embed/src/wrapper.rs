use std::path::{Component, Path, PathBuf};

use wasmtime::{Func, Instance, Memory, Store, Val, ValType};
use wasmtime_wasi::p1::WasiP1Ctx;

use crate::module::GUEST_ROOT;
use crate::EmbedError;

/// How the raw result of an exported function is turned into a host value.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReturnKind {
    Unit,
    Integer,
    /// The result is the address of a zero-terminated byte string in linear
    /// memory; the bytes are copied out.
    ByteStringAddress,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum HostValue {
    Unit,
    Integer(i64),
    Bytes(Vec<u8>),
}

impl From<i64> for HostValue {
    fn from(v: i64) -> Self {
        HostValue::Integer(v)
    }
}

impl From<&str> for HostValue {
    fn from(s: &str) -> Self {
        HostValue::Bytes(s.as_bytes().to_vec())
    }
}

impl From<Vec<u8>> for HostValue {
    fn from(b: Vec<u8>) -> Self {
        HostValue::Bytes(b)
    }
}

/// Sandbox regions allocated by the wrapper and not yet released, as
/// `(offset, length)` pairs.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct AllocationLog {
    entries: Vec<(u32, u32)>,
}

impl AllocationLog {
    pub fn entries(&self) -> &[(u32, u32)] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    fn record(&mut self, offset: u32, len: u32) {
        debug_assert!(!self.entries.iter().any(|&(o, _)| o == offset));
        self.entries.push((offset, len));
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ShutdownReport {
    /// Regions released by the sweep.
    pub released: usize,
    /// Regions the sandbox refused to release.
    pub rejected: Vec<(u32, u32)>,
}

/// One running sandbox instance plus the bookkeeping for memory the host
/// allocated inside it.
pub struct Wrapper {
    store: Store<WasiP1Ctx>,
    instance: Instance,
    memory: Memory,
    log: AllocationLog,
    granted: PathBuf,
    closed: bool,
}

impl Wrapper {
    pub(crate) fn new(
        mut store: Store<WasiP1Ctx>,
        instance: Instance,
        granted: PathBuf,
    ) -> Result<Self, EmbedError> {
        let memory = instance
            .get_memory(&mut store, "memory")
            .ok_or_else(|| EmbedError::Load("module exports no linear memory".into()))?;
        if let Some(init) = instance.get_func(&mut store, "_initialize") {
            init.call(&mut store, &[], &mut [])
                .map_err(|e| EmbedError::Invocation {
                    function: "_initialize".into(),
                    message: e.to_string(),
                })?;
        }
        Ok(Wrapper {
            store,
            instance,
            memory,
            log: AllocationLog::default(),
            granted,
            closed: false,
        })
    }

    pub fn allocation_log(&self) -> &AllocationLog {
        &self.log
    }

    /// Host directory visible to the sandbox (canonicalized).
    pub fn granted_dir(&self) -> &Path {
        &self.granted
    }

    fn func(&mut self, name: &str) -> Result<Func, EmbedError> {
        self.instance
            .get_func(&mut self.store, name)
            .ok_or_else(|| EmbedError::UnknownFunction(name.to_owned()))
    }

    fn call(
        &mut self,
        name: &str,
        func: Func,
        params: &[Val],
        results: &mut [Val],
    ) -> Result<(), EmbedError> {
        func.call(&mut self.store, params, results)
            .map_err(|e| EmbedError::Invocation {
                function: name.to_owned(),
                message: format!("{e:#}"),
            })
    }

    fn raw_allocate(&mut self, size: u32) -> Result<u32, EmbedError> {
        let func = self.func("abi_allocate")?;
        let mut out = [Val::I32(0)];
        self.call("abi_allocate", func, &[Val::I32(size as i32)], &mut out)?;
        match out[0].i32() {
            Some(0) | None => Err(EmbedError::OutOfMemory(size as usize)),
            Some(addr) => Ok(addr as u32),
        }
    }

    fn raw_deallocate(&mut self, offset: u32, len: u32) -> Result<(), EmbedError> {
        let func = self.func("abi_deallocate")?;
        let mut out = [Val::I32(0)];
        self.call(
            "abi_deallocate",
            func,
            &[Val::I32(offset as i32), Val::I32(len as i32)],
            &mut out,
        )?;
        match out[0].i32() {
            Some(0) => Ok(()),
            _ => Err(EmbedError::InvalidFree { offset, len }),
        }
    }

    /// Copies `bytes` plus a zero terminator into fresh sandbox memory and
    /// logs the region. Returns its address.
    pub fn pass_byte_string(&mut self, bytes: &[u8]) -> Result<u32, EmbedError> {
        if bytes.contains(&0) {
            return Err(EmbedError::EmbeddedNul);
        }
        let len =
            u32::try_from(bytes.len() + 1).map_err(|_| EmbedError::OutOfMemory(bytes.len() + 1))?;
        let addr = self.raw_allocate(len)?;
        self.log.record(addr, len);
        let mut buf = Vec::with_capacity(len as usize);
        buf.extend_from_slice(bytes);
        buf.push(0);
        self.memory
            .write(&mut self.store, addr as usize, &buf)
            .map_err(|_| EmbedError::MemoryAccess(addr))?;
        Ok(addr)
    }

    /// Allocates a 4-byte cell holding `value`, for functions that take a
    /// number by address. The cell is logged like any other argument.
    pub fn pass_number(&mut self, value: u32) -> Result<u32, EmbedError> {
        let addr = self.raw_allocate(4)?;
        self.log.record(addr, 4);
        self.memory
            .write(&mut self.store, addr as usize, &value.to_le_bytes())
            .map_err(|_| EmbedError::MemoryAccess(addr))?;
        Ok(addr)
    }

    pub fn read_number(&self, addr: u32) -> Result<u32, EmbedError> {
        let mut buf = [0u8; 4];
        self.memory
            .read(&self.store, addr as usize, &mut buf)
            .map_err(|_| EmbedError::MemoryAccess(addr))?;
        Ok(u32::from_le_bytes(buf))
    }

    /// Reads bytes starting at `addr` up to (not including) the first zero.
    pub fn read_byte_string(&self, addr: u32) -> Result<Vec<u8>, EmbedError> {
        let data = self.memory.data(&self.store);
        let start = addr as usize;
        let tail = data.get(start..).ok_or(EmbedError::MemoryAccess(addr))?;
        let end = tail
            .iter()
            .position(|&b| b == 0)
            .ok_or(EmbedError::MemoryAccess(addr))?;
        Ok(tail[..end].to_vec())
    }

    /// Calls the exported function `name`.
    ///
    /// Integer arguments are passed as-is; byte strings go through
    /// [`Wrapper::pass_byte_string`]. The raw result is converted according
    /// to `kind`.
    pub fn invoke(
        &mut self,
        name: &str,
        kind: ReturnKind,
        args: &[HostValue],
    ) -> Result<HostValue, EmbedError> {
        let func = self.func(name)?;
        let ty = func.ty(&self.store);
        let mismatch = |detail: String| EmbedError::ArgumentMismatch {
            function: name.to_owned(),
            detail,
        };
        if ty.params().len() != args.len() {
            return Err(mismatch(format!(
                "expects {} arguments, {} given",
                ty.params().len(),
                args.len()
            )));
        }

        let kind_mismatch = |detail: String| EmbedError::KindMismatch {
            function: name.to_owned(),
            expected: kind,
            detail,
        };
        let results: Vec<ValType> = ty.results().collect();
        match (kind, results.as_slice()) {
            (ReturnKind::Unit, []) => {}
            (ReturnKind::Integer, [ValType::I32 | ValType::I64]) => {}
            (ReturnKind::ByteStringAddress, [ValType::I32]) => {}
            (_, other) => return Err(kind_mismatch(format!("function returns {other:?}"))),
        }

        let mut params = Vec::with_capacity(args.len());
        for (i, (arg, param)) in args.iter().zip(ty.params()).enumerate() {
            let raw = match arg {
                HostValue::Integer(v) => *v,
                HostValue::Bytes(b) => i64::from(self.pass_byte_string(b)?),
                HostValue::Unit => return Err(mismatch(format!("argument {i} is unit"))),
            };
            params.push(match param {
                ValType::I32 => Val::I32(raw as i32),
                ValType::I64 => Val::I64(raw),
                other => {
                    return Err(mismatch(format!(
                        "parameter {i} has unsupported type {other}"
                    )))
                }
            });
        }

        let mut out: Vec<Val> = results.iter().map(|_| Val::I32(0)).collect();
        self.call(name, func, &params, &mut out)?;

        Ok(match (kind, out.first()) {
            (ReturnKind::Unit, _) => HostValue::Unit,
            (ReturnKind::Integer, Some(Val::I32(v))) => HostValue::Integer(i64::from(*v)),
            (ReturnKind::Integer, Some(Val::I64(v))) => HostValue::Integer(*v),
            (ReturnKind::ByteStringAddress, Some(Val::I32(addr))) => {
                if *addr == 0 {
                    return Err(kind_mismatch("function returned a null address".into()));
                }
                HostValue::Bytes(self.read_byte_string(*addr as u32)?)
            }
            (_, other) => return Err(kind_mismatch(format!("unexpected raw result {other:?}"))),
        })
    }

    fn invoke_status(&mut self, name: &str, args: &[HostValue]) -> Result<i32, EmbedError> {
        match self.invoke(name, ReturnKind::Integer, args)? {
            HostValue::Integer(v) => Ok(v as i32),
            other => unreachable!("integer kind produced {other:?}"),
        }
    }

    /// Translates a host path inside the granted directory into the path the
    /// sandbox sees.
    pub fn guest_path(&self, host: &Path) -> Result<String, EmbedError> {
        let outside = || EmbedError::PathOutsideSandbox(host.to_path_buf());
        let absolute = std::path::absolute(host).map_err(|_| outside())?;
        // Resolve symlinks in the longest existing prefix, then append the rest.
        let mut existing = absolute.as_path();
        let mut rest = Vec::new();
        let resolved = loop {
            match existing.canonicalize() {
                Ok(p) => break p,
                Err(_) => {
                    rest.push(existing.file_name().ok_or_else(outside)?.to_owned());
                    existing = existing.parent().ok_or_else(outside)?;
                }
            }
        };
        let mut full = resolved;
        for part in rest.into_iter().rev() {
            full.push(part);
        }
        let relative = full.strip_prefix(&self.granted).map_err(|_| outside())?;
        let mut guest = String::from(GUEST_ROOT);
        for c in relative.components() {
            match c {
                Component::Normal(part) => {
                    guest.push('/');
                    guest.push_str(part.to_str().ok_or_else(outside)?);
                }
                _ => return Err(outside()),
            }
        }
        Ok(guest)
    }

    fn path_arg(&self, p: &Path) -> Result<HostValue, EmbedError> {
        Ok(HostValue::from(self.guest_path(p)?.as_str()))
    }

    /// Runs `abi_encrypt` on host paths inside the granted directory and
    /// returns the module's status code.
    pub fn encrypt_file(
        &mut self,
        file: &Path,
        identity: &str,
        out_dir: &Path,
    ) -> Result<i32, EmbedError> {
        let args = [
            self.path_arg(file)?,
            HostValue::from(identity),
            self.path_arg(out_dir)?,
        ];
        self.invoke_status("abi_encrypt", &args)
    }

    /// Runs `abi_decrypt` on host paths inside the granted directory and
    /// returns the module's status code.
    pub fn decrypt_file(
        &mut self,
        map: &Path,
        chunks_dir: &Path,
        identity: &str,
        out_path: &Path,
    ) -> Result<i32, EmbedError> {
        let args = [
            self.path_arg(map)?,
            self.path_arg(chunks_dir)?,
            HostValue::from(identity),
            self.path_arg(out_path)?,
        ];
        self.invoke_status("abi_decrypt", &args)
    }

    /// Number of regions live in the sandbox allocator, whoever made them.
    pub fn live_sandbox_allocations(&mut self) -> Result<i64, EmbedError> {
        match self.invoke("abi_live_allocations", ReturnKind::Integer, &[])? {
            HostValue::Integer(v) => Ok(v),
            other => unreachable!("integer kind produced {other:?}"),
        }
    }

    fn sweep(&mut self) -> ShutdownReport {
        let entries = std::mem::take(&mut self.log.entries);
        let mut report = ShutdownReport {
            released: 0,
            rejected: Vec::new(),
        };
        for (offset, len) in entries {
            match self.raw_deallocate(offset, len) {
                Ok(()) => report.released += 1,
                Err(_) => report.rejected.push((offset, len)),
            }
        }
        self.closed = true;
        report
    }

    /// Releases every logged allocation exactly once. Errors if the sandbox
    /// refused any of them.
    pub fn shutdown(mut self) -> Result<ShutdownReport, EmbedError> {
        let report = self.sweep();
        match report.rejected.first() {
            Some(&(offset, len)) => Err(EmbedError::InvalidFree { offset, len }),
            None => Ok(report),
        }
    }
}

impl Drop for Wrapper {
    fn drop(&mut self) {
        if !self.closed {
            self.sweep();
        }
    }
}
