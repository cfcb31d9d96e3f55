//! Commands behind the `ibse` binary.
//!
//! `add` self-encrypts a file under the active identity, puts every
//! encrypted chunk into the chunk store and registers an asset listing the
//! chunk CIDs; the data map is written to a path chosen by the caller. `get`
//! takes the asset id and the data map and restores the file.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ibse_bench::{fit_and_report, gen_corpus, run_bench, PathKind, Report};
use ibse_core::{parse_datamap, self_decrypt, self_encrypt, serialize_datamap, Identity};
use ibse_store::{
    init_wallet, Asset, ChunkStore, Cid, DirectoryStore, Ledger, LedgerError, StoreError,
    WalletError,
};

/// File under the home directory holding an identity set with
/// `init --identity`. When absent the wallet's public key hex is used.
pub const IDENTITY_OVERRIDE_FILE: &str = "identity";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AppConfig {
    pub home: PathBuf,
    pub store_root: PathBuf,
    pub ledger_path: PathBuf,
}

impl AppConfig {
    pub fn new(home: PathBuf, store_root: Option<PathBuf>, ledger_path: Option<PathBuf>) -> Self {
        AppConfig {
            store_root: store_root.unwrap_or_else(|| home.join("store")),
            ledger_path: ledger_path.unwrap_or_else(|| home.join("ledger.json")),
            home,
        }
    }

    /// `~/.ibse`, falling back to `./.ibse` when no home directory is known.
    pub fn default_home() -> PathBuf {
        std::env::var_os("HOME")
            .filter(|h| !h.is_empty())
            .map(PathBuf::from)
            .unwrap_or_else(|| PathBuf::from("."))
            .join(".ibse")
    }

    fn ensure_home(&self) -> Result<(), CliError> {
        fs::create_dir_all(&self.home).map_err(|source| CliError::Storage {
            path: self.home.clone(),
            source,
        })
    }
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("file not found: {0}")]
    FileNotFound(PathBuf),
    #[error("{0}")]
    NotFound(String),
    #[error("{0}")]
    Crypto(ibse_core::Error),
    #[error("chunk {0} is corrupt in the store")]
    CorruptChunk(Cid),
    #[error("data map does not belong to asset {0}")]
    MapMismatch(String),
    #[error("storage failure at {path}: {source}")]
    Storage { path: PathBuf, source: io::Error },
    #[error("{0}")]
    StorageOther(String),
}

impl CliError {
    /// Process exit status for this error.
    pub fn exit_code(&self) -> i32 {
        use ibse_core::Error as E;
        match self {
            CliError::Usage(_) => 2,
            CliError::Crypto(E::InputTooSmall { .. } | E::EmptyIdentity) => 2,
            CliError::FileNotFound(_) | CliError::NotFound(_) => 3,
            CliError::Crypto(_) | CliError::CorruptChunk(_) | CliError::MapMismatch(_) => 4,
            CliError::Storage { .. } | CliError::StorageOther(_) => 5,
        }
    }
}

impl From<ibse_core::Error> for CliError {
    fn from(e: ibse_core::Error) -> Self {
        CliError::Crypto(e)
    }
}

impl From<StoreError> for CliError {
    fn from(e: StoreError) -> Self {
        match e {
            StoreError::NotFound(cid) => {
                CliError::NotFound(format!("chunk {cid} is not in the store"))
            }
            StoreError::CorruptObject(cid) => CliError::CorruptChunk(cid),
            StoreError::InvalidCid(s) => CliError::MapMismatch(format!("invalid CID {s}")),
            StoreError::StorageFailure { path, source } => CliError::Storage { path, source },
        }
    }
}

impl From<LedgerError> for CliError {
    fn from(e: LedgerError) -> Self {
        match e {
            LedgerError::NotFound(id) => {
                CliError::NotFound(format!("the asset {id} does not exist"))
            }
            LedgerError::InvalidId(_) | LedgerError::InvalidOwner(_) | LedgerError::EmptyCids => {
                CliError::Usage(e.to_string())
            }
            LedgerError::StorageFailure { path, source } => CliError::Storage { path, source },
            other => CliError::StorageOther(other.to_string()),
        }
    }
}

impl From<WalletError> for CliError {
    fn from(e: WalletError) -> Self {
        match e {
            WalletError::StorageFailure { path, source } => CliError::Storage { path, source },
            other => CliError::StorageOther(other.to_string()),
        }
    }
}

fn read_input(path: &Path) -> Result<Vec<u8>, CliError> {
    fs::read(path).map_err(|source| match source.kind() {
        io::ErrorKind::NotFound => CliError::FileNotFound(path.to_path_buf()),
        _ => CliError::Storage {
            path: path.to_path_buf(),
            source,
        },
    })
}

fn write_output(path: &Path, data: &[u8]) -> Result<(), CliError> {
    fs::write(path, data).map_err(|source| CliError::Storage {
        path: path.to_path_buf(),
        source,
    })
}

/// The wallet public key hex (asset owner) and the encryption identity.
fn active_identity(cfg: &AppConfig) -> Result<(String, Identity), CliError> {
    cfg.ensure_home()?;
    let owner = init_wallet(&cfg.home)?.identity_hex();
    let override_path = cfg.home.join(IDENTITY_OVERRIDE_FILE);
    let identity = match fs::read(&override_path) {
        Ok(bytes) => Identity::new(bytes)?,
        Err(e) if e.kind() == io::ErrorKind::NotFound => Identity::new(owner.as_bytes().to_vec())?,
        Err(source) => {
            return Err(CliError::Storage {
                path: override_path,
                source,
            })
        }
    };
    Ok((owner, identity))
}

/// Creates or reloads the wallet. With `identity_override`, that string
/// becomes the encryption identity for later commands. Returns the active
/// identity as text.
pub fn cmd_init(cfg: &AppConfig, identity_override: Option<&str>) -> Result<String, CliError> {
    cfg.ensure_home()?;
    init_wallet(&cfg.home)?;
    if let Some(id) = identity_override {
        Identity::try_from(id)?;
        write_output(&cfg.home.join(IDENTITY_OVERRIDE_FILE), id.as_bytes())?;
    }
    let (_, identity) = active_identity(cfg)?;
    Ok(String::from_utf8_lossy(identity.as_bytes()).into_owned())
}

/// Encrypts `file`, stores its chunks, writes the data map to
/// `key_output_path` and registers the asset. Returns the asset id.
pub fn cmd_add(cfg: &AppConfig, file: &Path, key_output_path: &Path) -> Result<String, CliError> {
    let data = read_input(file)?;
    let (owner, identity) = active_identity(cfg)?;
    let (map, blobs) = self_encrypt(&data, &identity)?;

    let store = DirectoryStore::open(&cfg.store_root)?;
    let mut cids = Vec::with_capacity(blobs.len());
    for (blob, record) in blobs.iter().zip(&map.chunks) {
        let cid = store.put_chunk(blob)?;
        debug_assert_eq!(cid.as_str(), record.dst_hash.to_hex());
        cids.push(cid);
    }

    write_output(key_output_path, &serialize_datamap(&map)?)?;
    let mut ledger = Ledger::open(&cfg.ledger_path)?;
    Ok(ledger.create_asset(&owner, cids)?.id)
}

/// Restores the file registered as asset `block`, using the data map at
/// `key`, into `destination`.
pub fn cmd_get(
    cfg: &AppConfig,
    block: &str,
    key: &Path,
    destination: &Path,
) -> Result<(), CliError> {
    let ledger = Ledger::open(&cfg.ledger_path)?;
    let asset = ledger.read_asset(block)?;
    let map = parse_datamap(&read_input(key)?)?;

    let expected: Vec<String> = map.dst_hashes().iter().map(|h| h.to_hex()).collect();
    let recorded: Vec<&str> = asset.cids.iter().map(Cid::as_str).collect();
    if expected != recorded {
        return Err(CliError::MapMismatch(asset.id));
    }

    let (_, identity) = active_identity(cfg)?;
    let store = DirectoryStore::open(&cfg.store_root)?;
    let blobs = asset
        .cids
        .iter()
        .map(|cid| store.get_chunk(cid))
        .collect::<Result<Vec<_>, _>>()?;
    let data = self_decrypt(&map, &blobs, &identity)?;
    write_output(destination, &data)
}

/// One line per asset, sorted by id: id, owner prefix, chunk count.
pub fn cmd_ls(cfg: &AppConfig) -> Result<Vec<String>, CliError> {
    let ledger = Ledger::open(&cfg.ledger_path)?;
    Ok(ledger.list_assets().iter().map(format_asset).collect())
}

fn format_asset(a: &Asset) -> String {
    let prefix: String = a.owner.chars().take(16).collect();
    format!("{}\t{}\t{}", a.id, prefix, a.cids.len())
}

#[derive(Debug, Clone)]
pub struct BenchOptions {
    pub sizes: Vec<u64>,
    pub runs: usize,
    pub seed: u64,
    pub out: PathBuf,
    pub with_abi: bool,
    /// Where to generate the corpus; a temporary directory when unset.
    pub corpus_dir: Option<PathBuf>,
}

/// Generates a corpus, times native (and optionally sandboxed) encryption
/// and writes the CSV report.
pub fn cmd_bench(opts: &BenchOptions) -> Result<Report, CliError> {
    let bench = |e: ibse_bench::BenchError| match e {
        ibse_bench::BenchError::StorageFailure { path, source } => {
            CliError::Storage { path, source }
        }
        ibse_bench::BenchError::InsufficientData { .. }
        | ibse_bench::BenchError::NoSizes
        | ibse_bench::BenchError::NoRuns
        | ibse_bench::BenchError::SizeTooSmall(_) => CliError::Usage(e.to_string()),
        other => CliError::StorageOther(other.to_string()),
    };
    let temp;
    let dir = match &opts.corpus_dir {
        Some(d) => d.clone(),
        None => {
            temp = tempfile::tempdir().map_err(|source| CliError::Storage {
                path: std::env::temp_dir(),
                source,
            })?;
            temp.path().to_path_buf()
        }
    };
    let corpus = gen_corpus(&dir, &opts.sizes, opts.seed).map_err(bench)?;
    let mut records = run_bench(&corpus, opts.runs, PathKind::Native).map_err(bench)?;
    if opts.with_abi {
        records.extend(run_bench(&corpus, opts.runs, PathKind::Abi).map_err(bench)?);
    }
    let report = fit_and_report(&records).map_err(bench)?;
    report.write_csv(&opts.out).map_err(bench)?;
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn config() -> (tempfile::TempDir, AppConfig) {
        let dir = tempfile::tempdir().unwrap();
        let cfg = AppConfig::new(dir.path().join("home"), None, None);
        (dir, cfg)
    }

    #[test]
    fn default_paths() {
        let cfg = AppConfig::new(PathBuf::from("/h"), None, None);
        assert_eq!(cfg.store_root, PathBuf::from("/h/store"));
        assert_eq!(cfg.ledger_path, PathBuf::from("/h/ledger.json"));
        let cfg = AppConfig::new(
            PathBuf::from("/h"),
            Some("/s".into()),
            Some("/l.json".into()),
        );
        assert_eq!(cfg.store_root, PathBuf::from("/s"));
        assert_eq!(cfg.ledger_path, PathBuf::from("/l.json"));
    }

    #[test]
    fn init_is_stable() {
        let (_d, cfg) = config();
        let id = cmd_init(&cfg, None).unwrap();
        assert_eq!(id.len(), 64);
        assert_eq!(cmd_init(&cfg, None).unwrap(), id);
    }

    #[test]
    fn init_override() {
        let (_d, cfg) = config();
        assert_eq!(cmd_init(&cfg, Some("alice")).unwrap(), "alice");
        assert_eq!(cmd_init(&cfg, None).unwrap(), "alice");
        assert_eq!(cmd_init(&cfg, Some("")).unwrap_err().exit_code(), 2);
    }

    #[test]
    fn add_get_ls() {
        let (d, cfg) = config();
        let input = d.path().join("input");
        let data: Vec<u8> = (0..10_000u32).map(|i| (i % 251) as u8).collect();
        fs::write(&input, &data).unwrap();
        let map_path = d.path().join("input.map");
        let id = cmd_add(&cfg, &input, &map_path).unwrap();

        let ledger = Ledger::open(&cfg.ledger_path).unwrap();
        let asset = ledger.read_asset(&id).unwrap();
        let map = parse_datamap(&fs::read(&map_path).unwrap()).unwrap();
        let hexes: Vec<String> = map.dst_hashes().iter().map(|h| h.to_hex()).collect();
        assert_eq!(
            asset.cids.iter().map(|c| c.to_string()).collect::<Vec<_>>(),
            hexes
        );
        assert_eq!(asset.owner, init_wallet(&cfg.home).unwrap().identity_hex());

        let out = d.path().join("restored");
        cmd_get(&cfg, &id, &map_path, &out).unwrap();
        assert_eq!(fs::read(&out).unwrap(), data);

        let lines = cmd_ls(&cfg).unwrap();
        assert_eq!(lines.len(), 1);
        assert!(lines[0].starts_with(&id));
        assert!(lines[0].ends_with("\t3"));
    }

    #[test]
    fn error_exit_codes() {
        let (d, cfg) = config();
        let missing = cmd_add(&cfg, &d.path().join("nope"), &d.path().join("m")).unwrap_err();
        assert_eq!(missing.exit_code(), 3);

        let small = d.path().join("small");
        fs::write(&small, b"ab").unwrap();
        assert_eq!(
            cmd_add(&cfg, &small, &d.path().join("m"))
                .unwrap_err()
                .exit_code(),
            2
        );

        let unknown = "1b4e28ba-2fa1-41d2-883f-0016d3cca427";
        let err = cmd_get(&cfg, unknown, &d.path().join("m"), &d.path().join("o")).unwrap_err();
        assert_eq!(err.exit_code(), 3);
        assert!(cmd_ls(&cfg).unwrap().is_empty());
    }

    #[test]
    fn wrong_identity_and_foreign_map() {
        let (d, cfg) = config();
        let a = d.path().join("a");
        let b = d.path().join("b");
        fs::write(&a, vec![1u8; 5000]).unwrap();
        fs::write(&b, vec![2u8; 5000]).unwrap();
        let id_a = cmd_add(&cfg, &a, &d.path().join("a.map")).unwrap();
        cmd_add(&cfg, &b, &d.path().join("b.map")).unwrap();

        let err = cmd_get(&cfg, &id_a, &d.path().join("b.map"), &d.path().join("o")).unwrap_err();
        assert!(matches!(err, CliError::MapMismatch(_)));
        assert_eq!(err.exit_code(), 4);

        cmd_init(&cfg, Some("mallory")).unwrap();
        let err = cmd_get(&cfg, &id_a, &d.path().join("a.map"), &d.path().join("o")).unwrap_err();
        assert!(matches!(
            err,
            CliError::Crypto(ibse_core::Error::IdentityMismatch { .. })
        ));
        assert_eq!(err.exit_code(), 4);
        assert!(!d.path().join("o").exists());
    }

    #[test]
    fn missing_and_corrupt_chunks() {
        let (d, cfg) = config();
        let input = d.path().join("input");
        fs::write(&input, vec![9u8; 3000]).unwrap();
        let map = d.path().join("map");
        let id = cmd_add(&cfg, &input, &map).unwrap();
        let asset = Ledger::open(&cfg.ledger_path)
            .unwrap()
            .read_asset(&id)
            .unwrap();
        let object = cfg.store_root.join(asset.cids[1].as_str());

        let mut bytes = fs::read(&object).unwrap();
        bytes[3] ^= 0x80;
        fs::write(&object, &bytes).unwrap();
        let err = cmd_get(&cfg, &id, &map, &d.path().join("o")).unwrap_err();
        assert!(matches!(err, CliError::CorruptChunk(_)));

        fs::remove_file(&object).unwrap();
        assert_eq!(
            cmd_get(&cfg, &id, &map, &d.path().join("o"))
                .unwrap_err()
                .exit_code(),
            3
        );
    }

    #[test]
    fn bench_writes_csv() {
        let d = tempfile::tempdir().unwrap();
        let out = d.path().join("report.csv");
        let report = cmd_bench(&BenchOptions {
            sizes: vec![1000, 2000, 4000],
            runs: 2,
            seed: 5,
            out: out.clone(),
            with_abi: false,
            corpus_dir: Some(d.path().join("corpus")),
        })
        .unwrap();
        assert_eq!(report.rows.len(), 3);
        let csv = fs::read_to_string(out).unwrap();
        assert_eq!(csv.lines().count(), 4);
    }
}
