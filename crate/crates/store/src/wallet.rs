//! The owner's keypair. The hex public key is recorded as asset owner and,
//! by default, used as the encryption identity.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use ed25519_dalek::{SigningKey, VerifyingKey};

use crate::fsutil::write_atomic;

pub const WALLET_DIR: &str = "wallet";
pub const PRIVATE_KEY_FILE: &str = "private.key";
pub const PUBLIC_KEY_FILE: &str = "public.key";

#[derive(Debug, thiserror::Error)]
pub enum WalletError {
    #[error("wallet storage failure at {path}: {source}")]
    StorageFailure { path: PathBuf, source: io::Error },
    #[error("wallet at {0} is corrupt")]
    Corrupt(PathBuf),
}

pub struct Wallet {
    signing_key: SigningKey,
}

impl Wallet {
    pub fn from_private_key(bytes: &[u8; 32]) -> Self {
        Wallet {
            signing_key: SigningKey::from_bytes(bytes),
        }
    }

    pub fn public_key(&self) -> VerifyingKey {
        self.signing_key.verifying_key()
    }

    /// Lowercase hex of the 32-byte public key.
    pub fn identity_hex(&self) -> String {
        hex::encode(self.public_key().as_bytes())
    }

    pub fn private_key_bytes(&self) -> [u8; 32] {
        self.signing_key.to_bytes()
    }
}

impl std::fmt::Debug for Wallet {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Wallet")
            .field("identity", &self.identity_hex())
            .finish()
    }
}

fn read_key(path: &Path) -> Result<Option<[u8; 32]>, WalletError> {
    match fs::read(path) {
        Ok(bytes) => bytes
            .try_into()
            .map(Some)
            .map_err(|_| WalletError::Corrupt(path.to_path_buf())),
        Err(e) if e.kind() == io::ErrorKind::NotFound => Ok(None),
        Err(source) => Err(WalletError::StorageFailure {
            path: path.to_path_buf(),
            source,
        }),
    }
}

/// Loads the wallet under `home`, generating and persisting a new keypair
/// on first use.
pub fn init_wallet(home: &Path) -> Result<Wallet, WalletError> {
    let dir = home.join(WALLET_DIR);
    let private_path = dir.join(PRIVATE_KEY_FILE);
    let public_path = dir.join(PUBLIC_KEY_FILE);
    let storage = |path: &Path| {
        let path = path.to_path_buf();
        move |source| WalletError::StorageFailure { path, source }
    };

    if let Some(private) = read_key(&private_path)? {
        let wallet = Wallet::from_private_key(&private);
        if read_key(&public_path)? != Some(wallet.public_key().to_bytes()) {
            return Err(WalletError::Corrupt(dir));
        }
        return Ok(wallet);
    }

    fs::create_dir_all(&dir).map_err(storage(&dir))?;
    let wallet = Wallet::from_private_key(&rand::random());
    write_atomic(&private_path, &wallet.private_key_bytes()).map_err(storage(&private_path))?;
    #[cfg(unix)]
    {
        use std::os::unix::fs::PermissionsExt;
        fs::set_permissions(&private_path, fs::Permissions::from_mode(0o600))
            .map_err(storage(&private_path))?;
    }
    write_atomic(&public_path, wallet.public_key().as_bytes()).map_err(storage(&public_path))?;
    Ok(wallet)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn fresh_and_reloaded() {
        let home = tempfile::tempdir().unwrap();
        let w = init_wallet(home.path()).unwrap();
        let hex = w.identity_hex();
        assert_eq!(hex.len(), 64);
        assert!(hex
            .bytes()
            .all(|b| b.is_ascii_hexdigit() && !b.is_ascii_uppercase()));
        assert_eq!(init_wallet(home.path()).unwrap().identity_hex(), hex);
        let private = fs::read(home.path().join(WALLET_DIR).join(PRIVATE_KEY_FILE)).unwrap();
        assert_eq!(private.len(), 32);
        assert_eq!(
            Wallet::from_private_key(&private.try_into().unwrap()).identity_hex(),
            hex
        );
    }

    #[test]
    fn distinct_homes_get_distinct_keys() {
        let a = tempfile::tempdir().unwrap();
        let b = tempfile::tempdir().unwrap();
        assert_ne!(
            init_wallet(a.path()).unwrap().identity_hex(),
            init_wallet(b.path()).unwrap().identity_hex()
        );
    }

    #[test]
    fn unwritable_home() {
        let dir = tempfile::tempdir().unwrap();
        let home = dir.path().join("file-not-dir");
        fs::write(&home, b"").unwrap();
        assert!(matches!(
            init_wallet(&home),
            Err(WalletError::StorageFailure { .. })
        ));
    }

    #[test]
    fn mismatched_public_key_is_corrupt() {
        let home = tempfile::tempdir().unwrap();
        init_wallet(home.path()).unwrap();
        fs::write(
            home.path().join(WALLET_DIR).join(PUBLIC_KEY_FILE),
            [0u8; 32],
        )
        .unwrap();
        assert!(matches!(
            init_wallet(home.path()),
            Err(WalletError::Corrupt(_))
        ));
    }
}
