//! Builds `ibse-guest` for `wasm32-wasip1` and places the module in
//! `OUT_DIR/ibse_guest.wasm`. Set `IBSE_GUEST_WASM` to use a prebuilt module
//! instead.

use std::env;
use std::fs;
use std::path::PathBuf;
use std::process::Command;

const TARGET: &str = "wasm32-wasip1";

fn main() {
    let out_dir = PathBuf::from(env::var_os("OUT_DIR").unwrap());
    let dest = out_dir.join("ibse_guest.wasm");

    println!("cargo:rerun-if-env-changed=IBSE_GUEST_WASM");
    if let Some(prebuilt) = env::var_os("IBSE_GUEST_WASM") {
        println!(
            "cargo:rerun-if-changed={}",
            PathBuf::from(&prebuilt).display()
        );
        fs::copy(&prebuilt, &dest).expect("copy IBSE_GUEST_WASM");
        return;
    }

    let crates = PathBuf::from(env::var_os("CARGO_MANIFEST_DIR").unwrap())
        .parent()
        .unwrap()
        .to_path_buf();
    for dep in ["guest", "core"] {
        println!(
            "cargo:rerun-if-changed={}",
            crates.join(dep).join("src").display()
        );
        println!(
            "cargo:rerun-if-changed={}",
            crates.join(dep).join("Cargo.toml").display()
        );
    }

    let target_dir = out_dir.join("guest-target");
    let cargo = env::var_os("CARGO").unwrap_or_else(|| "cargo".into());
    let status = Command::new(cargo)
        .args([
            "build",
            "--release",
            "--lib",
            "--target",
            TARGET,
            "--manifest-path",
        ])
        .arg(crates.join("guest").join("Cargo.toml"))
        .arg("--target-dir")
        .arg(&target_dir)
        .env_remove("RUSTFLAGS")
        .env_remove("CARGO_ENCODED_RUSTFLAGS")
        .env_remove("CARGO_TARGET_DIR")
        .env_remove("CARGO_BUILD_TARGET")
        .env_remove("CARGO_MAKEFLAGS")
        .env_remove("RUSTC_WORKSPACE_WRAPPER")
        .status()
        .expect("failed to spawn cargo for the guest module");
    if !status.success() {
        panic!("building ibse-guest for {TARGET} failed (is the target installed? `rustup target add {TARGET}`)");
    }
    let built = target_dir
        .join(TARGET)
        .join("release")
        .join("ibse_guest.wasm");
    fs::copy(&built, &dest).expect("copy guest module");
}
