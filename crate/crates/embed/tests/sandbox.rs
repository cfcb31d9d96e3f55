use std::fs;
use std::path::Path;

use ibse_core::abi;
use ibse_core::fileio::{encrypt_file_to_dir, DATA_MAP_FILE};
use ibse_core::Identity;
use ibse_embed::{EmbedError, HostValue, ReturnKind, SandboxModule, Wrapper};
use rand::{Rng, SeedableRng};

fn wrapper(dir: &Path) -> Wrapper {
    SandboxModule::shared().unwrap().instantiate(dir).unwrap()
}

fn sorted_dir(dir: &Path) -> Vec<(String, Vec<u8>)> {
    let mut out: Vec<_> = fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let e = e.unwrap();
            (
                e.file_name().into_string().unwrap(),
                fs::read(e.path()).unwrap(),
            )
        })
        .collect();
    out.sort();
    out
}

#[test]
fn allocate_reports_nonzero_address() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    let base = w.live_sandbox_allocations().unwrap();
    let HostValue::Integer(addr) = w
        .invoke(
            "abi_allocate",
            ReturnKind::Integer,
            &[HostValue::Integer(64)],
        )
        .unwrap()
    else {
        panic!("integer expected")
    };
    assert_ne!(addr, 0);
    assert_eq!(w.live_sandbox_allocations().unwrap(), base + 1);
    let freed = w
        .invoke(
            "abi_deallocate",
            ReturnKind::Integer,
            &[addr.into(), 64.into()],
        )
        .unwrap();
    assert_eq!(freed, HostValue::Integer(abi::OK as i64));
    assert_eq!(w.live_sandbox_allocations().unwrap(), base);
}

#[test]
fn zero_sized_allocation_is_null() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    assert_eq!(
        w.invoke("abi_allocate", ReturnKind::Integer, &[0.into()])
            .unwrap(),
        HostValue::Integer(0)
    );
}

#[test]
fn double_and_mismatched_free_are_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    let HostValue::Integer(addr) = w
        .invoke("abi_allocate", ReturnKind::Integer, &[32.into()])
        .unwrap()
    else {
        panic!()
    };
    let free = |w: &mut Wrapper, size: i64| {
        w.invoke(
            "abi_deallocate",
            ReturnKind::Integer,
            &[addr.into(), size.into()],
        )
        .unwrap()
    };
    assert_eq!(
        free(&mut w, 16),
        HostValue::Integer(abi::INVALID_FREE as i64)
    );
    assert_eq!(free(&mut w, 32), HostValue::Integer(abi::OK as i64));
    assert_eq!(
        free(&mut w, 32),
        HostValue::Integer(abi::INVALID_FREE as i64)
    );
}

#[test]
fn unknown_function() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    assert!(matches!(
        w.invoke("no_such_export", ReturnKind::Unit, &[]),
        Err(EmbedError::UnknownFunction(name)) if name == "no_such_export"
    ));
}

#[test]
fn echo_roundtrip_and_log() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    for s in ["", "x", "hello sandbox", "ünïcödé"] {
        let out = w
            .invoke(
                "abi_echo",
                ReturnKind::ByteStringAddress,
                &[HostValue::from(s)],
            )
            .unwrap_or_else(|e| panic!("{s:?}: {e}"));
        if s.is_empty() {
            assert_eq!(out, HostValue::Bytes(vec![]));
        } else {
            assert_eq!(out, HostValue::from(s));
        }
    }
    assert_eq!(w.allocation_log().len(), 4);
    let lens: Vec<u32> = w
        .allocation_log()
        .entries()
        .iter()
        .map(|&(_, l)| l)
        .collect();
    assert_eq!(lens, vec![1, 2, 14, 12]);
    let report = w.shutdown().unwrap();
    assert_eq!(report.released, 4);
    assert!(report.rejected.is_empty());
}

#[test]
fn embedded_nul_is_refused_before_allocating() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    let err = w
        .invoke(
            "abi_echo",
            ReturnKind::ByteStringAddress,
            &[HostValue::Bytes(b"a\0b".to_vec())],
        )
        .unwrap_err();
    assert!(matches!(err, EmbedError::EmbeddedNul));
    assert!(w.allocation_log().is_empty());
}

#[test]
fn kind_and_argument_mismatches() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    assert!(matches!(
        w.invoke("abi_live_allocations", ReturnKind::Unit, &[]),
        Err(EmbedError::KindMismatch { .. })
    ));
    assert!(matches!(
        w.invoke("abi_echo", ReturnKind::Integer, &[]),
        Err(EmbedError::ArgumentMismatch { .. })
    ));
    // Null input makes echo return a null address.
    assert!(matches!(
        w.invoke("abi_echo", ReturnKind::ByteStringAddress, &[0.into()]),
        Err(EmbedError::KindMismatch { .. })
    ));
}

#[test]
fn out_of_bounds_address_traps() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    let err = w
        .invoke(
            "abi_echo",
            ReturnKind::ByteStringAddress,
            &[HostValue::Integer(-16)],
        )
        .unwrap_err();
    assert!(matches!(err, EmbedError::Invocation { .. }), "{err}");
}

#[test]
fn number_cells() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    let addr = w.pass_number(0xdead_beef).unwrap();
    assert_eq!(w.read_number(addr).unwrap(), 0xdead_beef);
    assert_eq!(w.allocation_log().entries(), &[(addr, 4)]);
    assert!(w.read_number(u32::MAX - 1).is_err());
}

#[test]
fn shutdown_returns_sandbox_to_baseline() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    let base = w.live_sandbox_allocations().unwrap();
    for i in 0..20 {
        w.pass_byte_string(format!("arg-{i}").as_bytes()).unwrap();
    }
    assert_eq!(w.live_sandbox_allocations().unwrap(), base + 20);
    let log = w.allocation_log().clone();
    let mut offsets: Vec<u32> = log.entries().iter().map(|&(o, _)| o).collect();
    offsets.sort();
    offsets.dedup();
    assert_eq!(offsets.len(), 20);
    assert_eq!(w.shutdown().unwrap().released, 20);
}

#[test]
fn paths_outside_the_grant_are_refused() {
    let dir = tempfile::tempdir().unwrap();
    let other = tempfile::tempdir().unwrap();
    let w = wrapper(dir.path());
    assert_eq!(w.guest_path(dir.path()).unwrap(), "/granted");
    assert_eq!(
        w.guest_path(&dir.path().join("a/b.txt")).unwrap(),
        "/granted/a/b.txt"
    );
    assert!(matches!(
        w.guest_path(&other.path().join("x")),
        Err(EmbedError::PathOutsideSandbox(_))
    ));
    assert!(matches!(
        w.guest_path(&dir.path().join("../escape")),
        Err(EmbedError::PathOutsideSandbox(_))
    ));
}

#[test]
fn abi_output_matches_native() {
    let dir = tempfile::tempdir().unwrap();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
    let mut w = wrapper(dir.path());
    for (n, len) in [3usize, 17, 1000, 65_537, 1 << 20].into_iter().enumerate() {
        let mut data = vec![0u8; len];
        rng.fill(&mut data[..]);
        let input = dir.path().join(format!("in{n}"));
        fs::write(&input, &data).unwrap();
        let id = format!("ident-{n}");

        let abi_out = dir.path().join(format!("abi{n}"));
        assert_eq!(w.encrypt_file(&input, &id, &abi_out).unwrap(), abi::OK);
        let native_out = dir.path().join(format!("native{n}"));
        encrypt_file_to_dir(
            &input,
            &Identity::try_from(id.as_str()).unwrap(),
            &native_out,
        )
        .unwrap();
        assert_eq!(sorted_dir(&abi_out), sorted_dir(&native_out));

        let restored = dir.path().join(format!("out{n}"));
        let status = w
            .decrypt_file(&abi_out.join(DATA_MAP_FILE), &abi_out, &id, &restored)
            .unwrap();
        assert_eq!(status, abi::OK);
        assert_eq!(fs::read(&restored).unwrap(), data);
    }
    assert!(w.shutdown().unwrap().rejected.is_empty());
}

#[test]
fn failure_statuses() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    let out = dir.path().join("enc");

    assert_eq!(
        w.encrypt_file(&dir.path().join("missing"), "alice", &out)
            .unwrap(),
        abi::MISSING_INPUT
    );
    let small = dir.path().join("small");
    fs::write(&small, b"ab").unwrap();
    assert_eq!(
        w.encrypt_file(&small, "alice", &out).unwrap(),
        abi::INPUT_TOO_SMALL
    );

    let input = dir.path().join("input");
    fs::write(&input, vec![5u8; 5000]).unwrap();
    assert_eq!(
        w.encrypt_file(&input, "", &out).unwrap(),
        abi::EMPTY_IDENTITY
    );
    assert_eq!(w.encrypt_file(&input, "alice", &out).unwrap(), abi::OK);

    let map = out.join(DATA_MAP_FILE);
    let restored = dir.path().join("restored");
    assert_eq!(
        w.decrypt_file(&map, &out, "bob", &restored).unwrap(),
        abi::IDENTITY_MISMATCH
    );

    let blob = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().path())
        .find(|p| p.file_name().unwrap() != DATA_MAP_FILE)
        .unwrap();
    let mut bytes = fs::read(&blob).unwrap();
    bytes[0] ^= 1;
    fs::write(&blob, bytes).unwrap();
    assert_eq!(
        w.decrypt_file(&map, &out, "alice", &restored).unwrap(),
        abi::INTEGRITY_FAILURE
    );

    fs::write(&map, b"{\"version\":").unwrap();
    assert_eq!(
        w.decrypt_file(&map, &out, "alice", &restored).unwrap(),
        abi::MALFORMED_MAP
    );
}

#[test]
fn drop_sweeps_without_shutdown() {
    let dir = tempfile::tempdir().unwrap();
    let mut w = wrapper(dir.path());
    w.pass_byte_string(b"left behind").unwrap();
    drop(w);
}

proptest::proptest! {
    #![proptest_config(proptest::prelude::ProptestConfig::with_cases(64))]

    #[test]
    fn echo_preserves_any_nul_free_bytes(bytes in proptest::collection::vec(1u8..=255, 1..512)) {
        let dir = tempfile::tempdir().unwrap();
        let mut w = wrapper(dir.path());
        let base = w.live_sandbox_allocations().unwrap();
        let out = w
            .invoke("abi_echo", ReturnKind::ByteStringAddress, &[HostValue::Bytes(bytes.clone())])
            .unwrap();
        proptest::prop_assert_eq!(out, HostValue::Bytes(bytes));
        proptest::prop_assert_eq!(w.live_sandbox_allocations().unwrap(), base + 1);
        let report = w.shutdown().unwrap();
        proptest::prop_assert_eq!(report.released, 1);
    }
}
