//! Byte-exact fixtures produced by `tests/fixtures/oracle.py`, an
//! independent Python implementation of the scheme.

use ibse_core::{
    parse_datamap, self_decrypt, self_encrypt, serialize_datamap, Identity, MAX_CHUNK_SIZE,
};

fn pattern(len: usize) -> Vec<u8> {
    (0..len).map(|i| ((i * 31 + 7) % 256) as u8).collect()
}

#[test]
fn small_file_matches_oracle() {
    let id = Identity::new("alice").unwrap();
    let (map, blobs) = self_encrypt(&pattern(1000), &id).unwrap();
    assert_eq!(
        serialize_datamap(&map).unwrap(),
        include_bytes!("fixtures/golden_1000_alice.idsemap")
    );
    let expected: Vec<&str> = include_str!("fixtures/golden_1000_alice.blobs.hex")
        .lines()
        .collect();
    let actual: Vec<String> = blobs.iter().map(hex::encode).collect();
    assert_eq!(actual, expected);
}

#[test]
fn multi_chunk_file_matches_oracle() {
    let id = Identity::new("0123456789abcdef".repeat(4)).unwrap();
    let data = pattern(3 * MAX_CHUNK_SIZE + 1);
    let (map, blobs) = self_encrypt(&data, &id).unwrap();
    let golden = include_bytes!("fixtures/golden_3mib_plus_1.idsemap");
    assert_eq!(serialize_datamap(&map).unwrap(), golden);
    assert_eq!(map.chunks.len(), 4);

    let parsed = parse_datamap(golden).unwrap();
    assert_eq!(self_decrypt(&parsed, &blobs, &id).unwrap(), data);
}
