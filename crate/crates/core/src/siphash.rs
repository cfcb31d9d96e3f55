//! SipHash with a configurable number of compression and finalization
//! rounds. Only the one-shot form is provided; identities are hashed whole.

/// 128-bit SipHash key.
pub type SipKey = [u8; 16];

/// The key used for identity digests.
pub const ZERO_KEY: SipKey = [0u8; 16];

#[derive(Clone, Copy)]
struct State {
    v0: u64,
    v1: u64,
    v2: u64,
    v3: u64,
}

impl State {
    fn new(key: &SipKey) -> Self {
        let k0 = u64::from_le_bytes(key[..8].try_into().unwrap());
        let k1 = u64::from_le_bytes(key[8..].try_into().unwrap());
        State {
            v0: k0 ^ 0x736f_6d65_7073_6575,
            v1: k1 ^ 0x646f_7261_6e64_6f6d,
            v2: k0 ^ 0x6c79_6765_6e65_7261,
            v3: k1 ^ 0x7465_6462_7974_6573,
        }
    }

    #[inline(always)]
    fn round(&mut self) {
        self.v0 = self.v0.wrapping_add(self.v1);
        self.v1 = self.v1.rotate_left(13) ^ self.v0;
        self.v0 = self.v0.rotate_left(32);
        self.v2 = self.v2.wrapping_add(self.v3);
        self.v3 = self.v3.rotate_left(16) ^ self.v2;
        self.v0 = self.v0.wrapping_add(self.v3);
        self.v3 = self.v3.rotate_left(21) ^ self.v0;
        self.v2 = self.v2.wrapping_add(self.v1);
        self.v1 = self.v1.rotate_left(17) ^ self.v2;
        self.v2 = self.v2.rotate_left(32);
    }

    #[inline(always)]
    fn compress<const C: usize>(&mut self, m: u64) {
        self.v3 ^= m;
        for _ in 0..C {
            self.round();
        }
        self.v0 ^= m;
    }
}

/// SipHash-`C`-`D` of `data` under `key`.
pub fn siphash<const C: usize, const D: usize>(key: &SipKey, data: &[u8]) -> u64 {
    let mut s = State::new(key);

    let mut words = data.chunks_exact(8);
    for w in &mut words {
        s.compress::<C>(u64::from_le_bytes(w.try_into().unwrap()));
    }

    let rest = words.remainder();
    let mut last = [0u8; 8];
    last[..rest.len()].copy_from_slice(rest);
    // The message length mod 256 occupies the top byte of the final word.
    last[7] = data.len() as u8;
    s.compress::<C>(u64::from_le_bytes(last));

    s.v2 ^= 0xff;
    for _ in 0..D {
        s.round();
    }
    s.v0 ^ s.v1 ^ s.v2 ^ s.v3
}

/// SipHash-1-3, the variant used for identity digests.
pub fn siphash13(key: &SipKey, data: &[u8]) -> u64 {
    siphash::<1, 3>(key, data)
}

/// SipHash-2-4, the reference variant. Kept for the published test vectors.
pub fn siphash24(key: &SipKey, data: &[u8]) -> u64 {
    siphash::<2, 4>(key, data)
}
