//! Deterministic per-cell seed derivation.
//!
//! Every cell consumes randomness through seeds derived from
//! (master_seed, cell id, role). Adding or reordering cells never
//! perturbs another cell's streams, and the three roles within a cell
//! ("dataset", "trainer", "queries") are mutually distinct.

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in bytes {
        h = (h ^ b as u64).wrapping_mul(FNV_PRIME);
    }
    h
}

pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Seed for one (cell, role) stream. The 0x1f separator keeps
/// ("ab", "c") and ("a", "bc") from colliding.
pub fn derive_seed(master: u64, cell_id: &str, role: &str) -> u64 {
    let mut h = FNV_OFFSET;
    for &b in cell_id.as_bytes() {
        h = (h ^ b as u64).wrapping_mul(FNV_PRIME);
    }
    h = (h ^ 0x1f).wrapping_mul(FNV_PRIME);
    for &b in role.as_bytes() {
        h = (h ^ b as u64).wrapping_mul(FNV_PRIME);
    }
    splitmix64(splitmix64(master) ^ h)
}
