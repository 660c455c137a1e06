//! Counter-based seeding. Every random quantity is derived from a master
//! seed and a fixed counter (site coordinates, replicate number, task id), so
//! results never depend on traversal order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type WalkRng = ChaCha8Rng;

#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Hash of a seed together with a sequence of counters.
pub fn hash_words(seed: u64, words: impl IntoIterator<Item = u64>) -> u64 {
    let mut h = splitmix64(seed ^ 0x5EED_0F_A11_0C47E);
    for w in words {
        h = splitmix64(h ^ w);
    }
    h
}

pub fn site_hash(seed: u64, site: &[i64]) -> u64 {
    hash_words(seed, site.iter().map(|&c| c as u64))
}

/// Uniform draw in `[0, 1)` from the top 53 bits of a hash.
#[inline]
pub fn unit_interval(h: u64) -> f64 {
    (h >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Seed for sub-stream `stream` of a master seed.
pub fn derive_seed(master: u64, stream: u64) -> u64 {
    hash_words(master, [0xD1B5_4A32_D192_ED03, stream])
}

pub fn stream_rng(master: u64, stream: u64) -> WalkRng {
    WalkRng::seed_from_u64(derive_seed(master, stream))
}
