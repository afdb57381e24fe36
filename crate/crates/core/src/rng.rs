//! Seeded, stream-addressable random numbers.
//!
//! Every Monte Carlo routine derives one ChaCha8 stream per independent unit
//! of work (a mixture component, a block of trials). Stream `k` of seed `s`
//! is the same sequence no matter which thread consumes it or in which order,
//! so results are reproducible bit for bit.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Number of trials drawn from one stream in blocked Monte Carlo loops.
pub const BLOCK: usize = 1 << 16;

/// Returns the generator for stream `stream` of `seed`.
pub fn stream(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Mixes `index` into `seed` (splitmix64 finalizer) to obtain an unrelated seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
