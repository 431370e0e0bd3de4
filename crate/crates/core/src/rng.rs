//! Named random streams derived from one experiment seed.
//!
//! Each consumer draws from its own ChaCha stream, selected by hashing the
//! purpose name, so adding a consumer never shifts another one's numbers.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub const BASELINE_SAMPLING: &str = "baseline-sampling";
pub const SUITE_SAMPLING: &str = "suite-sampling";

fn fnv1a(s: &str) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in s.bytes() {
        h ^= u64::from(b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

pub fn stream(seed: u64, purpose: &str) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(fnv1a(purpose));
    rng
}
