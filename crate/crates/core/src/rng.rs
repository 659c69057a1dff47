//! Named, counter-addressable random substreams.
//!
//! Every random draw in the crate is keyed by `(seed, domain, stream)` and,
//! where needed, a block offset inside the stream. ChaCha is a counter-based
//! generator, so jumping to a word position is O(1) and the values produced
//! for one key never depend on what was drawn for another key.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Words reserved per block inside a stream. Block samplers draw far fewer.
const WORDS_PER_BLOCK_SHIFT: u32 = 20;

const fn fnv1a(bytes: &[u8]) -> u64 {
    let mut hash: u64 = 0xcbf2_9ce4_8422_2325;
    let mut i = 0;
    while i < bytes.len() {
        hash ^= bytes[i] as u64;
        hash = hash.wrapping_mul(0x0000_0100_0000_01b3);
        i += 1;
    }
    hash
}

/// Stream for `(seed, domain, index)`.
pub fn stream(seed: u64, domain: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ fnv1a(domain.as_bytes()));
    rng.set_stream(index);
    rng
}

/// Stream positioned at the start of `block` within `(seed, domain, index)`.
pub fn block_stream(seed: u64, domain: &str, index: u64, block: u64) -> ChaCha8Rng {
    let mut rng = stream(seed, domain, index);
    rng.set_word_pos((block as u128) << WORDS_PER_BLOCK_SHIFT);
    rng
}

/// Derive a child seed for a named sub-experiment.
pub fn derive_seed(seed: u64, domain: &str, index: u64) -> u64 {
    use rand::RngCore;
    stream(seed, domain, index).next_u64()
}
