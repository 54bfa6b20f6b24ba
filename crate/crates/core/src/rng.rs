//! Counter-style substreams: every realization gets its own ChaCha8 stream
//! derived from `(master_seed, rho_index, realization_index)`, so ensemble
//! results do not depend on evaluation order or worker count.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type SubstreamRng = ChaCha8Rng;

/// Stream id packing: high 32 bits carry the `ρ` index, low 32 bits the
/// realization index.
pub fn stream_id(rho_index: usize, realization: usize) -> u64 {
    debug_assert!(realization <= u32::MAX as usize);
    ((rho_index as u64) << 32) | (realization as u64 & 0xffff_ffff)
}

pub fn substream(master_seed: u64, rho_index: usize, realization: usize) -> SubstreamRng {
    let mut rng = ChaCha8Rng::seed_from_u64(master_seed);
    rng.set_stream(stream_id(rho_index, realization));
    rng
}
