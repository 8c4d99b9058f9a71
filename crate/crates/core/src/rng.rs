//! Deterministic chunked random streams.
//!
//! A request for `n` draws is cut into fixed-size chunks; chunk `c` draws from
//! ChaCha8 seeded with `seed` on stream `c`. Output is the chunk-order
//! concatenation, so results do not depend on the rayon thread count.

use rand::distr::Open01;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

pub const CHUNK_SIZE: usize = 4096;

pub fn stream(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Uniform draw on the open interval (0, 1).
#[inline]
pub fn open01(rng: &mut ChaCha8Rng) -> f64 {
    rng.sample(Open01)
}

/// Draws `n` values with `draw`, in parallel over chunks.
pub fn par_draw<V, F>(n: usize, seed: u64, draw: F) -> Vec<V>
where
    V: Send,
    F: Fn(&mut ChaCha8Rng) -> V + Sync,
{
    let chunks = n.div_ceil(CHUNK_SIZE);
    let parts: Vec<Vec<V>> = (0..chunks)
        .into_par_iter()
        .map(|c| {
            let mut rng = stream(seed, c as u64);
            let len = CHUNK_SIZE.min(n - c * CHUNK_SIZE);
            (0..len).map(|_| draw(&mut rng)).collect()
        })
        .collect();
    parts.into_iter().flatten().collect()
}
