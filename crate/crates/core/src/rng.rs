//! Reproducible random streams.
//!
//! Every sampler in the crate takes an explicit [`RngState`]; the same
//! `(seed, stream)` pair always yields the same sample sequence, and distinct
//! streams under one seed are independent ChaCha streams.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngState {
    pub seed: u64,
    pub stream: u64,
}

impl RngState {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    /// Independent sub-stream, used to fan replicates out.
    ///
    /// The child stream id mixes the parent id with `index` so that nested
    /// fan-outs (suite -> replicate -> component) do not collide.
    pub fn child(&self, index: u64) -> Self {
        let mixed = splitmix64(self.stream ^ splitmix64(index.wrapping_add(0x9e37_79b9_7f4a_7c15)));
        Self { seed: self.seed, stream: mixed }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}
