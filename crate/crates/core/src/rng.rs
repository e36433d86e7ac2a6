//! Hierarchical seed derivation.
//!
//! Every random stream in a run is addressed by a path of integer tags below
//! the master seed (ensemble, level, particle, ...). Streams depend only on
//! their path, so the work can be split across any number of workers without
//! changing the output.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type StreamRng = ChaCha8Rng;

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct SeedPath(u64);

impl SeedPath {
    pub const fn new(master: u64) -> Self {
        SeedPath(master)
    }

    pub fn child(self, tag: u64) -> Self {
        SeedPath(splitmix64(self.0 ^ splitmix64(tag ^ 0xD1B5_4A32_D192_ED03)))
    }

    pub fn path(self, tags: &[u64]) -> Self {
        tags.iter().fold(self, |p, &t| p.child(t))
    }

    pub fn rng(self) -> StreamRng {
        let mut seed = [0u8; 32];
        let mut s = self.0;
        for chunk in seed.chunks_exact_mut(8) {
            s = splitmix64(s);
            chunk.copy_from_slice(&s.to_le_bytes());
        }
        ChaCha8Rng::from_seed(seed)
    }

    pub fn raw(self) -> u64 {
        self.0
    }
}
