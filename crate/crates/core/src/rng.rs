//! Counter-addressed random streams.
//!
//! Every draw is addressed by `(seed, stream, index)`. The generator for a
//! draw is a ChaCha8 keystream positioned at a fixed window for that index,
//! so any draw can be regenerated in isolation and results do not depend on
//! how work is split across threads.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

/// Words of keystream reserved for a single draw.
const WINDOW_BITS: u32 = 32;

/// Identifies one draw: enough to regenerate it bit for bit.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DrawId {
    pub seed: u64,
    pub stream: u64,
    pub index: u64,
}

impl DrawId {
    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng.set_word_pos(u128::from(self.index) << WINDOW_BITS);
        rng
    }
}

/// A named stream of draws.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Stream {
    pub seed: u64,
    pub stream: u64,
}

impl Stream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn draw(&self, index: u64) -> DrawId {
        DrawId {
            seed: self.seed,
            stream: self.stream,
            index,
        }
    }

    pub fn rng(&self, index: u64) -> ChaCha8Rng {
        self.draw(index).rng()
    }

    /// Derives a sub-stream; used to keep independent purposes apart.
    pub fn child(&self, tag: u64) -> Stream {
        // splitmix64 finalizer over (stream, tag)
        let mut z = self.stream ^ tag.wrapping_mul(0x9E37_79B9_7F4A_7C15);
        z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
        z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
        z ^= z >> 31;
        Stream {
            seed: self.seed,
            stream: z,
        }
    }
}

/// Radical-inverse (Halton) point in `[0,1)^dims`, used as a deterministic
/// probe set when a quadrature engine is requested on spaces that have no
/// product rule.
pub fn halton(index: u64, dims: usize) -> Vec<f64> {
    const PRIMES: [u64; 24] = [
        2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    ];
    assert!(
        dims <= PRIMES.len(),
        "halton: at most {} dimensions",
        PRIMES.len()
    );
    PRIMES[..dims]
        .iter()
        .map(|&base| {
            let mut i = index + 1;
            let mut f = 1.0;
            let mut r = 0.0;
            while i > 0 {
                f /= base as f64;
                r += f * (i % base) as f64;
                i /= base;
            }
            r
        })
        .collect()
}
