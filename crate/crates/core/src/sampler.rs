// SPDX-License-Identifier: Apache-2.0

use rand_chacha::ChaCha8Rng;
use rand_core::{RngCore, SeedableRng};

/// Seeded random stream. The same seed yields the same sequence on every
/// platform, regardless of how many streams run concurrently.
#[derive(Debug, Clone)]
pub struct Sampler {
    seed: u64,
    rng: ChaCha8Rng,
}

impl Sampler {
    pub fn new(seed: u64) -> Self {
        Sampler {
            seed,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream for one trial of an experiment.
    pub fn for_stream(master_seed: u64, stream: u64) -> Self {
        Sampler::new(derive_seed(master_seed, stream))
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    /// Number of 32-bit words consumed so far.
    pub fn position(&self) -> u128 {
        self.rng.get_word_pos()
    }

    pub fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    /// Uniform on `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.rng.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, bound)`; `bound` must be positive.
    pub fn next_below(&mut self, bound: u64) -> u64 {
        assert!(bound > 0);
        // Lemire's widening multiply with rejection.
        let zone = bound.wrapping_neg() % bound;
        loop {
            let m = (self.rng.next_u64() as u128) * (bound as u128);
            if (m as u64) >= zone {
                return (m >> 64) as u64;
            }
        }
    }
}

/// Mixes a master seed and a stream id into a well-spread 64-bit seed.
pub fn derive_seed(master_seed: u64, stream: u64) -> u64 {
    splitmix64(splitmix64(master_seed) ^ stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn reproducible() {
        let a: Vec<u64> = (0..8)
            .map({
                let mut s = Sampler::new(7);
                move |_| s.next_u64()
            })
            .collect();
        let mut s = Sampler::new(7);
        let b: Vec<u64> = (0..8).map(|_| s.next_u64()).collect();
        assert_eq!(a, b);
        assert_ne!(Sampler::new(8).next_u64(), a[0]);
    }

    #[test]
    fn streams_differ() {
        assert_ne!(derive_seed(1, 0), derive_seed(1, 1));
        assert_ne!(derive_seed(1, 0), derive_seed(2, 0));
        assert_eq!(derive_seed(3, 4), derive_seed(3, 4));
    }

    #[test]
    fn unit_interval() {
        let mut s = Sampler::new(0);
        for _ in 0..10_000 {
            let x = s.next_f64();
            assert!((0.0..1.0).contains(&x));
        }
        for _ in 0..1000 {
            assert!(s.next_below(3) < 3);
        }
        assert!(s.position() > 0);
    }
}
