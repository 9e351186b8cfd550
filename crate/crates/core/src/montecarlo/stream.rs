use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::Real;

/// Reproducible random source addressed by `(seed, stream_id)`.
///
/// Backed by ChaCha8: the seed keys the cipher and `stream_id` selects the
/// nonce, so distinct ids give independent, non-overlapping sequences and a
/// stream can be recreated from its coordinates alone. Simulations hand trial
/// `i` the stream `(seed, i)`, which makes results independent of how trials
/// are scheduled across threads.
#[derive(Debug, Clone)]
pub struct RandomStream {
    seed: u64,
    stream_id: u64,
    rng: ChaCha8Rng,
}

impl RandomStream {
    pub fn new(seed: u64, stream_id: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream_id);
        RandomStream {
            seed,
            stream_id,
            rng,
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Stream of trial `index` within the run identified by this stream's
    /// coordinates. Depends only on `(seed, stream_id, index)`.
    pub fn substream(&self, index: u64) -> RandomStream {
        RandomStream::new(mix(self.seed, self.stream_id), index)
    }

    /// Uniform on `[0, 1)`.
    pub fn uniform(&mut self) -> f64 {
        self.rng.gen::<f64>()
    }

    /// Uniform on `(0, 1]`.
    pub fn uniform_open_below(&mut self) -> f64 {
        1.0 - self.rng.gen::<f64>()
    }

    /// Exponential variate with the given mean (inverse CDF).
    pub fn exponential<T: Real>(&mut self, mean: T) -> T {
        let u = self.uniform_open_below();
        mean * T::lit(-u.ln())
    }
}

/// SplitMix64 finaliser over the pair, so runs with different
/// `(seed, stream_id)` key different ciphers.
fn mix(seed: u64, stream_id: u64) -> u64 {
    let mut z = seed ^ stream_id.wrapping_add(0x9E37_79B9_7F4A_7C15).rotate_left(29);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

impl RngCore for RandomStream {
    fn next_u32(&mut self) -> u32 {
        self.rng.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.rng.next_u64()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        self.rng.fill_bytes(dest)
    }

    fn try_fill_bytes(&mut self, dest: &mut [u8]) -> Result<(), rand::Error> {
        self.rng.try_fill_bytes(dest)
    }
}
