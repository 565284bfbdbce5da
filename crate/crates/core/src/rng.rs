//! Reproducible, splittable random number streams.
//!
//! A stream is a ChaCha8 keystream: the key is expanded from the master seed
//! and the 64-bit ChaCha stream selector carries the stream id, so distinct
//! ids under one master seed never share keystream blocks.

use rand::distr::Open01;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::Exp1;

use crate::scalar::{lit, Real};

#[inline]
fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

fn expand_key(master_seed: u64) -> [u8; 32] {
    let mut key = [0u8; 32];
    let mut state = master_seed;
    for chunk in key.chunks_exact_mut(8) {
        state = splitmix64(state);
        chunk.copy_from_slice(&state.to_le_bytes());
    }
    key
}

/// Single-consumer random stream identified by `(master_seed, stream_id)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    master_seed: u64,
    stream_id: u64,
    inner: ChaCha8Rng,
}

/// Deterministically derives the stream `stream_id` of `master_seed`.
pub fn derive_stream(master_seed: u64, stream_id: u64) -> RngStream {
    RngStream::new(master_seed, stream_id)
}

impl RngStream {
    pub fn new(master_seed: u64, stream_id: u64) -> Self {
        let mut inner = ChaCha8Rng::from_seed(expand_key(master_seed));
        inner.set_stream(stream_id);
        Self {
            master_seed,
            stream_id,
            inner,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master_seed
    }

    pub fn stream_id(&self) -> u64 {
        self.stream_id
    }

    /// Child stream keyed by this stream's identity and `child`.
    ///
    /// The child does not depend on how much of the parent has been consumed.
    pub fn substream(&self, child: u64) -> RngStream {
        let mixed = splitmix64(self.master_seed ^ splitmix64(self.stream_id ^ 0xA076_1D64_78BD_642F));
        RngStream::new(mixed, child)
    }

    /// Uniform draw on the open interval (0, 1).
    pub fn uniform_open<T: Real>(&mut self) -> T {
        let u: f64 = self.inner.sample(Open01);
        lit(u)
    }

    /// Standard exponential draw.
    pub fn exponential<T: Real>(&mut self) -> T {
        let e: f64 = self.inner.sample(Exp1);
        lit(e)
    }

    /// Exponential draw with the given rate.
    pub fn exponential_rate<T: Real>(&mut self, rate: T) -> T {
        self.exponential::<T>() / rate
    }
}

impl RngCore for RngStream {
    fn next_u32(&mut self) -> u32 {
        self.inner.next_u32()
    }

    fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        self.inner.fill_bytes(dst)
    }
}
