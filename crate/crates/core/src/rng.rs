//! Seeded, reproducible random streams.
//!
//! Every stream is a ChaCha8 generator. The 256-bit key is expanded from the
//! master seed with SplitMix64, and the stream id selects ChaCha's 64-bit
//! stream (nonce). Two streams with the same `(master, id)` produce the same
//! sequence on every platform; distinct ids from one master are independent
//! keystreams.
//!
//! Stream ids used by the crate:
//!
//! * single runs (`evolve`): the id given by the caller, default `0`;
//! * experiments: `(variant_index << 48) | (size_index << 32) | repetition`;
//! * instance generation: stream `0` of a seed derived with [`derive_seed`].

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

/// Largest Poisson mean accepted by [`RngStream::poisson`].
pub const MAX_POISSON_LAMBDA: f64 = 30.0;

/// Default master seed when none is supplied.
pub const DEFAULT_SEED: u64 = 0xC0FFEE;

/// SplitMix64 step.
fn splitmix64(state: &mut u64) -> u64 {
    *state = state.wrapping_add(0x9E37_79B9_7F4A_7C15);
    let mut z = *state;
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Mixes a master seed with a tag into a new 64-bit seed.
pub fn derive_seed(master: u64, tag: u64) -> u64 {
    let mut s = master ^ tag.rotate_left(32);
    splitmix64(&mut s);
    splitmix64(&mut s)
}

/// A single-consumer random stream identified by `(master seed, stream id)`.
#[derive(Clone, Debug)]
pub struct RngStream {
    inner: ChaCha8Rng,
    master: u64,
    stream: u64,
}

impl RngStream {
    pub fn new(master: u64, stream: u64) -> Self {
        let mut state = master;
        let mut key = [0u8; 32];
        for chunk in key.chunks_exact_mut(8) {
            chunk.copy_from_slice(&splitmix64(&mut state).to_le_bytes());
        }
        let mut inner = ChaCha8Rng::from_seed(key);
        inner.set_stream(stream);
        RngStream {
            inner,
            master,
            stream,
        }
    }

    pub fn master_seed(&self) -> u64 {
        self.master
    }

    pub fn stream_id(&self) -> u64 {
        self.stream
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform double in `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// Uniform integer in `[0, k)`, `k >= 1`. Unbiased (Lemire's multiply and reject).
    #[inline]
    pub(crate) fn below(&mut self, k: u64) -> u64 {
        debug_assert!(k >= 1);
        let mut m = u128::from(self.next_u64()) * u128::from(k);
        let mut low = m as u64;
        if low < k {
            let threshold = k.wrapping_neg() % k;
            while low < threshold {
                m = u128::from(self.next_u64()) * u128::from(k);
                low = m as u64;
            }
        }
        (m >> 64) as u64
    }

    /// Uniform integer in `[0, k)`.
    pub fn uniform_index(&mut self, k: u64) -> Result<u64> {
        if k == 0 {
            return Err(Error::param("uniform_index bound must be at least 1"));
        }
        Ok(self.below(k))
    }

    /// Bernoulli trial with success probability `p`.
    ///
    /// `p = 0` and `p = 1` are decided without consuming randomness.
    pub fn bernoulli(&mut self, p: f64) -> Result<bool> {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::param(format!("probability {p} outside [0, 1]")));
        }
        Ok(self.coin(p))
    }

    #[inline]
    pub(crate) fn coin(&mut self, p: f64) -> bool {
        if p <= 0.0 {
            false
        } else if p >= 1.0 {
            true
        } else {
            self.next_f64() < p
        }
    }

    /// Poisson sample by sequential-search inversion. `0 <= lambda <= 30`.
    pub fn poisson(&mut self, lambda: f64) -> Result<u64> {
        if !(0.0..=MAX_POISSON_LAMBDA).contains(&lambda) {
            return Err(Error::param(format!(
                "poisson mean {lambda} outside [0, {MAX_POISSON_LAMBDA}]"
            )));
        }
        Ok(self.poisson_unchecked(lambda))
    }

    #[inline]
    pub(crate) fn poisson_unchecked(&mut self, lambda: f64) -> u64 {
        self.poisson_with_p0(lambda, (-lambda).exp())
    }

    /// Inversion with the caller supplying `p0 = exp(-lambda)`.
    #[inline]
    pub(crate) fn poisson_with_p0(&mut self, lambda: f64, p0: f64) -> u64 {
        if lambda == 0.0 {
            return 0;
        }
        let u = self.next_f64();
        let mut k = 0u64;
        let mut p = p0;
        let mut cdf = p;
        // The cap only matters when rounding leaves the cdf just below u.
        while u >= cdf && k < 1000 {
            k += 1;
            p *= lambda / k as f64;
            cdf += p;
        }
        k
    }
}
