//! Counter-based SplitMix64.
//!
//! Output `c` of a generator keyed with `k` is `mix64(k + (c + 1)·γ)`, so any
//! draw can be computed directly from its index. With `k = seed` the stream
//! is identical to the sequential SplitMix64 reference generator. Independent
//! streams are obtained by deriving a fresh key from `(seed, stream)`.
//!
//! Only wrapping integer arithmetic is involved, so output is bit-identical
//! on every platform and independent of how work is chunked across threads.

use rand_core::RngCore;

const GAMMA: u64 = 0x9E37_79B9_7F4A_7C15;

#[inline]
fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Random-access 64-bit generator with an internal cursor for sequential use.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CounterRng {
    key: u64,
    counter: u64,
}

impl CounterRng {
    /// Generator whose sequential output equals reference SplitMix64 seeded with `seed`.
    pub fn new(seed: u64) -> Self {
        Self {
            key: seed,
            counter: 0,
        }
    }

    /// Independent stream `stream` derived from `seed`.
    pub fn stream(seed: u64, stream: u64) -> Self {
        Self {
            key: mix64(seed ^ Self::new(0).at(stream)),
            counter: 0,
        }
    }

    pub fn key(&self) -> u64 {
        self.key
    }

    /// The `counter`-th output, independent of the cursor.
    #[inline]
    pub fn at(&self, counter: u64) -> u64 {
        mix64(
            self.key
                .wrapping_add(counter.wrapping_add(1).wrapping_mul(GAMMA)),
        )
    }

    /// The `counter`-th output mapped to `[0, 1)` with 53 bits of precision.
    #[inline]
    pub fn unit_at(&self, counter: u64) -> f64 {
        to_unit(self.at(counter))
    }

    pub fn next_unit(&mut self) -> f64 {
        to_unit(self.next_u64())
    }
}

#[inline]
fn to_unit(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

impl RngCore for CounterRng {
    fn next_u32(&mut self) -> u32 {
        (self.next_u64() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        let v = self.at(self.counter);
        self.counter = self.counter.wrapping_add(1);
        v
    }

    fn fill_bytes(&mut self, dst: &mut [u8]) {
        for chunk in dst.chunks_mut(8) {
            let bytes = self.next_u64().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}
