//! Deterministic generators.
//!
//! Everything that has to agree across independent implementations goes
//! through this module:
//!
//! * [`SplitMix64`] (Steele, Lea and Flood) expands a 64-bit seed.
//! * [`Xoshiro256StarStar`] (Blackman and Vigna) is the stream generator.
//!   [`Xoshiro256StarStar::seed_from_u64`] fills the four state words with
//!   the first four SplitMix64 outputs for the seed, in order.
//! * [`derive_seed`] splits a base seed into independent sub-seeds.
//!
//! The generators are not cryptographic. Block verification only needs
//! every node to derive the same partition from the block hash; a CSPRNG
//! can be substituted behind [`partition_bids`](crate::rsop::partition_bids)
//! without touching anything else.

use rand::RngCore;

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// SplitMix64 output mixing function.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[derive(Clone, Debug)]
pub struct SplitMix64 {
    state: u64,
}

impl SplitMix64 {
    pub fn new(seed: u64) -> Self {
        Self { state: seed }
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN_GAMMA);
        mix64(self.state)
    }
}

#[derive(Clone, Debug)]
pub struct Xoshiro256StarStar {
    s: [u64; 4],
}

impl Xoshiro256StarStar {
    pub fn seed_from_u64(seed: u64) -> Self {
        let mut sm = SplitMix64::new(seed);
        let s = [sm.next_u64(), sm.next_u64(), sm.next_u64(), sm.next_u64()];
        Self { s }
    }

    #[inline]
    pub fn next(&mut self) -> u64 {
        let s = &mut self.s;
        let result = s[1].wrapping_mul(5).rotate_left(7).wrapping_mul(9);
        let t = s[1] << 17;
        s[2] ^= s[0];
        s[3] ^= s[1];
        s[1] ^= s[2];
        s[0] ^= s[3];
        s[2] ^= t;
        s[3] = s[3].rotate_left(45);
        result
    }

    /// Uniform draw in `[0, 1)` from the top 53 bits.
    #[inline]
    pub fn next_f64(&mut self) -> f64 {
        (self.next() >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
    }

    /// One fair bit: the most significant bit of the next output.
    #[inline]
    pub fn next_bit(&mut self) -> bool {
        self.next() >> 63 == 1
    }
}

impl RngCore for Xoshiro256StarStar {
    fn next_u32(&mut self) -> u32 {
        (self.next() >> 32) as u32
    }

    fn next_u64(&mut self) -> u64 {
        self.next()
    }

    fn fill_bytes(&mut self, dest: &mut [u8]) {
        for chunk in dest.chunks_mut(8) {
            let bytes = self.next().to_le_bytes();
            chunk.copy_from_slice(&bytes[..chunk.len()]);
        }
    }
}

/// Sub-seed for a sequence of indices under `base`.
///
/// `h = mix64(base); for each x: h = mix64(h + GOLDEN_GAMMA * (x + 1))`. The
/// result depends only on the inputs, never on evaluation order.
pub fn derive_seed(base: u64, path: &[u64]) -> u64 {
    path.iter().fold(mix64(base), |h, &x| {
        mix64(h.wrapping_add(GOLDEN_GAMMA.wrapping_mul(x.wrapping_add(1))))
    })
}
