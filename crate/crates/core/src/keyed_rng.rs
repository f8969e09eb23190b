//! Keyed, counter-based random streams.
//!
//! Every random value the sketchers consume comes from a stream identified by
//! `(global_seed, element_index, ball_counter)`. The key never includes a
//! weight, so two vectors sharing element `i` see exactly the same draws for
//! process `i`. That is what makes sketches of different vectors comparable.
//!
//! The generator is SplitMix64 run in counter mode: the key is hashed to a
//! 64-bit start value and the `n`-th output is `mix(start + (n + 1) * GOLDEN)`.
//! Each key therefore has a period of 2^64 and any draw is a pure function of
//! the key and the draw index. These constants are frozen; changing them
//! changes every sketch ever produced.

use crate::error::{invalid, Result};

const GOLDEN: u64 = 0x9e37_79b9_7f4a_7c15;
const INDEX_MUL: u64 = 0xd1b5_4a32_d192_ed03;
const COUNTER_MUL: u64 = 0xaef1_7502_108e_f2d9;
const DOMAIN_MUL: u64 = 0xf135_7aea_2e62_a9c5;

/// Gamma shapes up to this value are sampled as a sum of exponentials.
const GAMMA_SUM_LIMIT: u64 = 8;

/// Stafford's "mix13" finalizer, as used by SplitMix64.
#[inline]
pub fn mix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Separates the randomness of independent generators that would otherwise
/// share `(seed, i, counter)` keys.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
#[repr(u64)]
pub enum Domain {
    /// BBM-Mix / FastGM ball generation.
    #[default]
    Mix = 0,
    /// Reference BBM-Hash generator.
    Hash = 1,
    /// Reference BBM-Permutation generator.
    Permutation = 2,
    /// Direct Gumbel-Max baseline, keyed by `(i, register)`.
    Direct = 3,
    /// Synthetic benchmark data.
    Synthetic = 4,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct StreamKey {
    pub global_seed: u64,
    pub element_index: u64,
    pub ball_counter: u64,
    pub domain: Domain,
}

impl StreamKey {
    pub fn new(global_seed: u64, element_index: u64, ball_counter: u64) -> Self {
        StreamKey {
            global_seed,
            element_index,
            ball_counter,
            domain: Domain::Mix,
        }
    }

    pub fn in_domain(self, domain: Domain) -> Self {
        StreamKey { domain, ..self }
    }

    fn start_state(&self) -> u64 {
        let mut h = mix64(self.global_seed.wrapping_add(GOLDEN));
        h = mix64(h ^ self.element_index.wrapping_mul(INDEX_MUL));
        h = mix64(h ^ self.ball_counter.wrapping_mul(COUNTER_MUL));
        if self.domain != Domain::Mix {
            h = mix64(h ^ (self.domain as u64).wrapping_mul(DOMAIN_MUL));
        }
        h
    }
}

/// A deterministic stream of random values. Cheap to create; not `Sync`-shared
/// by design of its `&mut self` API.
#[derive(Debug, Clone)]
pub struct RandomStream {
    state: u64,
    draw_count: u64,
}

pub fn derive_stream(key: StreamKey) -> RandomStream {
    RandomStream {
        state: key.start_state(),
        draw_count: 0,
    }
}

impl RandomStream {
    /// Number of raw 64-bit values consumed so far.
    pub fn draw_count(&self) -> u64 {
        self.draw_count
    }

    #[inline]
    pub fn next_u64(&mut self) -> u64 {
        self.state = self.state.wrapping_add(GOLDEN);
        self.draw_count += 1;
        mix64(self.state)
    }

    /// Uniform draw in the open interval (0, 1).
    ///
    /// Uses the top 53 bits; an exact zero is remapped to the smallest
    /// positive normal `f64` so `ln` stays finite.
    #[inline]
    pub fn next_uniform(&mut self) -> f64 {
        let u = (self.next_u64() >> 11) as f64 * (1.0 / (1u64 << 53) as f64);
        if u == 0.0 {
            f64::MIN_POSITIVE
        } else {
            u
        }
    }

    /// Uniform integer in `1..=m` (Lemire's nearly-divisionless method).
    pub fn next_int(&mut self, m: u64) -> Result<u64> {
        if m == 0 {
            return Err(invalid("next_int requires m >= 1"));
        }
        Ok(self.next_int_unchecked(m))
    }

    #[inline]
    pub(crate) fn next_int_unchecked(&mut self, m: u64) -> u64 {
        debug_assert!(m >= 1);
        let mut prod = self.next_u64() as u128 * m as u128;
        let mut low = prod as u64;
        if low < m {
            let threshold = m.wrapping_neg() % m;
            while low < threshold {
                prod = self.next_u64() as u128 * m as u128;
                low = prod as u64;
            }
        }
        (prod >> 64) as u64 + 1
    }

    /// Standard exponential draw, `-ln u`.
    #[inline]
    pub fn next_exp(&mut self) -> f64 {
        -self.next_uniform().ln()
    }

    /// Gamma(shape, 1) draw for integer `shape >= 1`.
    pub fn next_gamma(&mut self, shape: u64) -> Result<f64> {
        if shape == 0 {
            return Err(invalid("gamma shape must be >= 1"));
        }
        Ok(self.next_gamma_unchecked(shape))
    }

    pub(crate) fn next_gamma_unchecked(&mut self, shape: u64) -> f64 {
        if shape <= GAMMA_SUM_LIMIT {
            return (0..shape).map(|_| self.next_exp()).sum();
        }
        // Marsaglia & Tsang (2000), valid for shape >= 1.
        let d = shape as f64 - 1.0 / 3.0;
        let c = 1.0 / (9.0 * d).sqrt();
        loop {
            let x = self.next_normal();
            let t = 1.0 + c * x;
            if t <= 0.0 {
                continue;
            }
            let v = t * t * t;
            let u = self.next_uniform();
            let x2 = x * x;
            if u < 1.0 - 0.0331 * x2 * x2 || u.ln() < 0.5 * x2 + d * (1.0 - v + v.ln()) {
                return d * v;
            }
        }
    }

    /// Standard normal via Box-Muller, cosine branch only.
    fn next_normal(&mut self) -> f64 {
        let r = (-2.0 * self.next_uniform().ln()).sqrt();
        let theta = std::f64::consts::TAU * self.next_uniform();
        r * theta.cos()
    }
}
