//! Seeded, random-access source of the i.i.d. uniforms `X_k`.
//!
//! The value at index `k` is `splitmix64(seed + k·γ)` mapped to the open
//! unit interval, so any `X_k` can be read without generating a prefix. The
//! mapping keeps the top 52 bits and centres them in their cell:
//! `((z >> 12) + 0.5) / 2^52`, which never yields 0 or 1.

use serde::{Deserialize, Serialize};

const GOLDEN_GAMMA: u64 = 0x9e37_79b9_7f4a_7c15;

/// Stable name of the algorithm behind [`RandomStream`].
pub const ALGORITHM_ID: &str = "splitmix64-index-hash/v1";

/// SplitMix64 output function (Steele, Lea, Flood 2014).
#[inline]
pub fn splitmix64(mut z: u64) -> u64 {
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

#[inline]
fn to_open_unit(z: u64) -> f64 {
    ((z >> 12) as f64 + 0.5) * (1.0 / (1u64 << 52) as f64)
}

/// Anything that can play the role of the sequence `X_1, X_2, …`.
///
/// Real runs use [`RandomStream`]; tests substitute deterministic doubles
/// such as [`ConstantStream`] or a closure via [`FnStream`].
pub trait UniformSource: Sync {
    /// `X_k` for `k ≥ 1`.
    fn value(&self, k: u64) -> f64;
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RandomStream {
    seed: u64,
}

impl RandomStream {
    pub fn new(seed: u64) -> Self {
        Self { seed }
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn algorithm(&self) -> &'static str {
        ALGORITHM_ID
    }

    /// Independent child stream, e.g. one per Monte Carlo trial.
    pub fn substream(&self, index: u64) -> RandomStream {
        let salt = splitmix64(index.wrapping_mul(GOLDEN_GAMMA) ^ 0x5851_f42d_4c95_7f2d);
        RandomStream::new(splitmix64(self.seed ^ salt))
    }

    /// Raw 64-bit word at index `k`.
    pub fn word(&self, k: u64) -> u64 {
        splitmix64(self.seed.wrapping_add(k.wrapping_mul(GOLDEN_GAMMA)))
    }
}

impl UniformSource for RandomStream {
    #[inline]
    fn value(&self, k: u64) -> f64 {
        to_open_unit(self.word(k))
    }
}

/// Sequential cursor over a [`RandomStream`], for algorithms that just need
/// "the next random number".
#[derive(Debug, Clone)]
pub struct Draws {
    stream: RandomStream,
    next: u64,
}

impl Draws {
    pub fn new(seed: u64) -> Self {
        Self { stream: RandomStream::new(seed), next: 1 }
    }

    pub fn next_u64(&mut self) -> u64 {
        let w = self.stream.word(self.next);
        self.next += 1;
        w
    }

    pub fn next_f64(&mut self) -> f64 {
        to_open_unit(self.next_u64())
    }

    /// Uniform integer in `0..bound` (multiply-high reduction).
    pub fn below(&mut self, bound: u64) -> u64 {
        ((self.next_u64() as u128 * bound as u128) >> 64) as u64
    }
}

/// Test double returning the same value at every index.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ConstantStream(pub f64);

impl UniformSource for ConstantStream {
    fn value(&self, _k: u64) -> f64 {
        self.0
    }
}

/// Test double backed by a closure of the index.
pub struct FnStream<F>(pub F);

impl<F: Fn(u64) -> f64 + Sync> UniformSource for FnStream<F> {
    fn value(&self, k: u64) -> f64 {
        (self.0)(k)
    }
}

impl<S: UniformSource + ?Sized> UniformSource for &S {
    fn value(&self, k: u64) -> f64 {
        (**self).value(k)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn same_seed_and_index_agree_bitwise() {
        let s = RandomStream::new(0xdead_beef);
        for k in [1, 2, 17, 1 << 40, u64::MAX] {
            assert_eq!(s.value(k).to_bits(), s.value(k).to_bits());
            assert_eq!(
                s.value(k).to_bits(),
                RandomStream::new(0xdead_beef).value(k).to_bits()
            );
        }
    }

    #[test]
    fn extreme_words_stay_inside_open_interval() {
        assert!(to_open_unit(0) > 0.0);
        assert!(to_open_unit(u64::MAX) < 1.0);
    }

    #[test]
    fn different_seeds_differ() {
        let a = RandomStream::new(1);
        let b = RandomStream::new(2);
        assert!((1..100).any(|k| a.value(k) != b.value(k)));
    }

    #[test]
    fn substreams_are_distinct_from_parent() {
        let s = RandomStream::new(42);
        assert_ne!(s.substream(0).seed(), s.seed());
        assert_ne!(s.substream(0).seed(), s.substream(1).seed());
    }

    #[test]
    fn mean_within_four_sigma() {
        let s = RandomStream::new(7);
        let n = 1_000_000u64;
        let mean: f64 = (1..=n).map(|k| s.value(k)).sum::<f64>() / n as f64;
        let sigma = 1.0 / (12.0 * n as f64).sqrt();
        assert!((mean - 0.5).abs() < 4.0 * sigma, "mean {mean}");
    }

    #[test]
    fn kolmogorov_smirnov_below_one_percent_critical_value() {
        let s = RandomStream::new(11);
        let n = 1_000_000usize;
        let mut xs: Vec<f64> = (1..=n as u64).map(|k| s.value(k)).collect();
        xs.sort_by(f64::total_cmp);
        let d = xs
            .iter()
            .enumerate()
            .map(|(i, &x)| {
                let lo = x - i as f64 / n as f64;
                let hi = (i + 1) as f64 / n as f64 - x;
                lo.max(hi)
            })
            .fold(0.0, f64::max);
        // asymptotic 1% critical value of the one-sample KS statistic
        let critical = 1.628 / (n as f64).sqrt();
        assert!(d < critical, "D = {d}, critical = {critical}");
    }
}
