//! Deterministic random number streams for Monte Carlo simulation.
//!
//! Every stochastic component of the engine draws from a ChaCha stream keyed
//! by a root seed plus a stream index (one stream per path, per tree, per
//! sweep point, ...). A unit of work only ever touches its own stream, so
//! results are bit-identical regardless of how the work is scheduled across
//! threads.
//!
//! Normal variates are produced by inverse-CDF transform of a uniform draw,
//! which keeps the mapping from stream position to variate stable.

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use statrs::distribution::{ContinuousCDF, Normal};

/// SplitMix64 finalizer; used to derive independent sub-seeds from a root
/// seed and an index without correlated low bits.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_mul(0x9e37_79b9_7f4a_7c15);
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// ChaCha stream `stream` under root seed `seed`. Streams are independent;
/// a path (or tree) indexed by `stream` sees the same draws no matter how
/// many other streams are consumed concurrently.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

/// Uniform draw in the open interval (0, 1); never returns 0 or 1 so the
/// inverse normal CDF stays finite.
#[inline]
pub fn uniform_open01(rng: &mut impl RngCore) -> f64 {
    ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / (1u64 << 53) as f64)
}

/// Standard normal draw via inverse-CDF transform.
#[inline]
pub fn standard_normal(rng: &mut impl RngCore) -> f64 {
    inverse_normal_cdf(uniform_open01(rng))
}

/// Quantile of the standard normal distribution.
#[inline]
pub fn inverse_normal_cdf(u: f64) -> f64 {
    debug_assert!(u > 0.0 && u < 1.0);
    Normal::standard().inverse_cdf(u)
}
