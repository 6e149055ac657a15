//! Small numeric helpers shared across the crate.

/// Pairwise (cascade) summation. Order of additions depends only on the
/// slice layout, so reductions over per-path buffers stay bit-identical
/// under any degree of parallelism upstream.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 32 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

/// Arithmetic mean via pairwise summation.
pub fn pairwise_mean(xs: &[f64]) -> f64 {
    assert!(!xs.is_empty(), "mean of empty slice");
    pairwise_sum(xs) / xs.len() as f64
}

/// Sample mean and standard error (sample std dev / sqrt(n)).
pub fn mean_and_std_error(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    let mean = pairwise_mean(xs);
    if n < 2 {
        return (mean, 0.0);
    }
    let sq: Vec<f64> = xs.iter().map(|&x| (x - mean) * (x - mean)).collect();
    let var = pairwise_sum(&sq) / (n - 1) as f64;
    (mean, (var / n as f64).sqrt())
}
