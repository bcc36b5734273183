//! Fixed-order summation.
//!
//! Partial sums produced by parallel workers are stored by index and reduced
//! with a balanced binary tree whose shape depends only on the slice length,
//! so the result is independent of how the work was scheduled.

use crate::math;

const LEAF: usize = 8;

/// Pairwise (tree) sum of `xs`. Leaves of up to eight elements are summed
/// left to right; larger slices split at the midpoint.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= LEAF {
        return xs.iter().fold(0.0, |acc, &x| acc + x);
    }
    let (lo, hi) = xs.split_at(xs.len() / 2);
    pairwise_sum(lo) + pairwise_sum(hi)
}

/// Sample mean and standard error of the mean (sample standard deviation
/// over `√n`). The standard error is NaN when fewer than two values are given.
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = pairwise_sum(xs) / n as f64;
    if n < 2 {
        return (mean, f64::NAN);
    }
    let mut dev = alloc::vec::Vec::with_capacity(n);
    dev.extend(xs.iter().map(|&x| (x - mean) * (x - mean)));
    let var = pairwise_sum(&dev) / (n - 1) as f64;
    (mean, math::sqrt(var / n as f64))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;

    #[test]
    fn small_slices_sum_in_order() {
        assert_eq!(pairwise_sum(&[]), 0.0);
        assert_eq!(pairwise_sum(&[1.5]), 1.5);
        assert_eq!(pairwise_sum(&[1.0, 2.0, 3.0]), 6.0);
    }

    #[test]
    fn pairwise_beats_naive_on_cancellation() {
        // 1 followed by many tiny values: naive left-to-right loses them all.
        let mut xs = Vec::from([1.0]);
        xs.extend(core::iter::repeat_n(1e-16, 1 << 16));
        let naive: f64 = xs.iter().sum();
        let tree = pairwise_sum(&xs);
        let exact = 1.0 + 65536.0 * 1e-16;
        assert!((tree - exact).abs() < (naive - exact).abs());
        assert!((tree - exact).abs() < 1e-15);
    }

    #[test]
    fn mean_stderr_matches_hand_values() {
        let (m, s) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert_eq!(m, 2.5);
        // sample variance 5/3, stderr sqrt(5/12)
        assert!((s - (5.0f64 / 12.0).sqrt()).abs() < 1e-15);
        let (m, s) = mean_stderr(&[7.0]);
        assert_eq!(m, 7.0);
        assert!(s.is_nan());
    }
}
