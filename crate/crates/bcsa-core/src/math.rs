//! Small numeric helpers shared across the crate: transcendental shims that
//! work in both std and no_std builds, binomial coefficients, and the Wilson
//! score interval.

/// `e^x`, routed through libm when building without std.
#[inline]
pub(crate) fn exp(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.exp()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::exp(x)
    }
}

/// Square root, routed through libm when building without std.
#[inline]
pub(crate) fn sqrt(x: f64) -> f64 {
    #[cfg(feature = "std")]
    {
        x.sqrt()
    }
    #[cfg(not(feature = "std"))]
    {
        libm::sqrt(x)
    }
}

/// `x^n` by repeated multiplication; exponents here are tiny (degree counts
/// and multiplicities), so this stays exact enough and core-compatible.
#[inline]
pub(crate) fn powi(x: f64, n: u32) -> f64 {
    let mut acc = 1.0;
    for _ in 0..n {
        acc *= x;
    }
    acc
}

/// Factorial as f64; callers only need small arguments (set sizes <= 4,
/// degrees <= a few dozen), well inside exact f64 integer range.
#[inline]
pub(crate) fn factorial(n: u32) -> f64 {
    let mut acc = 1.0;
    for i in 2..=n as u64 {
        acc *= i as f64;
    }
    acc
}

/// Binomial coefficient C(n, k) as f64, computed as a product of ratios so
/// intermediate values stay near the final magnitude. Relative error is a
/// few ULPs per factor, which keeps distribution-level identities accurate
/// to ~1e-13 even at n = 10^4.
///
/// Earlier drafts used log-space factorials here; direct ratio products turn
/// out both overflow-free for every size this crate touches (k stays small)
/// and two orders of magnitude more accurate, which the distribution
/// identities need.
pub(crate) fn binom(n: u64, k: u64) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0;
    for i in 0..k {
        acc *= (n - i) as f64;
        acc /= (i + 1) as f64;
    }
    acc
}

/// The hypergeometric-style ratio `C(n-k, d) * C(k, l-d) / C(n, l)`:
/// the probability that a uniformly random l-subset of n slots has exactly
/// d elements outside a fixed k-subset. Evaluated as
/// `C(l, d) * falling(n-k, d) * falling(k, l-d) / falling(n, l)` with the
/// division interleaved so magnitudes stay bounded.
pub(crate) fn subset_overlap_prob(n: u64, k: u64, l: u64, d: u64) -> f64 {
    if d > l || d > n - k || (l - d) > k {
        return 0.0;
    }
    let mut acc = binom(l, d);
    // `falling(n, l)` has exactly l factors; fold the d factors of
    // `falling(n-k, d)` and the l-d factors of `falling(k, l-d)` into the
    // same loop, one numerator factor per denominator factor.
    for i in 0..l {
        if i < d {
            acc *= (n - k - i) as f64;
        } else {
            acc *= (k - (i - d)) as f64;
        }
        acc /= (n - i) as f64;
    }
    acc
}

/// Wilson score interval at 95% confidence for `successes` out of `total`
/// Bernoulli observations. Returns (low, high); degenerates to (0, 1) bounds
/// gracefully when `total` is 0.
pub(crate) fn wilson_ci95(successes: u64, total: u64) -> (f64, f64) {
    const Z: f64 = 1.959963984540054;
    if total == 0 {
        return (0.0, 1.0);
    }
    let n = total as f64;
    let p = successes as f64 / n;
    let z2 = Z * Z;
    let denom = 1.0 + z2 / n;
    let center = p + z2 / (2.0 * n);
    let half = Z * sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
    let lo = (center - half) / denom;
    let hi = (center + half) / denom;
    (lo.max(0.0), hi.min(1.0))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binom_small_values() {
        assert_eq!(binom(0, 0), 1.0);
        assert_eq!(binom(5, 0), 1.0);
        assert_eq!(binom(5, 5), 1.0);
        assert_eq!(binom(5, 2), 10.0);
        assert_eq!(binom(4, 2), 6.0);
        assert_eq!(binom(3, 7), 0.0);
        assert_eq!(binom(172, 3), 833_340.0);
    }

    #[test]
    fn binom_large_args_are_finite_and_tight() {
        let v = binom(10_000, 30);
        assert!(v.is_finite() && v > 0.0);
        // Pascal identity as an accuracy probe at large n.
        let lhs = binom(10_000, 30);
        let rhs = binom(9_999, 30) + binom(9_999, 29);
        assert!((lhs - rhs).abs() / lhs < 1e-12, "lhs={lhs} rhs={rhs}");
    }

    #[test]
    fn overlap_prob_matches_direct_binomials() {
        // n=10, k=4, l=3: compare against the direct formula.
        for d in 0..=3u64 {
            let direct = binom(6, d) * binom(4, 3 - d) / binom(10, 3);
            let fast = subset_overlap_prob(10, 4, 3, d);
            assert!((direct - fast).abs() < 1e-15, "d={d}: {direct} vs {fast}");
        }
    }

    #[test]
    fn overlap_prob_sums_to_one() {
        // Vandermonde: summing over d must give exactly 1.
        for &(n, k, l) in &[(172u64, 8u64, 3u64), (315, 8, 8), (10_000, 8, 30), (500, 250, 30)] {
            let total: f64 = (0..=l).map(|d| subset_overlap_prob(n, k, l, d)).sum();
            assert!((total - 1.0).abs() < 1e-13, "n={n} k={k} l={l}: {total}");
        }
    }

    #[test]
    fn wilson_contains_point_estimate() {
        let (lo, hi) = wilson_ci95(7, 1000);
        let p = 7.0 / 1000.0;
        assert!(lo < p && p < hi);
        assert!(lo > 0.0 && hi < 1.0);
        // Zero successes: the lower bound is analytically zero but the
        // center-minus-halfwidth cancellation leaves rounding dust.
        let (lo0, hi0) = wilson_ci95(0, 100);
        assert!((0.0..1e-15).contains(&lo0), "lo0={lo0}");
        assert!(hi0 > 0.0 && hi0 < 0.1);
    }
}
