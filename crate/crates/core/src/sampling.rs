//! Shared inverse-CDF samplers.
//!
//! Both simulation engines draw geometric and categorical variates through
//! these two functions, one uniform per variate, so replicate streams stay
//! reproducible across platforms.

use rand::Rng;

/// Geometric on `{0,1,2,...}` with `P(N = k) = m^k / (1+m)^(k+1)`.
#[inline]
pub fn geometric<R: Rng + ?Sized>(rng: &mut R, m: f64) -> u64 {
    debug_assert!(m > 0.0);
    let q = m / (1.0 + m);
    // P(N >= k) = q^k, so N = floor(ln u / ln q) for u uniform on (0,1].
    let u = 1.0 - rng.gen::<f64>();
    let n = (u.ln() / q.ln()).floor();
    if n >= u64::MAX as f64 {
        u64::MAX
    } else {
        n as u64
    }
}

/// Index draw from a weight vector summing to ~1; trailing slack goes to the
/// last positive weight.
#[inline]
pub fn categorical<R: Rng + ?Sized>(rng: &mut R, weights: &[f64]) -> usize {
    let u = rng.gen::<f64>();
    let mut acc = 0.0;
    let mut last_positive = 0;
    for (i, &w) in weights.iter().enumerate() {
        if w > 0.0 {
            last_positive = i;
        }
        acc += w;
        if u < acc {
            return i;
        }
    }
    last_positive
}

/// Life length with tail probabilities `P(L > n) = d(n)`; `d` must be
/// nonincreasing with `d(0) = 1`. Lengths of `cap` or more are truncated to
/// `cap` (callers only observe lives up to their horizon).
#[inline]
pub fn life_length<R: Rng + ?Sized>(rng: &mut R, d: impl Fn(usize) -> f64, cap: usize) -> usize {
    let u = rng.gen::<f64>();
    let mut n = 1;
    while n < cap && u < d(n) {
        n += 1;
    }
    n
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn geometric_mean_matches() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let m = 1.5;
        let n = 200_000;
        let total: u64 = (0..n).map(|_| geometric(&mut rng, m)).sum();
        let mean = total as f64 / n as f64;
        // Var = m(1+m); four standard errors.
        let se = (m * (1.0 + m) / n as f64).sqrt();
        assert!((mean - m).abs() < 4.0 * se, "mean {mean} vs {m}");
    }

    #[test]
    fn categorical_respects_weights() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let w = [0.2, 0.5, 0.3];
        let mut counts = [0u64; 3];
        let n = 100_000;
        for _ in 0..n {
            counts[categorical(&mut rng, &w)] += 1;
        }
        for (c, p) in counts.iter().zip(w) {
            let freq = *c as f64 / n as f64;
            let se = (p * (1.0 - p) / n as f64).sqrt();
            assert!((freq - p).abs() < 4.0 * se);
        }
    }

    #[test]
    fn life_length_geometric_tail() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let d = |n: usize| 0.5f64.powi(n as i32);
        let n = 100_000;
        let survive2 = (0..n)
            .filter(|_| life_length(&mut rng, d, 1000) > 2)
            .count() as f64
            / n as f64;
        let se = (0.25 * 0.75 / n as f64).sqrt();
        assert!((survive2 - 0.25).abs() < 4.0 * se);
    }
}
