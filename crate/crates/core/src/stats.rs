//! Small statistical and special-function helpers shared across modules.

/// Standard normal CDF via erfc, accurate in both tails.
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

/// Standard normal upper tail P(Z > x).
pub fn normal_sf(x: f64) -> f64 {
    0.5 * libm::erfc(x / std::f64::consts::SQRT_2)
}

/// Standard normal density.
pub fn normal_pdf(x: f64) -> f64 {
    (-0.5 * x * x).exp() / (2.0 * std::f64::consts::PI).sqrt()
}

/// Sample mean.
pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance.
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m) * (x - m)).sum::<f64>() / (xs.len() - 1) as f64
}

/// Sample mean together with its standard error, sd / sqrt(n).
pub fn mean_and_se(xs: &[f64]) -> (f64, f64) {
    let m = mean(xs);
    let se = (variance(xs) / xs.len().max(1) as f64).sqrt();
    (m, se)
}

/// Root mean square.
pub fn rms(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return 0.0;
    }
    (xs.iter().map(|x| x * x).sum::<f64>() / xs.len() as f64).sqrt()
}

/// Standard error of a Bernoulli proportion estimate.
pub fn proportion_se(p_hat: f64, n: usize) -> f64 {
    (p_hat * (1.0 - p_hat) / n.max(1) as f64).sqrt()
}

/// 2^{j/2} with the irrational factor sqrt(2) applied exactly once, so
/// that products of these values scale by exact powers of two. Used by the
/// Haar/Schauder module, where tent peak heights must reproduce
/// 2^{-(n+1)/2} bit for bit.
pub fn pow2_half(j: i32) -> f64 {
    if j.rem_euclid(2) == 0 {
        ((j / 2) as f64).exp2()
    } else {
        std::f64::consts::SQRT_2 * (((j - 1) / 2) as f64).exp2()
    }
}
