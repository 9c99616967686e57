//! Goodness-of-fit helpers: chi-square, two-sample Kolmogorov-Smirnov and
//! Wilson binomial intervals.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Pearson statistic `Σ (O − E)² / E` over categories with `E > 0`.
pub fn chi_square_statistic(observed: &[u64], expected: &[f64]) -> f64 {
    observed
        .iter()
        .zip(expected)
        .filter(|(_, &e)| e > 0.0)
        .map(|(&o, &e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum()
}

/// Upper tail `P(χ²_df ≥ stat)`.
pub fn chi_square_p_value(stat: f64, df: usize) -> f64 {
    let dist = ChiSquared::new(df as f64).expect("df > 0");
    dist.sf(stat).clamp(0.0, 1.0)
}

/// Supremum distance between the empirical CDFs of two sorted samples.
pub fn ks_statistic(a: &[f64], b: &[f64]) -> f64 {
    debug_assert!(a.windows(2).all(|w| w[0] <= w[1]) && b.windows(2).all(|w| w[0] <= w[1]));
    let (n, m) = (a.len() as f64, b.len() as f64);
    if a.is_empty() || b.is_empty() {
        return if a.len() == b.len() { 0.0 } else { 1.0 };
    }
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / n - j as f64 / m).abs());
    }
    d
}

/// Kolmogorov tail `Q(λ) = 2 Σ_{k≥1} (−1)^{k−1} e^{−2k²λ²}`.
pub fn kolmogorov_q(lambda: f64) -> f64 {
    if lambda < 0.2 {
        return 1.0;
    }
    let mut sum = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = sign * (-2.0 * kf * kf * lambda * lambda).exp();
        sum += term;
        if term.abs() < 1e-300 || term.abs() <= 1e-16 * sum.abs() {
            break;
        }
        sign = -sign;
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

/// Asymptotic two-sample p-value with the small-sample correction
/// `λ = (√nₑ + 0.12 + 0.11/√nₑ)·D`, `nₑ = nm/(n+m)`.
pub fn ks_p_value(d: f64, n: usize, m: usize) -> f64 {
    if n == 0 || m == 0 {
        return 1.0;
    }
    let en = ((n * m) as f64 / (n + m) as f64).sqrt();
    kolmogorov_q((en + 0.12 + 0.11 / en) * d)
}

/// Wilson score interval for `k` successes in `n` trials at level `1 − alpha`.
pub fn wilson_interval(k: u64, n: u64, alpha: f64) -> (f64, f64) {
    let nf = n as f64;
    let p = k as f64 / nf;
    let z = Normal::new(0.0, 1.0).expect("standard normal").inverse_cdf(1.0 - 0.5 * alpha);
    let z2 = z * z;
    let denom = 1.0 + z2 / nf;
    let center = (p + z2 / (2.0 * nf)) / denom;
    let half = z / denom * (p * (1.0 - p) / nf + z2 / (4.0 * nf * nf)).sqrt();
    ((center - half).max(0.0), (center + half).min(1.0))
}
