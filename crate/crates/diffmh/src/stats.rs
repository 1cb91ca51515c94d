//! Statistical test helpers used by the verification suites.

use statrs::distribution::{ChiSquared, ContinuousCDF, Normal};

/// Standard normal CDF.
pub fn normal_cdf(x: f64) -> f64 {
    Normal::standard().cdf(x)
}

/// Upper-tail p-value of a chi-squared statistic.
pub fn chi_squared_p_value(stat: f64, dof: f64) -> f64 {
    1.0 - ChiSquared::new(dof).unwrap().cdf(stat)
}

/// Chi-squared goodness-of-fit p-value for observed counts against expected
/// probabilities. `probs` must sum to 1.
pub fn chi_squared_gof(counts: &[u64], probs: &[f64]) -> f64 {
    assert_eq!(counts.len(), probs.len());
    let n: u64 = counts.iter().sum();
    let mut stat = 0.0;
    let mut dof = 0.0;
    for (&c, &p) in counts.iter().zip(probs) {
        if p == 0.0 {
            assert_eq!(c, 0, "observed count in zero-probability cell");
            continue;
        }
        let expected = n as f64 * p;
        stat += (c as f64 - expected).powi(2) / expected;
        dof += 1.0;
    }
    chi_squared_p_value(stat, dof - 1.0)
}

/// One-sample Kolmogorov-Smirnov statistic of `samples` against the CDF `f`.
pub fn ks_statistic(samples: &mut [f64], f: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = samples.len() as f64;
    let mut d = 0.0f64;
    for (i, &x) in samples.iter().enumerate() {
        let cdf = f(x);
        let lo = i as f64 / n;
        let hi = (i + 1) as f64 / n;
        d = d.max((cdf - lo).abs()).max((hi - cdf).abs());
    }
    d
}

/// Asymptotic Kolmogorov-Smirnov p-value (Stephens' approximation).
pub fn ks_p_value(d: f64, n: usize) -> f64 {
    let sqrt_n = (n as f64).sqrt();
    let lambda = (sqrt_n + 0.12 + 0.11 / sqrt_n) * d;
    let mut p = 0.0;
    let mut sign = 1.0;
    for k in 1..=100 {
        let term = (-2.0 * (k as f64 * lambda).powi(2)).exp();
        p += sign * term;
        sign = -sign;
        if term < 1e-12 {
            break;
        }
    }
    (2.0 * p).clamp(0.0, 1.0)
}

/// Convenience: KS test of samples against a distribution CDF.
pub fn ks_test(samples: &mut [f64], f: impl Fn(f64) -> f64) -> f64 {
    let n = samples.len();
    let d = ks_statistic(samples, f);
    ks_p_value(d, n)
}

/// Sample mean and variance (unbiased).
pub fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, var)
}
