//! Summary statistics and the Kolmogorov-Smirnov distance.

use statrs::distribution::{ContinuousCDF, Normal};

/// Mean and unbiased sample variance; variance is 0 for fewer than two values.
pub fn mean_variance(values: &[f64]) -> (f64, f64) {
    let n = values.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = values.iter().sum::<f64>() / n as f64;
    if n < 2 {
        return (mean, 0.0);
    }
    let ss: f64 = values.iter().map(|v| (v - mean).powi(2)).sum();
    (mean, ss / (n - 1) as f64)
}

/// Standard error of the mean.
pub fn std_error(values: &[f64]) -> f64 {
    let (_, var) = mean_variance(values);
    (var / values.len() as f64).sqrt()
}

/// `sup_x |F_n(x) - F(x)|` for the empirical CDF of `samples`.
pub fn ks_distance<F: Fn(f64) -> f64>(samples: &[f64], cdf: F) -> f64 {
    let mut sorted = samples.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// KS distance of `samples` to `Normal(0, variance)`.
pub fn ks_distance_normal(samples: &[f64], variance: f64) -> f64 {
    let normal = Normal::new(0.0, variance.sqrt()).expect("positive variance");
    ks_distance(samples, |x| normal.cdf(x))
}

/// Asymptotic one-sample KS critical value at level 0.01.
pub fn ks_critical_001(samples: usize) -> f64 {
    1.63 / (samples as f64).sqrt()
}
