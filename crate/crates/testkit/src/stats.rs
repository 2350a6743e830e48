//! Frequency checks for seeded samplers.

/// Pearson's statistic for observed counts against expected counts.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> f64 {
    observed.iter().zip(expected).map(|(&o, &e)| (o as f64 - e).powi(2) / e).sum()
}

/// Upper critical value of the chi-square distribution with `dof` degrees of
/// freedom at standard-normal quantile `z` (Wilson-Hilferty).
pub fn chi_square_critical(dof: usize, z: f64) -> f64 {
    let k = dof as f64;
    let a = 2.0 / (9.0 * k);
    k * (1.0 - a + z * a.sqrt()).powi(3)
}

/// Indices of bins whose count deviates from `n * p` by more than `sigmas`
/// binomial standard deviations.
pub fn outlier_bins(observed: &[u64], p: &[f64], sigmas: f64) -> Vec<usize> {
    let n: u64 = observed.iter().sum();
    observed
        .iter()
        .zip(p)
        .enumerate()
        .filter(|(_, (&o, &pi))| {
            let mean = n as f64 * pi;
            let sd = (n as f64 * pi * (1.0 - pi)).sqrt();
            (o as f64 - mean).abs() > sigmas * sd
        })
        .map(|(i, _)| i)
        .collect()
}
