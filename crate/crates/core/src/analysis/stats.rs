//! Small statistical helpers for the Monte Carlo checks.

use serde::Serialize;
use statrs::distribution::{ChiSquared, ContinuousCDF, Discrete, Normal, Poisson};

use crate::error::{invalid, Result};

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct Moments {
    pub n: usize,
    pub mean: f64,
    /// Unbiased sample variance.
    pub variance: f64,
    pub skewness: f64,
    pub excess_kurtosis: f64,
}

pub fn moments(xs: &[f64]) -> Moments {
    let n = xs.len();
    let nf = n as f64;
    let mean = xs.iter().sum::<f64>() / nf;
    let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
    for &x in xs {
        let d = x - mean;
        m2 += d * d;
        m3 += d * d * d;
        m4 += d * d * d * d;
    }
    let (m2, m3, m4) = (m2 / nf, m3 / nf, m4 / nf);
    let variance = if n > 1 { m2 * nf / (nf - 1.0) } else { 0.0 };
    let (skewness, excess_kurtosis) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    Moments { n, mean, variance, skewness, excess_kurtosis }
}

/// Standard error of a Bernoulli frequency with success probability `p`.
pub fn binomial_sigma(p: f64, n: usize) -> f64 {
    (p * (1.0 - p) / n as f64).sqrt()
}

/// Asymptotic Kolmogorov survival function `P(K > lambda)`.
pub fn kolmogorov_survival(lambda: f64) -> f64 {
    if lambda < 1e-3 {
        return 1.0;
    }
    let mut sum = 0.0;
    for k in 1..=100 {
        let kf = k as f64;
        let term = (-2.0 * kf * kf * lambda * lambda).exp();
        sum += if k % 2 == 1 { term } else { -term };
        if term < 1e-16 {
            break;
        }
    }
    (2.0 * sum).clamp(0.0, 1.0)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct KsResult {
    pub statistic: f64,
    pub p_value: f64,
}

/// One-sample Kolmogorov-Smirnov test against a continuous CDF, with the
/// small-sample correction `(sqrt(n) + 0.12 + 0.11 / sqrt(n)) D`.
pub fn ks_test(xs: &[f64], cdf: impl Fn(f64) -> f64) -> Result<KsResult> {
    if xs.is_empty() {
        return Err(invalid("samples", "KS test needs at least one sample"));
    }
    let mut sorted = xs.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (k, &x) in sorted.iter().enumerate() {
        let f = cdf(x);
        d = d.max(f - k as f64 / n).max((k + 1) as f64 / n - f);
    }
    let sn = n.sqrt();
    Ok(KsResult { statistic: d, p_value: kolmogorov_survival((sn + 0.12 + 0.11 / sn) * d) })
}

/// KS test against `N(mean, sd^2)`.
pub fn ks_normal(xs: &[f64], mean: f64, sd: f64) -> Result<KsResult> {
    let normal = Normal::new(mean, sd).map_err(|e| invalid("sd", e.to_string()))?;
    ks_test(xs, |x| normal.cdf(x))
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub dof: usize,
    pub p_value: f64,
    /// Bins after pooling, as `(observed, expected)`.
    pub bins: Vec<(u64, f64)>,
}

/// Merges adjacent bins left to right until each expected count reaches
/// `min_expected`; a short remainder joins the last bin.
fn pool(observed: &[u64], expected: &[f64], min_expected: f64) -> Vec<(u64, f64)> {
    let mut bins: Vec<(u64, f64)> = Vec::new();
    let mut acc = (0u64, 0.0);
    for (&o, &e) in observed.iter().zip(expected) {
        acc.0 += o;
        acc.1 += e;
        if acc.1 >= min_expected {
            bins.push(acc);
            acc = (0, 0.0);
        }
    }
    if acc.1 > 0.0 || acc.0 > 0 {
        match bins.last_mut() {
            Some(last) => {
                last.0 += acc.0;
                last.1 += acc.1;
            }
            None => bins.push(acc),
        }
    }
    bins
}

/// Pearson goodness of fit of integer counts to `Poisson(mean)`.
pub fn chi_square_poisson(counts: &[u64], mean: f64) -> Result<ChiSquareResult> {
    let poisson = Poisson::new(mean).map_err(|e| invalid("mean", e.to_string()))?;
    let n = counts.len() as u64;
    let max = counts.iter().copied().max().unwrap_or(0).max(1) as usize;
    let mut observed = vec![0u64; max + 2];
    for &c in counts {
        observed[c as usize] += 1;
    }
    let mut expected: Vec<f64> = (0..=max).map(|k| n as f64 * poisson.pmf(k as u64)).collect();
    let covered: f64 = expected.iter().sum();
    expected.push((n as f64 - covered).max(0.0));
    chi_square(&observed, &expected, 0)
}

/// Pearson statistic over pooled bins; `fitted` parameters reduce the dof.
pub fn chi_square(observed: &[u64], expected: &[f64], fitted: usize) -> Result<ChiSquareResult> {
    if observed.len() != expected.len() {
        return Err(invalid("bins", "observed and expected lengths differ"));
    }
    let bins = pool(observed, expected, 5.0);
    if bins.len() < 2 + fitted {
        return Err(invalid("bins", "too few bins with expected count >= 5"));
    }
    let statistic = bins
        .iter()
        .map(|&(o, e)| {
            let d = o as f64 - e;
            d * d / e
        })
        .sum();
    let dof = bins.len() - 1 - fitted;
    Ok(ChiSquareResult { statistic, dof, p_value: chi_square_sf(statistic, dof)?, bins })
}

pub fn chi_square_sf(statistic: f64, dof: usize) -> Result<f64> {
    let chi = ChiSquared::new(dof as f64).map_err(|e| invalid("dof", e.to_string()))?;
    Ok(1.0 - chi.cdf(statistic))
}

/// Mean with a batch-means standard error over `batches` equal batches.
pub fn batch_means(xs: &[f64], batches: usize) -> Result<(f64, f64)> {
    if batches < 2 || xs.len() < batches {
        return Err(invalid("batches", "need at least two batches of one value each"));
    }
    let size = xs.len() / batches;
    let means: Vec<f64> = (0..batches)
        .map(|b| xs[b * size..(b + 1) * size].iter().sum::<f64>() / size as f64)
        .collect();
    let m = moments(&means);
    Ok((m.mean, (m.variance / batches as f64).sqrt()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn kolmogorov_reference_points() {
        // P(K > 1.36) ~ 0.049, P(K > 1.63) ~ 0.010
        assert_abs_diff_eq!(kolmogorov_survival(1.358), 0.05, epsilon = 1e-3);
        assert_abs_diff_eq!(kolmogorov_survival(1.628), 0.01, epsilon = 5e-4);
        assert_eq!(kolmogorov_survival(0.0), 1.0);
    }

    #[test]
    fn ks_on_uniform_grid() {
        let xs: Vec<f64> = (0..1000).map(|k| (k as f64 + 0.5) / 1000.0).collect();
        let r = ks_test(&xs, |x| x.clamp(0.0, 1.0)).unwrap();
        assert!(r.statistic <= 5e-4 + 1e-12);
        assert!(r.p_value > 0.99);
        let r = ks_test(&xs, |x| (x * x).clamp(0.0, 1.0)).unwrap();
        assert!(r.p_value < 1e-6);
    }

    #[test]
    fn moments_of_symmetric_sample() {
        let m = moments(&[-1.0, 0.0, 1.0]);
        assert_abs_diff_eq!(m.mean, 0.0);
        assert_abs_diff_eq!(m.variance, 1.0);
        assert_abs_diff_eq!(m.skewness, 0.0);
    }

    #[test]
    fn chi_square_exact_fit() {
        let mean: f64 = 1.0;
        let n = 10_000u64;
        let poisson = Poisson::new(mean).unwrap();
        let mut counts = Vec::new();
        for k in 0..8u64 {
            let c = (n as f64 * poisson.pmf(k)).round() as u64;
            counts.extend(std::iter::repeat_n(k, c as usize));
        }
        let r = chi_square_poisson(&counts, mean).unwrap();
        assert!(r.p_value > 0.9, "{r:?}");
        assert!(chi_square_poisson(&counts, 2.0).unwrap().p_value < 1e-6);
    }
}
