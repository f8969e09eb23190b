//! Small statistics toolkit: summary statistics for benchmark timings and the
//! goodness-of-fit tests used to validate sketch distributions.

use statrs::distribution::{ChiSquared, ContinuousCDF};

pub fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Unbiased sample variance (n - 1 denominator).
pub fn variance(xs: &[f64]) -> f64 {
    if xs.len() < 2 {
        return 0.0;
    }
    let m = mean(xs);
    xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (xs.len() - 1) as f64
}

pub fn stddev(xs: &[f64]) -> f64 {
    variance(xs).sqrt()
}

pub fn median(xs: &[f64]) -> f64 {
    let mut v = xs.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len();
    if n == 0 {
        f64::NAN
    } else if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}

/// `H_k = Σ_{m=1..k} 1/m`.
pub fn harmonic(k: u64) -> f64 {
    (1..=k).rev().map(|m| 1.0 / m as f64).sum()
}

/// `Σ_{m=1..k} 1/m²`.
pub fn harmonic2(k: u64) -> f64 {
    (1..=k).rev().map(|m| 1.0 / (m as f64 * m as f64)).sum()
}

/// Kolmogorov-Smirnov statistic of `samples` against a continuous CDF.
pub fn ks_statistic(samples: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut v = samples.to_vec();
    v.sort_by(f64::total_cmp);
    let n = v.len() as f64;
    v.iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Two-sample Kolmogorov-Smirnov statistic.
pub fn ks_two_sample(a: &[f64], b: &[f64]) -> f64 {
    let mut a = a.to_vec();
    let mut b = b.to_vec();
    a.sort_by(f64::total_cmp);
    b.sort_by(f64::total_cmp);
    let (na, nb) = (a.len() as f64, b.len() as f64);
    let (mut i, mut j, mut d) = (0usize, 0usize, 0.0f64);
    while i < a.len() && j < b.len() {
        let x = a[i].min(b[j]);
        while i < a.len() && a[i] <= x {
            i += 1;
        }
        while j < b.len() && b[j] <= x {
            j += 1;
        }
        d = d.max((i as f64 / na - j as f64 / nb).abs());
    }
    d
}

/// Asymptotic Kolmogorov coefficient `c(α) = sqrt(-ln(α/2) / 2)`.
fn kolmogorov_coefficient(alpha: f64) -> f64 {
    (-(alpha / 2.0).ln() / 2.0).sqrt()
}

/// Critical value of the one-sample KS statistic at significance `alpha`.
pub fn ks_critical(n: usize, alpha: f64) -> f64 {
    kolmogorov_coefficient(alpha) / (n as f64).sqrt()
}

/// Critical value of the two-sample KS statistic at significance `alpha`.
pub fn ks_two_sample_critical(n: usize, m: usize, alpha: f64) -> f64 {
    let (n, m) = (n as f64, m as f64);
    kolmogorov_coefficient(alpha) * ((n + m) / (n * m)).sqrt()
}

/// Pearson chi-square statistic and its upper-tail p-value.
pub fn chi_square(observed: &[u64], expected: &[f64]) -> (f64, f64) {
    assert_eq!(observed.len(), expected.len());
    assert!(observed.len() >= 2);
    let stat: f64 = observed
        .iter()
        .zip(expected)
        .map(|(&o, &e)| (o as f64 - e).powi(2) / e)
        .sum();
    let dist = ChiSquared::new((observed.len() - 1) as f64).expect("df >= 1");
    (stat, 1.0 - dist.cdf(stat))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summaries() {
        let xs = [1.0, 2.0, 3.0, 4.0];
        assert_eq!(mean(&xs), 2.5);
        assert_eq!(median(&xs), 2.5);
        assert_eq!(median(&[3.0, 1.0, 2.0]), 2.0);
        assert!((variance(&xs) - 5.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn harmonic_numbers() {
        assert_eq!(harmonic(1), 1.0);
        assert!((harmonic(4) - 25.0 / 12.0).abs() < 1e-15);
        assert!((harmonic(1024) - 7.509_175_672_278_132).abs() < 1e-12);
        assert!(harmonic2(1024) < std::f64::consts::PI.powi(2) / 6.0);
    }

    #[test]
    fn ks_on_grid_is_small() {
        let n = 1000;
        let xs: Vec<f64> = (0..n).map(|i| (i as f64 + 0.5) / n as f64).collect();
        let d = ks_statistic(&xs, |x| x);
        assert!((d - 0.5 / n as f64).abs() < 1e-12);
        assert!(ks_two_sample(&xs, &xs) == 0.0);
        let shifted: Vec<f64> = xs.iter().map(|x| x + 0.5).collect();
        assert!((ks_two_sample(&xs, &shifted) - 0.5).abs() <= 2.0 / n as f64);
    }

    #[test]
    fn critical_values() {
        assert!((ks_critical(1, 0.001) - 1.9495).abs() < 1e-3);
        assert!((ks_two_sample_critical(100, 100, 0.05) - 1.3581 * 0.02f64.sqrt()).abs() < 1e-3);
    }

    #[test]
    fn chi_square_uniform() {
        let (stat, p) = chi_square(&[25, 25, 25, 25], &[25.0; 4]);
        assert_eq!(stat, 0.0);
        assert!((p - 1.0).abs() < 1e-12);
        let (_, p) = chi_square(&[100, 0], &[50.0, 50.0]);
        assert!(p < 1e-10);
    }
}
