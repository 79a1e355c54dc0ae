//! Normal-approximation bands and chi-square tests for the Monte Carlo
//! checks.

use statrs::distribution::{ChiSquared, ContinuousCDF};

/// Width multiplier of every binomial band.
pub const SIGMA_BAND: f64 = 3.0;
/// Significance level of every chi-square test.
pub const CHI_SQUARE_ALPHA: f64 = 0.01;

pub fn binomial_sigma(p: f64, samples: u64) -> f64 {
    (p * (1.0 - p) / samples as f64).sqrt()
}

/// `|empirical - p| <= 3 sigma`.
pub fn within_band(empirical: f64, p: f64, samples: u64) -> bool {
    (empirical - p).abs() <= SIGMA_BAND * binomial_sigma(p, samples)
}

/// `empirical <= bound + 3 sigma(bound)`.
pub fn below_band(empirical: f64, bound: f64, samples: u64) -> bool {
    let bound = bound.clamp(0.0, 1.0);
    empirical <= bound + SIGMA_BAND * binomial_sigma(bound, samples)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ChiSquareResult {
    pub statistic: f64,
    pub df: usize,
    pub critical: f64,
}

impl ChiSquareResult {
    pub fn passes(&self) -> bool {
        self.statistic <= self.critical
    }
}

pub fn chi_square_critical(df: usize, alpha: f64) -> f64 {
    ChiSquared::new(df as f64)
        .expect("positive degrees of freedom")
        .inverse_cdf(1.0 - alpha)
}

/// Goodness of fit of observed cell counts against cell probabilities.
/// The counts and probabilities should cover the whole space (pool the
/// remainder into a final cell).
pub fn chi_square_goodness_of_fit(observed: &[u64], probs: &[f64]) -> ChiSquareResult {
    assert_eq!(observed.len(), probs.len());
    let n: u64 = observed.iter().sum();
    let statistic = observed
        .iter()
        .zip(probs)
        .map(|(&o, &p)| {
            let e = p * n as f64;
            (o as f64 - e).powi(2) / e
        })
        .sum();
    let df = observed.len() - 1;
    ChiSquareResult {
        statistic,
        df,
        critical: chi_square_critical(df, CHI_SQUARE_ALPHA),
    }
}

/// Two-sample homogeneity test on a 2 x c contingency table.
pub fn chi_square_homogeneity(a: &[u64], b: &[u64]) -> ChiSquareResult {
    assert_eq!(a.len(), b.len());
    let na: u64 = a.iter().sum();
    let nb: u64 = b.iter().sum();
    let total = (na + nb) as f64;
    let mut statistic = 0.0;
    let mut cells = 0;
    for (&x, &y) in a.iter().zip(b) {
        let column = (x + y) as f64;
        if column == 0.0 {
            continue;
        }
        cells += 1;
        for (obs, n) in [(x, na), (y, nb)] {
            let e = column * n as f64 / total;
            statistic += (obs as f64 - e).powi(2) / e;
        }
    }
    let df = cells.max(2) - 1;
    ChiSquareResult {
        statistic,
        df,
        critical: chi_square_critical(df, CHI_SQUARE_ALPHA),
    }
}
