//! Derived quantities: the aggressive/cooperative payoff ratio (ICD), noise
//! sensitivity, cooperation-rate entropy and attitude separation.

use crate::moran::{Composition, EquilibriumDistribution};
use crate::tournament::PayoffTable;
use crate::types::Attitude;

/// Number of equal-width bins on `[0, 1]` used for entropy.
pub const ENTROPY_BINS: usize = 10;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MetricsError {
    #[error("cooperative payoff row sums to zero; ICD is undefined")]
    DivisionByZero,
    #[error("cannot compare compositions {clean} and {noisy}")]
    CompositionMismatch { clean: Composition, noisy: Composition },
}

/// `mean(u[A][.]) / mean(u[C][.])` over the three opponent attitudes.
pub fn compute_icd(payoffs: &PayoffTable) -> Result<f64, MetricsError> {
    let aggressive: f64 = payoffs.row(Attitude::Aggressive).iter().sum();
    let cooperative: f64 = payoffs.row(Attitude::Cooperative).iter().sum();
    if cooperative == 0.0 {
        return Err(MetricsError::DivisionByZero);
    }
    Ok(aggressive / cooperative)
}

/// Drop in cooperative-fixation probability under noise, in percentage points.
pub fn compute_delta_noise(
    clean: &EquilibriumDistribution,
    noisy: &EquilibriumDistribution,
) -> Result<f64, MetricsError> {
    if clean.composition != noisy.composition {
        return Err(MetricsError::CompositionMismatch {
            clean: clean.composition,
            noisy: noisy.composition,
        });
    }
    Ok((clean.p_c - noisy.p_c) * 100.0)
}

/// Bin of a rate: `[0, 0.1)`, ..., `[0.8, 0.9)`, `[0.9, 1.0]`. Out-of-range
/// rates clamp to the end bins.
pub fn rate_bin(rate: f64) -> usize {
    // Compare against k/10 so that literal edges such as 0.3 land in the upper bin.
    (1..ENTROPY_BINS)
        .filter(|&k| rate >= k as f64 / ENTROPY_BINS as f64)
        .count()
}

#[derive(Clone, Debug, PartialEq)]
pub struct BinnedEntropy {
    /// Shannon entropy in nats.
    pub h: f64,
    pub bin_counts: [u32; ENTROPY_BINS],
}

/// Shannon entropy (nats) of the binned distribution of `rates`, with `0 ln 0 = 0`.
pub fn compute_entropy(rates: &[f64]) -> BinnedEntropy {
    let mut bin_counts = [0u32; ENTROPY_BINS];
    for &r in rates {
        bin_counts[rate_bin(r)] += 1;
    }
    let total = rates.len() as f64;
    let h = bin_counts
        .iter()
        .filter(|&&c| c > 0)
        .map(|&c| {
            let p = c as f64 / total;
            -p * p.ln()
        })
        .sum::<f64>()
        .max(0.0);
    BinnedEntropy { h, bin_counts }
}

#[derive(Clone, Debug, PartialEq)]
pub struct EntropyReport {
    /// A, C, N order.
    pub per_attitude: [BinnedEntropy; 3],
    pub mean_h: f64,
}

impl EntropyReport {
    /// `rates[k]` holds per-strategy cooperation rates for attitude `k` (A, C, N).
    pub fn from_rates(rates: [&[f64]; 3]) -> Self {
        let per_attitude = rates.map(compute_entropy);
        let mean_h = per_attitude.iter().map(|e| e.h).sum::<f64>() / 3.0;
        Self { per_attitude, mean_h }
    }
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

/// Mean cooperative-set rate minus mean aggressive-set rate.
pub fn compute_separation(cooperative: &[f64], aggressive: &[f64]) -> f64 {
    mean(cooperative) - mean(aggressive)
}

/// Headline metrics for one model–prompt pair. Missing inputs are `None`.
#[derive(Clone, Debug, PartialEq, Default)]
pub struct MetricsReport {
    pub icd: Option<f64>,
    /// Δ_noise per composition, percentage points.
    pub delta_noise: Vec<(Composition, f64)>,
    pub mean_entropy: Option<f64>,
    pub separation: Option<f64>,
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::moran::Regime;

    fn table(a: [f64; 3], c: [f64; 3]) -> PayoffTable {
        PayoffTable::from_means([a, c, [3.0, 3.0, 3.0]])
    }

    #[test]
    fn icd_published_rows() {
        let claude = compute_icd(&table([1.000, 1.893, 1.861], [1.890, 2.982, 2.988])).unwrap();
        assert!((claude - 0.605).abs() <= 0.001, "{claude}");
        let gpt = compute_icd(&table([1.017, 1.079, 1.073], [1.074, 3.000, 2.900])).unwrap();
        assert!((gpt - 0.454).abs() <= 0.001, "{gpt}");
        let same = compute_icd(&table([2.0, 2.5, 1.5], [2.0, 2.5, 1.5])).unwrap();
        assert_eq!(same, 1.0);
        assert_eq!(
            compute_icd(&table([1.0; 3], [0.0; 3])),
            Err(MetricsError::DivisionByZero)
        );
    }

    fn dist(regime: Regime, pct_c: u64) -> EquilibriumDistribution {
        EquilibriumDistribution::from_counts(regime, [0, pct_c * 5, (100 - pct_c) * 5, 0])
    }

    #[test]
    fn delta_noise_examples() {
        let [clean, noisy, biased, _] = Regime::standard();
        let d = compute_delta_noise(&dist(clean, 49), &dist(noisy, 40)).unwrap();
        assert!((d - 9.0).abs() < 1e-9);
        let d = compute_delta_noise(&dist(clean, 70), &dist(noisy, 42)).unwrap();
        assert!((d - 28.0).abs() < 1e-9);
        assert_eq!(compute_delta_noise(&dist(clean, 33), &dist(clean, 33)).unwrap(), 0.0);
        assert!(matches!(
            compute_delta_noise(&dist(clean, 33), &dist(biased, 33)),
            Err(MetricsError::CompositionMismatch { .. })
        ));
    }

    #[test]
    fn entropy_examples() {
        let single = compute_entropy(&[0.95; 25]);
        assert_eq!(single.h, 0.0);
        assert_eq!(single.bin_counts[9], 25);

        let uniform: Vec<f64> = (0..10).flat_map(|b| [b as f64 / 10.0 + 0.05; 2]).collect();
        let u = compute_entropy(&uniform);
        assert!((u.h - 10f64.ln()).abs() < 1e-12);
        assert_eq!(u.bin_counts, [2; 10]);

        let mut split = vec![0.15; 12];
        split.extend([0.75; 13]);
        let two = compute_entropy(&split);
        let expected = -(12.0f64 / 25.0) * (12.0f64 / 25.0).ln() - (13.0f64 / 25.0) * (13.0f64 / 25.0).ln();
        assert!((two.h - expected).abs() < 1e-12);
        assert!((two.h - 0.6923).abs() < 1e-4);
    }

    #[test]
    fn bin_edges() {
        assert_eq!(rate_bin(0.0), 0);
        assert_eq!(rate_bin(0.099_999), 0);
        assert_eq!(rate_bin(0.1), 1);
        assert_eq!(rate_bin(0.3), 3);
        assert_eq!(rate_bin(0.9), 9);
        assert_eq!(rate_bin(1.0), 9);
    }

    #[test]
    fn separation_examples() {
        assert_eq!(compute_separation(&[1.0; 25], &[0.0; 25]), 1.0);
        assert_eq!(compute_separation(&[0.4, 0.6], &[0.4, 0.6]), 0.0);
        let sep = compute_separation(&[0.72; 25], &[0.16; 25]);
        assert!((sep - 0.56).abs() < 1e-12);
    }

    #[test]
    fn entropy_report_mean() {
        let a = [0.0; 25];
        let c = [1.0; 25];
        let mut n = vec![0.15; 12];
        n.extend([0.75; 13]);
        let report = EntropyReport::from_rates([&a, &c, &n]);
        assert!((report.mean_h - report.per_attitude[2].h / 3.0).abs() < 1e-15);
    }
}
