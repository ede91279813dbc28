//! Discrete power-law fitting: exact maximum likelihood for the exponent,
//! Kolmogorov–Smirnov minimisation for the lower cut-off.

use serde::{Deserialize, Serialize};

use super::zeta::hurwitz_zeta;
use crate::error::{Error, Result};

/// Minimum tail size accepted by the fitter.
pub const MIN_TAIL: usize = 50;

const GAMMA_LO: f64 = 1.000_001;
const GAMMA_HI: f64 = 30.0;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum XMinStrategy {
    Fixed(u64),
    /// Scan candidate cut-offs and keep the one minimising the KS distance.
    /// Candidates leaving fewer than `min_tail` samples are skipped.
    KsMinimize { min_tail: usize },
}

impl Default for XMinStrategy {
    fn default() -> Self {
        XMinStrategy::KsMinimize { min_tail: MIN_TAIL }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PowerLawFit {
    pub gamma: f64,
    pub x_min: u64,
    pub n: usize,
    pub log_likelihood: f64,
    /// KS distance between the tail and the fitted model.
    pub ks: f64,
}

/// Log-likelihood of `n` samples ≥ `x_min` whose logs sum to `sum_ln`.
fn log_likelihood(gamma: f64, x_min: u64, n: usize, sum_ln: f64) -> f64 {
    -(n as f64) * hurwitz_zeta(gamma, x_min as f64).ln() - gamma * sum_ln
}

/// Maximises the (concave) discrete log-likelihood by golden-section search.
fn mle_gamma(x_min: u64, n: usize, sum_ln: f64) -> f64 {
    let phi = (5f64.sqrt() - 1.0) / 2.0;
    let (mut a, mut b) = (GAMMA_LO, GAMMA_HI);
    let mut c = b - phi * (b - a);
    let mut d = a + phi * (b - a);
    let mut fc = log_likelihood(c, x_min, n, sum_ln);
    let mut fd = log_likelihood(d, x_min, n, sum_ln);
    while b - a > 1e-10 {
        if fc > fd {
            b = d;
            d = c;
            fd = fc;
            c = b - phi * (b - a);
            fc = log_likelihood(c, x_min, n, sum_ln);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + phi * (b - a);
            fd = log_likelihood(d, x_min, n, sum_ln);
        }
    }
    0.5 * (a + b)
}

/// Distinct sorted values with their multiplicities.
fn tally(samples: &[u64]) -> (Vec<u64>, Vec<usize>) {
    let mut sorted = samples.to_vec();
    sorted.sort_unstable();
    let mut values = Vec::new();
    let mut counts = Vec::new();
    for x in sorted {
        if values.last() == Some(&x) {
            *counts.last_mut().unwrap() += 1;
        } else {
            values.push(x);
            counts.push(1);
        }
    }
    (values, counts)
}

/// KS distance of the tail `values[start..]` against the law normalised from `x_min`.
fn ks_distance(values: &[u64], counts: &[usize], start: usize, x_min: u64, n: usize, gamma: f64) -> f64 {
    let norm = hurwitz_zeta(gamma, x_min as f64);
    let mut seen = 0usize;
    let mut worst = 0f64;
    for i in start..values.len() {
        seen += counts[i];
        let empirical = seen as f64 / n as f64;
        let model = 1.0 - hurwitz_zeta(gamma, values[i] as f64 + 1.0) / norm;
        worst = worst.max((empirical - model).abs());
    }
    worst
}

/// Fits `P(x) ∝ x^(-γ)` for `x ≥ x_min` to positive integer samples.
pub fn fit_power_law(samples: &[u64], strategy: XMinStrategy) -> Result<PowerLawFit> {
    let (values, counts) = tally(samples);
    if values.first() == Some(&0) {
        return Err(Error::InvalidParameter("power-law samples must be ≥ 1".into()));
    }
    if values.len() == 1 && counts[0] >= MIN_TAIL {
        return Err(Error::DegenerateSamples);
    }
    // suffix sums of counts and of count · ln x
    let u = values.len();
    let mut tail_n = vec![0usize; u + 1];
    let mut tail_ln = vec![0f64; u + 1];
    for i in (0..u).rev() {
        tail_n[i] = tail_n[i + 1] + counts[i];
        tail_ln[i] = tail_ln[i + 1] + counts[i] as f64 * (values[i] as f64).ln();
    }

    let fit_at = |start: usize| {
        let x_min = values[start];
        let n = tail_n[start];
        let sum_ln = tail_ln[start];
        let gamma = mle_gamma(x_min, n, sum_ln);
        PowerLawFit {
            gamma,
            x_min,
            n,
            log_likelihood: log_likelihood(gamma, x_min, n, sum_ln),
            ks: ks_distance(&values, &counts, start, x_min, n, gamma),
        }
    };

    match strategy {
        XMinStrategy::Fixed(x_min) => {
            if x_min == 0 {
                return Err(Error::InvalidParameter("x_min must be ≥ 1".into()));
            }
            let start = values.partition_point(|&v| v < x_min);
            let n = tail_n[start];
            if n < MIN_TAIL {
                return Err(Error::InsufficientSamples { needed: MIN_TAIL, got: n });
            }
            if start + 1 == u {
                return Err(Error::DegenerateSamples);
            }
            // the law is normalised from x_min, which need not be an observed value
            let sum_ln = tail_ln[start];
            let gamma = mle_gamma(x_min, n, sum_ln);
            let ks = ks_distance(&values, &counts, start, x_min, n, gamma);
            Ok(PowerLawFit {
                gamma,
                x_min,
                n,
                log_likelihood: log_likelihood(gamma, x_min, n, sum_ln),
                ks,
            })
        }
        XMinStrategy::KsMinimize { min_tail } => {
            let min_tail = min_tail.max(MIN_TAIL);
            let mut best: Option<PowerLawFit> = None;
            // the last distinct value alone is a degenerate tail
            for start in 0..u.saturating_sub(1) {
                if tail_n[start] < min_tail {
                    break;
                }
                let fit = fit_at(start);
                if best.as_ref().is_none_or(|b| fit.ks < b.ks) {
                    best = Some(fit);
                }
            }
            best.ok_or(Error::InsufficientSamples {
                needed: min_tail,
                got: tail_n[0],
            })
        }
    }
}

/// Slope of a straight-line fit of log10(density) on log10(bin centre) over
/// occupied bins, negated so it is comparable with a fitted exponent.
pub fn binned_exponent(points: &[(f64, f64)]) -> Option<f64> {
    let pts: Vec<(f64, f64)> = points
        .iter()
        .filter(|(x, y)| *x > 0.0 && *y > 0.0)
        .map(|(x, y)| (x.log10(), y.log10()))
        .collect();
    if pts.len() < 2 {
        return None;
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    if sxx == 0.0 {
        return None;
    }
    Some(-sxy / sxx)
}
