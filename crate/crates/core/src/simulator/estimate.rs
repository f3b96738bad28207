//! Sample sets and Monte Carlo estimators with standard errors.

use crate::analytics::rate::{RateMethod, RateResult};
use crate::error::{Error, Result};

/// Minimum number of finite samples an estimate is formed from.
pub const MIN_SAMPLES: usize = 100;

/// Per-realization samples for one path-loss exponent, in realization order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SirSampleSet {
    pub beta: f64,
    pub realization_ids: Vec<u64>,
    /// Linear SIR; `+∞` when no interferer was active.
    pub sir_values: Vec<f64>,
    /// `ln(1 + SIR)`.
    pub rate_peak_samples: Vec<f64>,
    /// Peak rate divided by the users sharing the serving cell.
    pub rate_actual_samples: Vec<f64>,
    /// Users in the serving cell, reference user included.
    pub n_users_in_cell: Vec<u32>,
    pub n_active_bs: Vec<u32>,
}

impl SirSampleSet {
    pub fn new(beta: f64) -> Self {
        Self {
            beta,
            ..Self::default()
        }
    }

    pub fn push(&mut self, realization_id: u64, sir: f64, n_users: u32, n_active: u32) {
        let peak = sir.ln_1p();
        self.realization_ids.push(realization_id);
        self.sir_values.push(sir);
        self.rate_peak_samples.push(peak);
        self.rate_actual_samples.push(peak / n_users as f64);
        self.n_users_in_cell.push(n_users);
        self.n_active_bs.push(n_active);
    }

    pub fn len(&self) -> usize {
        self.sir_values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.sir_values.is_empty()
    }

    /// Samples with no active interferer.
    pub fn no_interference_count(&self) -> usize {
        self.sir_values.iter().filter(|s| s.is_infinite()).count()
    }

    pub fn no_interference_fraction(&self) -> f64 {
        if self.is_empty() {
            0.0
        } else {
            self.no_interference_count() as f64 / self.len() as f64
        }
    }

    fn finite(&self) -> impl Iterator<Item = usize> + '_ {
        self.sir_values
            .iter()
            .enumerate()
            .filter(|(_, s)| s.is_finite())
            .map(|(i, _)| i)
    }

    /// `P(SIR ≥ γ)` over the finite samples, with its binomial standard error.
    pub fn coverage(&self, gamma: f64) -> Result<(f64, f64)> {
        let mut n = 0usize;
        let mut hits = 0usize;
        for i in self.finite() {
            n += 1;
            hits += (self.sir_values[i] >= gamma) as usize;
        }
        if n < MIN_SAMPLES {
            return Err(Error::InsufficientSamples { got: n, need: MIN_SAMPLES });
        }
        let p = hits as f64 / n as f64;
        Ok((p, (p * (1.0 - p) / n as f64).sqrt()))
    }
}

/// Sample mean and standard error of the mean.
pub fn mean_stderr(values: impl Iterator<Item = f64>) -> Result<(f64, f64)> {
    let mut n = 0usize;
    let mut mean = 0.0;
    let mut m2 = 0.0;
    for v in values {
        n += 1;
        let d = v - mean;
        mean += d / n as f64;
        m2 += d * (v - mean);
    }
    if n < MIN_SAMPLES {
        return Err(Error::InsufficientSamples { got: n, need: MIN_SAMPLES });
    }
    let var = m2 / (n - 1) as f64;
    Ok((mean, (var / n as f64).sqrt()))
}

/// Peak and per-user rate estimates over the finite samples.
pub fn estimate_rates(samples: &SirSampleSet) -> Result<(RateResult<f64>, RateResult<f64>)> {
    let (peak, peak_se) = mean_stderr(samples.finite().map(|i| samples.rate_peak_samples[i]))?;
    let (actual, actual_se) = mean_stderr(samples.finite().map(|i| samples.rate_actual_samples[i]))?;
    let mc = |value, stderr| RateResult {
        value,
        method: RateMethod::MonteCarlo,
        stderr,
        no_interference: false,
    };
    Ok((mc(peak, peak_se), mc(actual, actual_se)))
}

/// Two-sided Kolmogorov–Smirnov distance of `samples` from `cdf`.
pub fn ks_distance(samples: &mut [f64], cdf: impl Fn(f64) -> f64) -> f64 {
    samples.sort_by(f64::total_cmp);
    let n = samples.len() as f64;
    samples.iter().enumerate().fold(0.0, |d, (i, &x)| {
        let f = cdf(x);
        d.max(f - i as f64 / n).max((i + 1) as f64 / n - f)
    })
}
