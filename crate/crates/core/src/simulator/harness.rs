//! Parallel driver: realizations are independent work units whose results
//! are collected in realization order, so output does not depend on the
//! worker count.

use rand::Rng;
use rayon::prelude::*;

use super::deployment::{apply_idle_mode, sample_deployment, Deployment};
use super::estimate::SirSampleSet;
use super::sir::sample_sir_multi;
use super::{stream_rng, SimConfig, Stream};
use crate::error::{Error, Result};
use crate::mgf::{check_beta, NetworkParams};

/// Empirical idle probability of a base station away from the window edge.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct InactiveStats {
    /// Realizations that contributed a probe station.
    pub probes: usize,
    pub probe_inactive: usize,
    /// Interior stations over all realizations (serving station excluded).
    pub interior_total: usize,
    pub interior_inactive: usize,
    /// Standard error of the per-realization interior fraction.
    pub pooled_stderr: f64,
}

impl InactiveStats {
    /// Fraction of probes (one uniformly chosen interior station per
    /// realization) found idle.
    pub fn probe_fraction(&self) -> f64 {
        self.probe_inactive as f64 / self.probes.max(1) as f64
    }

    /// Binomial standard deviation of the probe fraction at probability `p`.
    pub fn probe_sigma(&self, p: f64) -> f64 {
        (p * (1.0 - p) / self.probes.max(1) as f64).sqrt()
    }

    pub fn pooled_fraction(&self) -> f64 {
        self.interior_inactive as f64 / self.interior_total.max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SimulationRun {
    pub config: SimConfig,
    pub betas: Vec<f64>,
    /// One sample set per entry of `betas`.
    pub sample_sets: Vec<SirSampleSet>,
    /// Distance from the reference user to its serving station, per realization.
    pub serving_distances: Vec<f64>,
    /// Present when idle mode is on.
    pub inactive: Option<InactiveStats>,
    pub window_radius: f64,
}

impl SimulationRun {
    pub fn samples_for(&self, beta: f64) -> Option<&SirSampleSet> {
        self.betas.iter().position(|&b| b == beta).map(|i| &self.sample_sets[i])
    }
}

struct Outcome {
    sirs: Vec<f64>,
    n_users: u32,
    n_active: u32,
    serving_distance: f64,
    probe: Option<bool>,
    interior: u32,
    interior_inactive: u32,
}

/// Stations strictly inside half the window radius, excluding the server.
fn interior_range(d: &Deployment) -> std::ops::Range<usize> {
    let limit = 0.5 * d.window_radius;
    let end = d.bs_positions.partition_point(|q| q[0].hypot(q[1]) < limit);
    1.min(end)..end
}

fn run_one(p: &NetworkParams<f64>, cfg: &SimConfig, betas: &[f64], id: u64) -> Outcome {
    let mut d = sample_deployment(p, cfg, id);
    if cfg.idle_mode {
        d = apply_idle_mode(d);
    }
    let sirs = sample_sir_multi(&d, p, cfg, betas);
    let (mut probe, mut interior, mut interior_inactive) = (None, 0, 0);
    if cfg.idle_mode {
        let range = interior_range(&d);
        if !range.is_empty() {
            let mut rng = stream_rng(cfg.seed, id, Stream::Probe);
            let pick = rng.random_range(range.clone());
            probe = Some(!d.active_mask[pick]);
            interior = range.len() as u32;
            interior_inactive = d.active_mask[range].iter().filter(|&&a| !a).count() as u32;
        }
    }
    Outcome {
        sirs,
        n_users: d.n_users_in_cell() as u32,
        n_active: d.n_active() as u32,
        serving_distance: d.serving_distance(),
        probe,
        interior,
        interior_inactive,
    }
}

/// Runs `cfg.n_realizations` realizations on `jobs` worker threads and
/// evaluates the SIR at every exponent in `betas` on the same deployments.
pub fn run_simulation(p: &NetworkParams<f64>, betas: &[f64], cfg: &SimConfig, jobs: usize) -> Result<SimulationRun> {
    p.validate()?;
    cfg.validate()?;
    if betas.is_empty() {
        return Err(Error::domain("betas", 0.0, "at least one path-loss exponent"));
    }
    for &b in betas {
        check_beta(b)?;
    }
    if jobs == 0 {
        return Err(Error::domain("jobs", 0.0, "jobs >= 1"));
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(|_| Error::domain("jobs", jobs as f64, "thread pool could not be created"))?;
    let outcomes: Vec<Outcome> = pool.install(|| {
        (0..cfg.n_realizations as u64)
            .into_par_iter()
            .map(|id| run_one(p, cfg, betas, id))
            .collect()
    });

    let mut sample_sets: Vec<SirSampleSet> = betas.iter().map(|&b| SirSampleSet::new(b)).collect();
    let mut serving_distances = Vec::with_capacity(outcomes.len());
    let mut stats = InactiveStats {
        probes: 0,
        probe_inactive: 0,
        interior_total: 0,
        interior_inactive: 0,
        pooled_stderr: 0.0,
    };
    let mut fractions = Vec::new();
    for (id, o) in outcomes.iter().enumerate() {
        for (set, &sir) in sample_sets.iter_mut().zip(&o.sirs) {
            set.push(id as u64, sir, o.n_users, o.n_active);
        }
        serving_distances.push(o.serving_distance);
        if let Some(idle) = o.probe {
            stats.probes += 1;
            stats.probe_inactive += idle as usize;
            stats.interior_total += o.interior as usize;
            stats.interior_inactive += o.interior_inactive as usize;
            fractions.push(o.interior_inactive as f64 / o.interior as f64);
        }
    }
    if fractions.len() > 1 {
        let n = fractions.len() as f64;
        let mean = fractions.iter().sum::<f64>() / n;
        let var = fractions.iter().map(|f| (f - mean).powi(2)).sum::<f64>() / (n - 1.0);
        stats.pooled_stderr = (var / n).sqrt();
    }
    Ok(SimulationRun {
        config: *cfg,
        betas: betas.to_vec(),
        sample_sets,
        serving_distances,
        inactive: cfg.idle_mode.then_some(stats),
        window_radius: super::deployment::window_radius(cfg.n_bs_target, p.lambda_bs),
    })
}
