//! Monte Carlo reference for the analytical results.
//!
//! Each realization draws `n_bs_target` base stations uniformly on a disc
//! whose radius tracks the density, an optional Poisson user layer on the
//! same disc, and evaluates the SIR at the origin.

pub mod deployment;
pub mod estimate;
pub mod grid;
pub mod harness;
pub mod sir;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::error::{Error, Result};

pub use deployment::{apply_idle_mode, sample_deployment, window_radius, Deployment};
pub use estimate::{estimate_rates, ks_distance, mean_stderr, SirSampleSet, MIN_SAMPLES};
pub use harness::{run_simulation, InactiveStats, SimulationRun};
pub use sir::{sample_sir, sample_sir_multi};

/// Smallest window population accepted (edge-effect guard).
pub const MIN_BS: usize = 50;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SimConfig {
    pub n_bs_target: usize,
    pub n_realizations: usize,
    pub seed: u64,
    pub rayleigh_on_serving: bool,
    pub fading_on_interferers: bool,
    /// Sample users and switch off empty cells; off means fully loaded.
    pub idle_mode: bool,
}

impl Default for SimConfig {
    fn default() -> Self {
        Self {
            n_bs_target: 500,
            n_realizations: 10_000,
            seed: 0,
            rayleigh_on_serving: true,
            fading_on_interferers: false,
            idle_mode: false,
        }
    }
}

impl SimConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_bs_target < MIN_BS {
            return Err(Error::domain("n_bs_target", self.n_bs_target as f64, "n_bs_target >= 50"));
        }
        if self.n_realizations == 0 {
            return Err(Error::domain("n_realizations", 0.0, "n_realizations >= 1"));
        }
        Ok(())
    }
}

/// Independent random streams of one realization.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Stream {
    BaseStations = 0,
    Users = 1,
    Fading = 2,
    Probe = 3,
}

/// Counter-based stream for `(seed, realization, purpose)`.
pub(crate) fn stream_rng(seed: u64, realization_id: u64, purpose: Stream) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(realization_id.wrapping_mul(4).wrapping_add(purpose as u64));
    rng
}
