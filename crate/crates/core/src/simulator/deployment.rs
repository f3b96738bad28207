//! One network realization on a disc around the reference user at the origin.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Exp1, Poisson};

use super::grid::GridIndex;
use super::{stream_rng, SimConfig, Stream};
use crate::mgf::NetworkParams;

#[derive(Debug, Clone, PartialEq)]
pub struct Deployment {
    pub realization_id: u64,
    /// Ordered by distance from the origin.
    pub bs_positions: Vec<[f64; 2]>,
    /// Overlay users; the reference user at the origin is implicit.
    pub ue_positions: Vec<[f64; 2]>,
    pub active_mask: Vec<bool>,
    /// Always 0 since positions are sorted by distance.
    pub serving_index: usize,
    pub window_radius: f64,
    /// Overlay users whose nearest base station is the serving one.
    pub serving_cell_users: usize,
}

impl Deployment {
    pub fn n_active(&self) -> usize {
        self.active_mask.iter().filter(|&&a| a).count()
    }

    /// Users sharing the serving cell, the reference user included.
    pub fn n_users_in_cell(&self) -> usize {
        self.serving_cell_users + 1
    }

    pub fn serving_distance(&self) -> f64 {
        let p = self.bs_positions[self.serving_index];
        p[0].hypot(p[1])
    }
}

/// Disc radius holding `n` base stations on average at density `λ`.
pub fn window_radius(n_bs: usize, lambda_bs: f64) -> f64 {
    (n_bs as f64 / (std::f64::consts::PI * lambda_bs)).sqrt()
}

/// `n` points uniform on a disc of radius `radius`, sorted by distance.
///
/// Squared radii of uniform points are uniform on `[0, R²]`; their order
/// statistics are generated directly as normalised exponential partial sums
/// `R² S_k / S_(n+1)`, so no sort is needed.
fn sorted_disc_points(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<[f64; 2]> {
    let mut partial = Vec::with_capacity(n);
    let mut s = 0.0f64;
    for _ in 0..n {
        let e: f64 = Exp1.sample(rng);
        s += e;
        partial.push(s);
    }
    let e: f64 = Exp1.sample(rng);
    let total = s + e;
    let scale = radius * radius / total;
    partial
        .into_iter()
        .map(|sk| {
            let r = (sk * scale).sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            [r * theta.cos(), r * theta.sin()]
        })
        .collect()
}

fn uniform_disc_points(rng: &mut ChaCha8Rng, n: usize, radius: f64) -> Vec<[f64; 2]> {
    (0..n)
        .map(|_| {
            let r = radius * rng.random::<f64>().sqrt();
            let theta = std::f64::consts::TAU * rng.random::<f64>();
            [r * theta.cos(), r * theta.sin()]
        })
        .collect()
}

/// Exactly `n_bs_target` base stations uniform on the disc of radius
/// `√(n/(πλ))`, and a Poisson number of overlay users of mean `λ_UE π R²`
/// on the same disc (none when idle mode is off). All base stations start
/// active.
pub fn sample_deployment(p: &NetworkParams<f64>, cfg: &SimConfig, realization_id: u64) -> Deployment {
    let radius = window_radius(cfg.n_bs_target, p.lambda_bs);
    let mut bs_rng = stream_rng(cfg.seed, realization_id, Stream::BaseStations);
    let bs_positions = sorted_disc_points(&mut bs_rng, cfg.n_bs_target, radius);

    let ue_positions = if cfg.idle_mode {
        let mean = p.lambda_ue * std::f64::consts::PI * radius * radius;
        let mut ue_rng = stream_rng(cfg.seed, realization_id, Stream::Users);
        let count = if mean > 0.0 {
            let d = Poisson::new(mean).expect("finite positive Poisson mean");
            d.sample(&mut ue_rng) as usize
        } else {
            0
        };
        uniform_disc_points(&mut ue_rng, count, radius)
    } else {
        Vec::new()
    };

    let n = bs_positions.len();
    Deployment {
        realization_id,
        bs_positions,
        ue_positions,
        active_mask: vec![true; n],
        serving_index: 0,
        window_radius: radius,
        serving_cell_users: 0,
    }
}

/// Switches off every base station whose cell holds no user. The serving
/// station stays on because the reference user is in its cell.
pub fn apply_idle_mode(mut d: Deployment) -> Deployment {
    let grid = GridIndex::new(&d.bs_positions, d.window_radius);
    let mut active = vec![false; d.bs_positions.len()];
    let mut serving_users = 0;
    for &u in &d.ue_positions {
        if let Some(j) = grid.nearest(&d.bs_positions, u) {
            active[j] = true;
            if j == d.serving_index {
                serving_users += 1;
            }
        }
    }
    if let Some(s) = active.get_mut(d.serving_index) {
        *s = true;
    }
    d.active_mask = active;
    d.serving_cell_users = serving_users;
    d
}
