//! Signal-to-interference(-plus-noise) ratio at the reference user.

use rand_distr::{Distribution, Exp1};

use super::deployment::Deployment;
use super::{stream_rng, SimConfig, Stream};
use crate::mgf::NetworkParams;

/// SIR for each path-loss exponent in `betas`, sharing positions and fading
/// draws across exponents.
///
/// `SIR = (h₀/L₀) / (Σ_active mᵢ/Lᵢ + σ²/P_tx)` with `L = κ r^β`; `+∞` when
/// there is neither an active interferer nor noise.
pub fn sample_sir_multi(d: &Deployment, p: &NetworkParams<f64>, cfg: &SimConfig, betas: &[f64]) -> Vec<f64> {
    let mut rng = stream_rng(cfg.seed, d.realization_id, Stream::Fading);
    let h0: f64 = if cfg.rayleigh_on_serving { Exp1.sample(&mut rng) } else { 1.0 };

    // (ln rᵢ, markᵢ) for the active interferers
    let mut terms = Vec::with_capacity(d.bs_positions.len());
    for (i, q) in d.bs_positions.iter().enumerate() {
        if i == d.serving_index || !d.active_mask[i] {
            continue;
        }
        let mark: f64 = if cfg.fading_on_interferers { Exp1.sample(&mut rng) } else { 1.0 };
        terms.push((0.5 * (q[0] * q[0] + q[1] * q[1]).ln(), mark));
    }
    let s = d.bs_positions[d.serving_index];
    let ln_r0 = 0.5 * (s[0] * s[0] + s[1] * s[1]).ln();
    let noise = p.sigma_n2 / p.p_tx;

    betas
        .iter()
        .map(|&beta| {
            // powers relative to the serving link keep the sum O(1)
            let mut interference = 0.0;
            for &(ln_r, m) in &terms {
                interference += m * (-beta * (ln_r - ln_r0)).exp();
            }
            let l0 = p.kappa * (beta * ln_r0).exp();
            let denom = interference + noise * l0;
            if denom == 0.0 {
                f64::INFINITY
            } else {
                h0 / denom
            }
        })
        .collect()
}

/// SIR at the exponent stored in `p`.
pub fn sample_sir(d: &Deployment, p: &NetworkParams<f64>, cfg: &SimConfig) -> f64 {
    sample_sir_multi(d, p, cfg, &[p.beta])[0]
}
