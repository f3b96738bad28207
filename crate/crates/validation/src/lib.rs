//! Acceptance suite: each criterion is a self-contained check with its own
//! tolerance and wall-clock budget. A criterion passes only if the check
//! holds and the budget is met.

use std::fmt::Write as _;
use std::time::{Duration, Instant};

use udn_rate::analytics::{
    load_model_from_ratio, pcov, rate_closed_general, rate_fully_loaded, rate_peak, rate_quadrature,
    rate_quadrature_with, verify_peak_closed_form, CoverageCurve, PathLossPdf, PcovKind, PeakRateForm,
};
use udn_rate::Result;
use udn_rate::mgf::{
    exact_bracket, solve_c, taylor_bracket, two_term_bracket, upper_bracket, MgfMode, MgfQuery, NetworkParams,
    ThinnedBase,
};
use udn_rate::simulator::{estimate_rates, ks_distance, run_simulation, SimConfig};

/// Base-station density of the rate experiments (BS/m²).
pub const REFERENCE_LAMBDA: f64 = 1.27e-6;

/// Density ratios `λ_UE/λ` of the idle-mode experiments.
pub const IDLE_RATIOS: [f64; 4] = [0.17, 4.34, 8.51, 11.11];

/// Reference intersection constants for β = 3, 4, 5.
pub const REFERENCE_C: [(f64, f64); 3] = [(3.0, 1.2528), (4.0, 1.2873), (5.0, 1.3099)];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ValidationOptions {
    pub seed: u64,
    pub jobs: usize,
}

impl Default for ValidationOptions {
    fn default() -> Self {
        Self {
            seed: 1,
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriterionOutcome {
    pub id: u8,
    pub title: &'static str,
    pub passed: bool,
    pub detail: String,
    pub elapsed: Duration,
    pub budget: Duration,
}

impl CriterionOutcome {
    /// `PASS`/`FAIL`, id, title, timing and detail on one line.
    pub fn line(&self) -> String {
        format!(
            "{} {} {} ({:.2} s / {} s): {}",
            if self.passed { "PASS" } else { "FAIL" },
            self.id,
            self.title,
            self.elapsed.as_secs_f64(),
            self.budget.as_secs(),
            self.detail
        )
    }
}

pub const CRITERIA: [(u8, &str, u64); 8] = [
    (1, "intersection constants", 1),
    (2, "mgf approximation tightness", 5),
    (3, "coverage overlap", 5),
    (4, "closed-form rate", 10),
    (5, "monte carlo fully loaded rate", 120),
    (6, "density invariance", 120),
    (7, "idle-mode curves", 300),
    (8, "property suite", 120),
];

/// Runs criterion `id` (1..=8).
pub fn run_criterion(id: u8, opts: &ValidationOptions) -> Option<CriterionOutcome> {
    let &(_, title, budget) = CRITERIA.iter().find(|c| c.0 == id)?;
    let start = Instant::now();
    let check: Result<(bool, String)> = match id {
        1 => intersection_constants(),
        2 => mgf_tightness(),
        3 => coverage_overlap(),
        4 => closed_form_rate(),
        5 => monte_carlo_fully_loaded(opts),
        6 => density_invariance(opts),
        7 => idle_mode_curves(opts),
        8 => property_suite(opts),
        _ => unreachable!(),
    };
    let elapsed = start.elapsed();
    let budget = Duration::from_secs(budget);
    let (ok, mut detail) = check.unwrap_or_else(|e| (false, format!("error: {e}")));
    if elapsed > budget {
        detail.push_str("; over budget");
    }
    Some(CriterionOutcome {
        id,
        title,
        passed: ok && elapsed <= budget,
        detail,
        elapsed,
        budget,
    })
}

pub fn run_all(opts: &ValidationOptions) -> Vec<CriterionOutcome> {
    CRITERIA.iter().filter_map(|c| run_criterion(c.0, opts)).collect()
}

/// `n` evenly spaced points on `[a, b]`.
fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    (0..n).map(|i| a + (b - a) * i as f64 / (n - 1) as f64).collect()
}

fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

/// β ∈ {2.5, 2.75, …, 5}.
fn beta_grid() -> Vec<f64> {
    linspace(2.5, 5.0, 11)
}

fn intersection_constants() -> Result<(bool, String)> {
    let mut ok = true;
    let mut detail = String::new();
    for (beta, reference) in REFERENCE_C {
        let c = solve_c(beta)?;
        let err = (c.c_exact - reference).abs();
        ok &= err <= 5e-4;
        let _ = write!(detail, "c({beta})={:.6} err={err:.1e}; ", c.c_exact);
    }
    let mut worst = (0.0f64, 0.0);
    for k in 1..=25 {
        let beta = 2.5 + 0.1 * k as f64;
        let c = solve_c(beta)?;
        let gap = (c.c_fit - c.c_exact).abs();
        if gap > worst.0 {
            worst = (gap, beta);
        }
    }
    ok &= worst.0 <= 5e-4;
    let _ = write!(detail, "max |fit - root| = {:.2e} at beta {:.1}", worst.0, worst.1);
    Ok((ok, detail))
}

fn mgf_tightness() -> Result<(bool, String)> {
    let xs = linspace(0.0, 20.0, 2001);
    let mut worst = (0.0f64, 0.0, 0.0);
    for beta in beta_grid() {
        let c = solve_c(beta)?;
        for &x in &xs {
            let exact = exact_bracket(x, beta)?.exp();
            let approx = two_term_bracket(x, beta, &c)?.exp();
            let rel = (approx - exact).abs() / exact;
            if rel > worst.0 {
                worst = (rel, beta, x);
            }
        }
    }
    // ln M / prefactor is the bracket for every density
    let mut invariance = 0.0f64;
    for beta in [2.5, 4.0, 5.0] {
        let c = solve_c(beta)?;
        for lambda in [1e-6, REFERENCE_LAMBDA, 1e-3, 1e-1] {
            let p = NetworkParams::new(lambda, 0.0, beta, 1.0, 1.0, 0.0)?;
            let l0 = p.l0_for_prefactor(0.7);
            for x in [0.1, 1.0, 5.0, 20.0] {
                let s = x * l0 / p.p_tx;
                let prefactor = p.exponent_prefactor(l0);
                let m = MgfQuery::new(s, l0, MgfMode::ApproxTwoTerm)?.evaluate(&p, &c)?;
                let b = two_term_bracket(x, beta, &c)?;
                invariance = invariance.max((m.ln() / prefactor - b).abs() / b.abs().max(1e-300));
            }
        }
    }
    let ok = worst.0 <= 0.02 && invariance <= 1e-9;
    Ok((
        ok,
        format!(
            "max relative error {:.3}% at beta {} x {:.2}; scaling deviation {invariance:.1e}",
            100.0 * worst.0,
            worst.1,
            worst.2
        ),
    ))
}

fn coverage_overlap() -> Result<(bool, String)> {
    let gammas: Vec<f64> = linspace(-10.0, 30.0, 81).into_iter().map(db_to_linear).collect();
    let mut worst = (0.0f64, 0.0);
    for beta in beta_grid() {
        let c = solve_c(beta)?;
        let gap = CoverageCurve::compute(&gammas, beta, 1.0, &c)?.max_abs_gap();
        if gap > worst.0 {
            worst = (gap, beta);
        }
    }
    Ok((worst.0 <= 0.02, format!("max gap {:.4} at beta {}", worst.0, worst.1)))
}

fn closed_form_rate() -> Result<(bool, String)> {
    let singular = udn_rate::analytics::rate::closed_form_singular_roots();
    let mut worst = (0.0f64, 0.0);
    let mut n = 0;
    for k in 1..=20 {
        let beta = 2.5 + 0.125 * k as f64;
        if singular.iter().any(|r| (beta - r).abs() < 0.02) {
            continue;
        }
        n += 1;
        let c = solve_c(beta)?;
        let closed = rate_closed_general(beta, &c)?.value;
        let quad = rate_quadrature_with(beta, 1.0, PcovKind::Approx, Some(&c))?.value;
        if (closed - quad).abs() > worst.0 {
            worst = ((closed - quad).abs(), beta);
        }
    }
    let mut ok = worst.0 <= 1e-6;
    let mut detail = format!("general form: {n} betas, max diff {:.1e} at beta {}", worst.0, worst.1);
    for form in [PeakRateForm::Beta3, PeakRateForm::Beta4] {
        let c = solve_c(form.beta())?;
        let report = verify_peak_closed_form(form, &c)?;
        ok &= report.quarantined || report.max_abs_diff <= 1e-6;
        let _ = write!(detail, "; {}", report.headline());
    }
    Ok((ok, detail))
}

fn monte_carlo_fully_loaded(opts: &ValidationOptions) -> Result<(bool, String)> {
    let betas = [3.0, 4.0, 5.0];
    let p = NetworkParams::new(REFERENCE_LAMBDA, 0.0, 4.0, 1.0, 1.0, 0.0)?;
    let cfg = SimConfig {
        n_bs_target: 20_000,
        n_realizations: 10_000,
        seed: opts.seed,
        ..SimConfig::default()
    };
    let run = run_simulation(&p, &betas, &cfg, opts.jobs)?;
    let mut ok = true;
    let mut detail = String::new();
    for set in &run.sample_sets {
        let (peak, _) = estimate_rates(set)?;
        let reference = rate_quadrature(set.beta, 1.0, PcovKind::Exact)?.value;
        let z = (peak.value - reference) / peak.stderr;
        ok &= z.abs() <= 3.0;
        let _ = write!(
            detail,
            "beta {}: {:.4}±{:.4} vs {reference:.4} (z {z:+.2}); ",
            set.beta, peak.value, peak.stderr
        );
    }
    Ok((ok, detail.trim_end_matches("; ").to_string()))
}

fn density_invariance(opts: &ValidationOptions) -> Result<(bool, String)> {
    let betas = [3.0, 4.0, 5.0];
    let cfg = SimConfig {
        n_bs_target: 2000,
        n_realizations: 10_000,
        seed: opts.seed,
        ..SimConfig::default()
    };
    let sparse = NetworkParams::new(REFERENCE_LAMBDA, 0.0, 4.0, 1.0, 1.0, 0.0)?;
    let dense = NetworkParams {
        lambda_bs: 10.0 * REFERENCE_LAMBDA,
        ..sparse
    };
    let a = run_simulation(&sparse, &betas, &cfg, opts.jobs)?;
    let b = run_simulation(&dense, &betas, &SimConfig { seed: opts.seed + 1, ..cfg }, opts.jobs)?;
    let gammas: Vec<f64> = linspace(-10.0, 30.0, 21).into_iter().map(db_to_linear).collect();
    let mut worst = (0.0f64, 0.0, 0.0);
    for (sa, sb) in a.sample_sets.iter().zip(&b.sample_sets) {
        for &g in &gammas {
            let (pa, _) = sa.coverage(g)?;
            let (pb, _) = sb.coverage(g)?;
            let (na, nb) = (sa.len() as f64, sb.len() as f64);
            let pooled = (pa * na + pb * nb) / (na + nb);
            let se = (pooled * (1.0 - pooled) * (1.0 / na + 1.0 / nb)).sqrt();
            let z = if se == 0.0 {
                if pa == pb { 0.0 } else { f64::INFINITY }
            } else {
                (pa - pb).abs() / se
            };
            if z > worst.0 {
                worst = (z, sa.beta, 10.0 * g.log10());
            }
        }
    }
    Ok((
        worst.0 < 3.0,
        format!(
            "{} betas x {} thresholds, max |z| {:.2} at beta {} gamma {:.0} dB",
            betas.len(),
            gammas.len(),
            worst.0,
            worst.1,
            worst.2
        ),
    ))
}

/// Window population for idle-mode runs: enough stations that about 2000
/// of them are active.
fn idle_window_size(p_active: f64) -> usize {
    ((2000.0 / p_active).ceil() as usize).max(2000)
}

fn idle_mode_curves(opts: &ValidationOptions) -> Result<(bool, String)> {
    let betas = [3.0, 4.0, 5.0];
    let cs = betas.iter().map(|&b| solve_c(b)).collect::<Result<Vec<_>>>()?;
    let mut ok = true;
    let mut detail = String::new();
    let mut worst_peak = 0.0f64;
    let mut worst_actual = 0.0f64;
    for ratio in IDLE_RATIOS {
        let load = load_model_from_ratio(ratio)?;
        let p = NetworkParams::new(REFERENCE_LAMBDA, ratio * REFERENCE_LAMBDA, 4.0, 1.0, 1.0, 0.0)?;
        let cfg = SimConfig {
            n_bs_target: idle_window_size(load.p_active),
            n_realizations: 10_000,
            seed: opts.seed,
            idle_mode: true,
            ..SimConfig::default()
        };
        let run = run_simulation(&p, &betas, &cfg, opts.jobs)?;
        let _ = write!(detail, "ratio {ratio}:");
        for (set, c) in run.sample_sets.iter().zip(&cs) {
            let (peak, actual) = estimate_rates(set)?;
            let model_peak = rate_peak(set.beta, load.p_active, c)?.value;
            let model_actual = model_peak * load.p_selection;
            let zp = (peak.value - model_peak) / peak.stderr;
            let za = (actual.value - model_actual) / actual.stderr;
            worst_peak = worst_peak.max(zp.abs());
            worst_actual = worst_actual.max(za.abs());
            let pass = zp.abs() <= 3.0 && za.abs() <= 3.0;
            ok &= pass;
            let _ = write!(detail, " b{} z {zp:+.2}/{za:+.2}{}", set.beta, if pass { "" } else { "!" });
        }
        let stats = run.inactive.expect("idle mode records inactive stations");
        let sigma = stats.probe_sigma(load.p_inactive);
        let zi = (stats.probe_fraction() - load.p_inactive) / sigma;
        ok &= zi.abs() <= 3.0;
        let _ = write!(
            detail,
            " idle {:.4} vs {:.4} (z {zi:+.2}); ",
            stats.probe_fraction(),
            load.p_inactive
        );
    }
    let load4 = load_model_from_ratio(4.0)?;
    let mut worst_rel = 0.0f64;
    for (beta, c) in betas.iter().zip(&cs) {
        let peak = rate_peak(*beta, load4.p_active, c)?.value;
        let full = rate_fully_loaded(*beta, c)?.value;
        worst_rel = worst_rel.max((peak - full).abs() / full);
    }
    ok &= worst_rel <= 0.05;
    let _ = write!(
        detail,
        "max |z| peak {worst_peak:.2} actual {worst_actual:.2}; ratio 4 vs fully loaded {:.2}%",
        100.0 * worst_rel
    );
    Ok((ok, detail))
}

fn property_suite(opts: &ValidationOptions) -> Result<(bool, String)> {
    let mut failures = Vec::new();

    // MGF at s = 0
    let mut mgf_dev = 0.0f64;
    for beta in beta_grid() {
        let c = solve_c(beta)?;
        let p = NetworkParams::new(REFERENCE_LAMBDA, 0.0, beta, 1.0, 1.0, 0.0)?;
        let modes = [
            MgfMode::Exact,
            MgfMode::ApproxTwoTerm,
            MgfMode::ApproxTaylor(2),
            MgfMode::ApproxTaylor(5),
            MgfMode::RayleighMarked,
            MgfMode::Thinned { p_active: 0.4, base: ThinnedBase::Exact },
            MgfMode::Thinned { p_active: 0.4, base: ThinnedBase::ApproxTwoTerm },
        ];
        for mode in modes {
            let m = MgfQuery::new(0.0, 1e-7, mode)?.evaluate(&p, &c)?;
            mgf_dev = mgf_dev.max((m - 1.0).abs());
        }
    }
    if mgf_dev > 0.0 {
        failures.push(format!("mgf(0) off by {mgf_dev:.1e}"));
    }

    // coverage bounds and monotonicity
    let gammas: Vec<f64> = linspace(-20.0, 40.0, 241).into_iter().map(db_to_linear).collect();
    let mut pcov_bad = 0;
    for beta in beta_grid() {
        let c = solve_c(beta)?;
        for kind in [PcovKind::Exact, PcovKind::Approx] {
            for pa in [0.05, 0.3, 0.7, 1.0] {
                let mut prev = 1.0;
                for &g in &gammas {
                    let v = pcov(kind, g, beta, pa, Some(&c))?;
                    if !(0.0..=1.0).contains(&v) || v > prev {
                        pcov_bad += 1;
                    }
                    prev = v;
                }
            }
        }
    }
    if pcov_bad > 0 {
        failures.push(format!("{pcov_bad} coverage values out of range or increasing"));
    }

    // branch continuity
    let mut jump = 0.0f64;
    for beta in beta_grid() {
        let c = solve_c(beta)?.value();
        jump = jump.max((taylor_bracket(c, beta, 2) - upper_bracket(c, beta)?).abs());
    }
    if jump > 1e-9 {
        failures.push(format!("branch jump {jump:.1e}"));
    }

    // nearest-station path loss
    let p = NetworkParams::new(REFERENCE_LAMBDA, 0.0, 3.5, 10.0, 1.0, 0.0)?;
    let cfg = SimConfig {
        n_bs_target: 500,
        n_realizations: 100_000,
        seed: opts.seed,
        ..SimConfig::default()
    };
    let run = run_simulation(&p, &[p.beta], &cfg, opts.jobs)?;
    let mut losses: Vec<f64> = run.serving_distances.iter().map(|r| p.kappa * r.powf(p.beta)).collect();
    let law = PathLossPdf::from_params(&p);
    let ks = ks_distance(&mut losses, |y| law.cdf(y));
    if ks >= 0.01 {
        failures.push(format!("path-loss KS {ks:.4}"));
    }

    // worker-count invariance
    let q = NetworkParams::new(REFERENCE_LAMBDA, 3.0 * REFERENCE_LAMBDA, 4.0, 1.0, 1.0, 0.0)?;
    let small = SimConfig {
        n_bs_target: 300,
        n_realizations: 400,
        seed: opts.seed,
        idle_mode: true,
        ..SimConfig::default()
    };
    let one = run_simulation(&q, &[3.0, 4.0], &small, 1)?;
    let many = run_simulation(&q, &[3.0, 4.0], &small, opts.jobs.max(2) + 1)?;
    if one != many {
        failures.push("output depends on worker count".to_string());
    }

    let summary = format!("mgf(0) dev {mgf_dev:.0e}, branch jump {jump:.1e}, KS {ks:.4}");
    if failures.is_empty() {
        Ok((true, summary))
    } else {
        Ok((false, format!("{summary}; {}", failures.join(", "))))
    }
}
