//! Experiment configuration: a TOML file with `kind` and `output` at the top
//! level and optional `[params]`, `[grid]`, `[sim]` and `[mgf]` sections.
//! Unknown keys are rejected.

use std::path::{Path, PathBuf};

use serde::Deserialize;
use udn_rate::simulator::SimConfig;
use udn_rate_validation::{IDLE_RATIOS, REFERENCE_LAMBDA};
use udn_rate::{Error as CoreError, NetworkParams};

use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExperimentKind {
    CoverageVsGamma,
    RateVsBeta,
    CoveragePartialLoad,
    PeakRateVsRatio,
    ActualRateVsRatio,
    MgfProfile,
    Validate,
}

impl ExperimentKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ExperimentKind::CoverageVsGamma => "coverage_vs_gamma",
            ExperimentKind::RateVsBeta => "rate_vs_beta",
            ExperimentKind::CoveragePartialLoad => "coverage_partial_load",
            ExperimentKind::PeakRateVsRatio => "peak_rate_vs_ratio",
            ExperimentKind::ActualRateVsRatio => "actual_rate_vs_ratio",
            ExperimentKind::MgfProfile => "mgf_profile",
            ExperimentKind::Validate => "validate",
        }
    }

    /// Meaning of the grid axis.
    pub fn axis(self) -> &'static str {
        match self {
            ExperimentKind::CoverageVsGamma | ExperimentKind::CoveragePartialLoad => "gamma",
            ExperimentKind::RateVsBeta => "beta",
            ExperimentKind::PeakRateVsRatio | ExperimentKind::ActualRateVsRatio => "ratio",
            ExperimentKind::MgfProfile => "x",
            ExperimentKind::Validate => "none",
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    kind: ExperimentKind,
    output: Option<PathBuf>,
    #[serde(default)]
    params: RawParams,
    #[serde(default)]
    grid: RawGrid,
    sim: Option<RawSim>,
    #[serde(default)]
    mgf: RawMgf,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawParams {
    lambda_bs: f64,
    lambda_ue: f64,
    beta: f64,
    kappa: f64,
    p_tx: f64,
    sigma_n2: f64,
}

impl Default for RawParams {
    fn default() -> Self {
        Self {
            lambda_bs: REFERENCE_LAMBDA,
            lambda_ue: 0.0,
            beta: 4.0,
            kappa: 1.0,
            p_tx: 1.0,
            sigma_n2: 0.0,
        }
    }
}

#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    values: Option<Vec<f64>>,
    start: Option<f64>,
    stop: Option<f64>,
    step: Option<f64>,
    db: Option<bool>,
    betas: Option<Vec<f64>>,
    ratios: Option<Vec<f64>>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawSim {
    n_bs_target: usize,
    n_realizations: usize,
    seed: u64,
    rayleigh_on_serving: bool,
    fading_on_interferers: bool,
    idle_mode: Option<bool>,
}

impl Default for RawSim {
    fn default() -> Self {
        let d = SimConfig::default();
        Self {
            n_bs_target: d.n_bs_target,
            n_realizations: d.n_realizations,
            seed: d.seed,
            rayleigh_on_serving: d.rayleigh_on_serving,
            fading_on_interferers: d.fading_on_interferers,
            idle_mode: None,
        }
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields, default)]
struct RawMgf {
    prefactor: f64,
    taylor_terms: usize,
}

impl Default for RawMgf {
    fn default() -> Self {
        Self {
            prefactor: 1.0,
            taylor_terms: 4,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MgfSettings {
    /// `πλ (L⁽⁰⁾/κ)^δ` at which the profile is drawn.
    pub prefactor: f64,
    pub taylor_terms: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub kind: ExperimentKind,
    pub params: NetworkParams<f64>,
    /// Axis values as written; `γ` in dB when `db` is set.
    pub grid: Vec<f64>,
    pub db: bool,
    /// Series over path-loss exponent (axis kinds other than `rate_vs_beta`).
    pub betas: Vec<f64>,
    /// Series over density ratio for `coverage_partial_load`.
    pub ratios: Vec<f64>,
    pub sim: Option<SimConfig>,
    pub mgf: MgfSettings,
    pub output_path: Option<PathBuf>,
}

impl ExperimentSpec {
    /// Linear axis values.
    pub fn axis_linear(&self) -> Vec<f64> {
        if self.db {
            self.grid.iter().map(|&v| 10f64.powf(v / 10.0)).collect()
        } else {
            self.grid.clone()
        }
    }
}

fn config_error(field: &str, message: impl Into<String>) -> CliError {
    CliError::Config {
        field: field.to_string(),
        message: message.into(),
    }
}

fn domain(field: &str, e: CoreError) -> CliError {
    config_error(field, e.to_string())
}

fn linspace_step(start: f64, stop: f64, step: f64) -> Result<Vec<f64>, CliError> {
    if step.is_nan() || step <= 0.0 {
        return Err(config_error("grid.step", format!("must be > 0, got {step}")));
    }
    if start.is_nan() || stop.is_nan() || stop < start {
        return Err(config_error("grid.stop", format!("must be >= grid.start, got {stop} < {start}")));
    }
    let n = ((stop - start) / step + 1e-9).floor() as usize;
    if n > 1_000_000 {
        return Err(config_error("grid.step", "grid would exceed 1e6 points"));
    }
    // 12 significant digits drop the accumulated representation error
    Ok((0..=n)
        .map(|i| {
            let v = start + step * i as f64;
            format!("{v:.12e}").parse().expect("formatted float parses")
        })
        .collect())
}

fn default_axis(kind: ExperimentKind) -> (Vec<f64>, bool) {
    let grid = |a, b, s| linspace_step(a, b, s).expect("static grid");
    match kind {
        ExperimentKind::CoverageVsGamma | ExperimentKind::CoveragePartialLoad => (grid(-10.0, 30.0, 1.0), true),
        ExperimentKind::RateVsBeta => (grid(2.5, 5.0, 0.1), false),
        ExperimentKind::PeakRateVsRatio | ExperimentKind::ActualRateVsRatio => (grid(0.1, 12.0, 0.1), false),
        ExperimentKind::MgfProfile => (grid(0.0, 20.0, 0.1), false),
        ExperimentKind::Validate => (Vec::new(), false),
    }
}

fn default_betas(kind: ExperimentKind) -> Vec<f64> {
    match kind {
        ExperimentKind::CoverageVsGamma | ExperimentKind::MgfProfile => vec![2.5, 3.0, 3.5, 4.0, 4.5, 5.0],
        ExperimentKind::CoveragePartialLoad => vec![4.0],
        _ => vec![3.0, 4.0, 5.0],
    }
}

fn check_increasing(field: &str, v: &[f64]) -> Result<(), CliError> {
    if v.is_empty() {
        return Err(config_error(field, "must not be empty"));
    }
    if let Some(x) = v.iter().find(|x| !x.is_finite()) {
        return Err(config_error(field, format!("non-finite value {x}")));
    }
    if let Some(w) = v.windows(2).find(|w| w[1] <= w[0]) {
        return Err(config_error(
            field,
            format!("must be strictly increasing, got {} then {}", w[0], w[1]),
        ));
    }
    Ok(())
}

fn check_betas(field: &str, v: &[f64]) -> Result<(), CliError> {
    check_increasing(field, v)?;
    for &b in v {
        NetworkParams::interference_limited(1.0, b).map_err(|e| domain(field, e))?;
    }
    Ok(())
}

/// Rejects Monte Carlo settings an experiment cannot use.
pub(crate) fn check_sim(kind: ExperimentKind, sim: Option<&SimConfig>) -> Result<(), CliError> {
    let Some(sim) = sim else { return Ok(()) };
    match kind {
        ExperimentKind::MgfProfile | ExperimentKind::Validate => Err(config_error(
            "sim",
            format!("{} has no Monte Carlo series", kind.as_str()),
        )),
        ExperimentKind::CoverageVsGamma | ExperimentKind::RateVsBeta if sim.idle_mode => Err(config_error(
            "sim.idle_mode",
            format!("{} is a fully loaded experiment", kind.as_str()),
        )),
        _ => Ok(()),
    }
}

/// Parses and validates a configuration held in memory.
pub fn parse_config_str(text: &str) -> Result<ExperimentSpec, CliError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| {
        let field = e
            .message()
            .split('`')
            .nth(1)
            .map(str::to_string)
            .unwrap_or_else(|| "config".to_string());
        let at = e
            .span()
            .map(|s| {
                let line = text[..s.start].matches('\n').count() + 1;
                format!(" (line {line})")
            })
            .unwrap_or_default();
        config_error(&field, format!("{}{at}", e.message().trim()))
    })?;
    build(raw)
}

pub fn parse_config(path: &Path) -> Result<ExperimentSpec, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| config_error("--config", format!("{}: {e}", path.display())))?;
    parse_config_str(&text)
}

/// Built-in experiment of `kind` with every default filled in.
pub fn default_spec(kind: ExperimentKind) -> ExperimentSpec {
    build(RawConfig {
        kind,
        output: None,
        params: RawParams::default(),
        grid: RawGrid::default(),
        sim: None,
        mgf: RawMgf::default(),
    })
    .expect("defaults are valid")
}

fn build(raw: RawConfig) -> Result<ExperimentSpec, CliError> {
    let kind = raw.kind;
    let p = raw.params;
    let params = NetworkParams::new(p.lambda_bs, p.lambda_ue, p.beta, p.kappa, p.p_tx, p.sigma_n2).map_err(|e| {
        let field = match &e {
            CoreError::Domain { what, .. } => format!("params.{what}"),
            _ => "params".to_string(),
        };
        domain(&field, e)
    })?;

    let g = raw.grid;
    let (grid, db) = match (&g.values, g.start, g.stop, g.step) {
        (Some(_), Some(_), _, _) | (Some(_), _, Some(_), _) | (Some(_), _, _, Some(_)) => {
            return Err(config_error("grid.values", "give either values or start/stop/step, not both"))
        }
        (Some(v), None, None, None) => (v.clone(), g.db.unwrap_or(false)),
        (None, Some(a), Some(b), Some(s)) => (linspace_step(a, b, s)?, g.db.unwrap_or(false)),
        (None, None, None, None) => {
            let (v, db) = default_axis(kind);
            (v, g.db.unwrap_or(db))
        }
        (None, ..) => return Err(config_error("grid.start", "start, stop and step must be given together")),
    };
    if kind != ExperimentKind::Validate {
        check_increasing("grid.values", &grid)?;
        match kind {
            ExperimentKind::RateVsBeta => check_betas("grid.values", &grid)?,
            ExperimentKind::PeakRateVsRatio | ExperimentKind::ActualRateVsRatio if grid[0] < 0.0 => {
                return Err(config_error("grid.values", "density ratios must be >= 0"))
            }
            ExperimentKind::MgfProfile if grid[0] < 0.0 => {
                return Err(config_error("grid.values", "load argument x must be >= 0"))
            }
            ExperimentKind::CoverageVsGamma | ExperimentKind::CoveragePartialLoad if !db && grid[0] < 0.0 => {
                return Err(config_error("grid.values", "linear thresholds must be >= 0 (set grid.db for dB)"))
            }
            _ => {}
        }
    }

    let betas = g.betas.unwrap_or_else(|| default_betas(kind));
    check_betas("grid.betas", &betas)?;
    let ratios = g.ratios.unwrap_or_else(|| IDLE_RATIOS.to_vec());
    check_increasing("grid.ratios", &ratios)?;
    if ratios[0] < 0.0 {
        return Err(config_error("grid.ratios", "density ratios must be >= 0"));
    }

    let sim = match raw.sim {
        None => None,
        Some(s) => {
            let idle_default = matches!(
                kind,
                ExperimentKind::CoveragePartialLoad | ExperimentKind::PeakRateVsRatio | ExperimentKind::ActualRateVsRatio
            );
            let cfg = SimConfig {
                n_bs_target: s.n_bs_target,
                n_realizations: s.n_realizations,
                seed: s.seed,
                rayleigh_on_serving: s.rayleigh_on_serving,
                fading_on_interferers: s.fading_on_interferers,
                idle_mode: s.idle_mode.unwrap_or(idle_default),
            };
            cfg.validate().map_err(|e| {
                let field = match &e {
                    CoreError::Domain { what, .. } => format!("sim.{what}"),
                    _ => "sim".to_string(),
                };
                domain(&field, e)
            })?;
            Some(cfg)
        }
    };

    check_sim(kind, sim.as_ref())?;
    if kind == ExperimentKind::CoveragePartialLoad && ratios[0] <= 0.0 {
        return Err(config_error("grid.ratios", "partial-load coverage needs ratios > 0"));
    }

    let m = raw.mgf;
    if !(m.prefactor > 0.0 && m.prefactor.is_finite()) {
        return Err(config_error("mgf.prefactor", format!("must be > 0, got {}", m.prefactor)));
    }
    if m.taylor_terms < 2 {
        return Err(config_error("mgf.taylor_terms", format!("must be >= 2, got {}", m.taylor_terms)));
    }

    Ok(ExperimentSpec {
        kind,
        params,
        grid,
        db,
        betas,
        ratios,
        sim,
        mgf: MgfSettings {
            prefactor: m.prefactor,
            taylor_terms: m.taylor_terms,
        },
        output_path: raw.output,
    })
}
