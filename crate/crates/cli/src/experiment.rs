//! Experiment execution. Each kind produces one long-format table: one row
//! per (series, axis point), analytical columns first, Monte Carlo columns
//! appended when a `[sim]` section is present.

use std::io::Write;
use std::path::PathBuf;

use udn_rate::analytics::rate::MIN_P_ACTIVE;
use udn_rate::analytics::{load_model_from_ratio, pcov_with_noise, rate_closed_general, rate_peak, rate_quadrature};
use udn_rate::mgf::{mgf_approx, mgf_exact, mgf_rayleigh_marked, mgf_taylor_full, Branching};
use udn_rate::simulator::{estimate_rates, run_simulation, SimConfig, SimulationRun};
use udn_rate::{solve_c, Error as CoreError, NetworkParams, PcovKind};
use udn_rate_validation::{run_all, ValidationOptions};

use crate::config::{check_sim, ExperimentKind, ExperimentSpec};
use crate::error::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct RunOptions {
    pub jobs: usize,
}

impl Default for RunOptions {
    fn default() -> Self {
        Self {
            jobs: std::thread::available_parallelism().map_or(1, |n| n.get()),
        }
    }
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Overrides {
    pub seed: Option<u64>,
    pub realizations: Option<usize>,
    pub db: bool,
    pub out: Option<PathBuf>,
}

/// Applies `o` to `spec`. A seed or realization count switches on the Monte
/// Carlo series of experiments that have one.
pub fn apply_overrides(mut spec: ExperimentSpec, o: &Overrides) -> Result<ExperimentSpec, CliError> {
    if o.db {
        spec.db = true;
    }
    if o.out.is_some() {
        spec.output_path = o.out.clone();
    }
    let has_mc = !matches!(spec.kind, ExperimentKind::MgfProfile | ExperimentKind::Validate);
    if has_mc && (o.seed.is_some() || o.realizations.is_some()) {
        let mut sim = spec.sim.unwrap_or(SimConfig {
            idle_mode: matches!(
                spec.kind,
                ExperimentKind::CoveragePartialLoad | ExperimentKind::PeakRateVsRatio | ExperimentKind::ActualRateVsRatio
            ),
            ..SimConfig::default()
        });
        if let Some(seed) = o.seed {
            sim.seed = seed;
        }
        if let Some(n) = o.realizations {
            sim.n_realizations = n;
        }
        sim.validate().map_err(|e| CliError::Config {
            field: "--realizations".into(),
            message: e.to_string(),
        })?;
        spec.sim = Some(sim);
    }
    check_sim(spec.kind, spec.sim.as_ref())?;
    Ok(spec)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    fn new(header: &[&str]) -> Self {
        Self {
            header: header.iter().map(|s| s.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.header.iter().position(|h| h == name)
    }
}

pub fn write_csv<W: Write>(table: &Table, out: W) -> Result<(), CliError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(&table.header)?;
    for row in &table.rows {
        w.write_record(row)?;
    }
    w.flush()?;
    Ok(())
}

/// Shortest round-trip decimal, so output is byte-stable.
fn num(v: f64) -> String {
    format!("{v}")
}

fn opt(v: Option<f64>) -> String {
    v.map(num).unwrap_or_default()
}

fn gamma_db(g: f64) -> f64 {
    10.0 * g.log10()
}

fn with_beta(p: &NetworkParams<f64>, beta: f64) -> NetworkParams<f64> {
    NetworkParams { beta, ..*p }
}

fn simulate(p: &NetworkParams<f64>, betas: &[f64], sim: &SimConfig, opts: &RunOptions) -> Result<SimulationRun, CliError> {
    Ok(run_simulation(p, betas, sim, opts.jobs)?)
}

/// Runs one experiment and returns its table. `Validate` also reports
/// whether every criterion passed through the `passed` column.
pub fn run_experiment(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Table, CliError> {
    match spec.kind {
        ExperimentKind::CoverageVsGamma => coverage_vs_gamma(spec, opts),
        ExperimentKind::CoveragePartialLoad => coverage_partial_load(spec, opts),
        ExperimentKind::RateVsBeta => rate_vs_beta(spec, opts),
        ExperimentKind::PeakRateVsRatio | ExperimentKind::ActualRateVsRatio => rate_vs_ratio(spec, opts),
        ExperimentKind::MgfProfile => mgf_profile(spec),
        ExperimentKind::Validate => validate(spec, opts),
    }
}

fn coverage_header(mc: bool, partial: bool) -> Table {
    let mut h = vec!["beta"];
    if partial {
        h.extend(["ratio", "p_active"]);
    }
    h.extend(["gamma_db", "gamma", "pcov_exact", "pcov_approx"]);
    if mc {
        h.extend(["pcov_mc", "pcov_mc_stderr"]);
    }
    Table::new(&h)
}

fn coverage_rows(
    table: &mut Table,
    spec: &ExperimentSpec,
    prefix: &[String],
    beta: f64,
    p_active: f64,
    run: Option<&SimulationRun>,
) -> Result<(), CliError> {
    let c = solve_c(beta)?;
    let p = with_beta(&spec.params, beta);
    for g in spec.axis_linear() {
        let exact = pcov_with_noise(g, &p, p_active, PcovKind::Exact, Some(&c))?;
        let approx = pcov_with_noise(g, &p, p_active, PcovKind::Approx, Some(&c))?;
        let mut row = vec![num(beta)];
        row.extend_from_slice(prefix);
        row.extend([num(gamma_db(g)), num(g), num(exact), num(approx)]);
        if let Some(run) = run {
            let set = run.samples_for(beta).expect("simulated every beta");
            let (pc, se) = set.coverage(g)?;
            row.extend([num(pc), num(se)]);
        }
        table.rows.push(row);
    }
    Ok(())
}

fn coverage_vs_gamma(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Table, CliError> {
    let run = match &spec.sim {
        Some(sim) => Some(simulate(&spec.params, &spec.betas, sim, opts)?),
        None => None,
    };
    let mut table = coverage_header(run.is_some(), false);
    for &beta in &spec.betas {
        coverage_rows(&mut table, spec, &[], beta, 1.0, run.as_ref())?;
    }
    Ok(table)
}

fn idle_params(spec: &ExperimentSpec, ratio: f64) -> NetworkParams<f64> {
    NetworkParams {
        lambda_ue: ratio * spec.params.lambda_bs,
        ..spec.params
    }
}

fn coverage_partial_load(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Table, CliError> {
    let mut table = coverage_header(spec.sim.is_some(), true);
    for &ratio in &spec.ratios {
        let load = load_model_from_ratio(ratio)?;
        let run = match &spec.sim {
            Some(sim) => Some(simulate(&idle_params(spec, ratio), &spec.betas, sim, opts)?),
            None => None,
        };
        for &beta in &spec.betas {
            let prefix = [num(ratio), num(load.p_active)];
            coverage_rows(&mut table, spec, &prefix, beta, load.p_active, run.as_ref())?;
        }
    }
    Ok(table)
}

fn rate_vs_beta(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Table, CliError> {
    let mut h = vec!["beta", "rate_exact", "rate_approx", "rate_closed_form"];
    let run = match &spec.sim {
        Some(sim) => {
            h.extend(["rate_mc", "rate_mc_stderr"]);
            Some(simulate(&spec.params, &spec.grid, sim, opts)?)
        }
        None => None,
    };
    let mut table = Table::new(&h);
    for (i, &beta) in spec.grid.iter().enumerate() {
        let c = solve_c(beta)?;
        let exact = rate_quadrature(beta, 1.0, PcovKind::Exact)?.value;
        let approx = udn_rate::analytics::rate_quadrature_with(beta, 1.0, PcovKind::Approx, Some(&c))?.value;
        let closed = match rate_closed_general(beta, &c) {
            Ok(r) => Some(r.value),
            Err(CoreError::NearSingularity { .. }) => None,
            Err(e) => return Err(e.into()),
        };
        let mut row = vec![num(beta), num(exact), num(approx), opt(closed)];
        if let Some(run) = &run {
            let (peak, _) = estimate_rates(&run.sample_sets[i])?;
            row.extend([num(peak.value), num(peak.stderr)]);
        }
        table.rows.push(row);
    }
    Ok(table)
}

fn rate_vs_ratio(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Table, CliError> {
    let mut h = vec!["beta", "ratio", "p_active", "p_selection", "rate_peak", "rate_actual", "method"];
    if spec.sim.is_some() {
        h.extend([
            "rate_peak_mc",
            "rate_peak_mc_stderr",
            "rate_actual_mc",
            "rate_actual_mc_stderr",
            "no_interference_fraction",
        ]);
    }
    let mut table = Table::new(&h);
    let cs = spec.betas.iter().map(|&b| solve_c(b)).collect::<Result<Vec<_>, _>>()?;
    let mut rows: Vec<Vec<Vec<String>>> = vec![Vec::new(); spec.betas.len()];
    for &ratio in &spec.grid {
        let load = load_model_from_ratio(ratio)?;
        let run = match &spec.sim {
            Some(sim) => Some(simulate(&idle_params(spec, ratio), &spec.betas, sim, opts)?),
            None => None,
        };
        for (j, (&beta, c)) in spec.betas.iter().zip(&cs).enumerate() {
            let (peak, method) = if load.p_active < MIN_P_ACTIVE {
                (f64::INFINITY, "no_interference")
            } else {
                let r = rate_peak(beta, load.p_active, c)?;
                (r.value, r.method.as_str())
            };
            let mut row = vec![
                num(beta),
                num(ratio),
                num(load.p_active),
                num(load.p_selection),
                num(peak),
                num(peak * load.p_selection),
                method.to_string(),
            ];
            if let Some(run) = &run {
                let set = &run.sample_sets[j];
                let (p, a) = estimate_rates(set)?;
                row.extend([
                    num(p.value),
                    num(p.stderr),
                    num(a.value),
                    num(a.stderr),
                    num(set.no_interference_fraction()),
                ]);
            }
            rows[j].push(row);
        }
    }
    table.rows = rows.into_iter().flatten().collect();
    Ok(table)
}

fn mgf_profile(spec: &ExperimentSpec) -> Result<Table, CliError> {
    let taylor = format!("mgf_taylor_{}", spec.mgf.taylor_terms);
    let mut table = Table::new(&[
        "beta",
        "x",
        "s",
        "mgf_exact",
        "mgf_approx",
        &taylor,
        "mgf_rayleigh_marked",
        "rel_err_approx",
    ]);
    for &beta in &spec.betas {
        let p = with_beta(&spec.params, beta);
        let c = solve_c(beta)?;
        let l0 = p.l0_for_prefactor(spec.mgf.prefactor);
        for &x in &spec.grid {
            let s = x * l0 / p.p_tx;
            let exact = mgf_exact(s, l0, &p)?;
            let approx = mgf_approx(s, l0, &p, &c)?;
            let t = mgf_taylor_full(s, l0, &p, spec.mgf.taylor_terms, &c, Branching::Piecewise)?;
            let marked = mgf_rayleigh_marked(s, l0, &p)?;
            table.rows.push(vec![
                num(beta),
                num(x),
                num(s),
                num(exact),
                num(approx),
                num(t),
                num(marked),
                num((approx - exact).abs() / exact),
            ]);
        }
    }
    Ok(table)
}

fn validate(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Table, CliError> {
    let vopts = ValidationOptions {
        seed: spec.sim.map_or(ValidationOptions::default().seed, |s| s.seed),
        jobs: opts.jobs,
    };
    let mut table = Table::new(&["id", "criterion", "passed", "elapsed_s", "budget_s", "detail"]);
    for o in run_all(&vopts) {
        table.rows.push(vec![
            o.id.to_string(),
            o.title.to_string(),
            o.passed.to_string(),
            format!("{:.3}", o.elapsed.as_secs_f64()),
            o.budget.as_secs().to_string(),
            o.detail,
        ]);
    }
    Ok(table)
}

/// Raw per-realization samples: one row per realization and exponent.
pub fn simulate_samples(spec: &ExperimentSpec, opts: &RunOptions) -> Result<Table, CliError> {
    let betas = if spec.kind == ExperimentKind::RateVsBeta {
        &spec.grid
    } else {
        &spec.betas
    };
    let sim = spec.sim.unwrap_or(SimConfig {
        idle_mode: spec.params.lambda_ue > 0.0,
        ..SimConfig::default()
    });
    let run = simulate(&spec.params, betas, &sim, opts)?;
    let mut table = Table::new(&["realization_id", "beta", "sir", "n_users", "n_active_bs"]);
    for set in &run.sample_sets {
        for i in 0..set.len() {
            table.rows.push(vec![
                set.realization_ids[i].to_string(),
                num(set.beta),
                num(set.sir_values[i]),
                set.n_users_in_cell[i].to_string(),
                set.n_active_bs[i].to_string(),
            ]);
        }
    }
    Ok(table)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::config::{default_spec, parse_config_str};

    fn col(t: &Table, name: &str) -> Vec<f64> {
        let i = t.column(name).unwrap();
        t.rows.iter().map(|r| r[i].parse().unwrap()).collect()
    }

    #[test]
    fn coverage_curves_overlap() {
        let t = run_experiment(&default_spec(ExperimentKind::CoverageVsGamma), &RunOptions { jobs: 1 }).unwrap();
        assert_eq!(t.rows.len(), 6 * 41);
        let e = col(&t, "pcov_exact");
        let a = col(&t, "pcov_approx");
        let gap = e.iter().zip(&a).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max);
        assert!(gap <= 0.02, "{gap}");
    }

    #[test]
    fn rate_table_leaves_singular_closed_form_empty() {
        let spec = parse_config_str("kind = \"rate_vs_beta\"\n[grid]\nvalues = [3.0, 4.35, 5.0]\n").unwrap();
        let t = run_experiment(&spec, &RunOptions { jobs: 1 }).unwrap();
        let i = t.column("rate_closed_form").unwrap();
        assert!(t.rows[1][i].is_empty());
        assert!(!t.rows[0][i].is_empty());
        let exact = col(&t, "rate_exact");
        assert!((exact[0] - 0.829_489_013_005_294_9).abs() < 1e-8);
    }

    #[test]
    fn zero_ratio_reports_no_interference() {
        let spec = parse_config_str("kind = \"peak_rate_vs_ratio\"\n[grid]\nvalues = [0.0, 1.0]\nbetas = [4.0]\n").unwrap();
        let t = run_experiment(&spec, &RunOptions { jobs: 1 }).unwrap();
        let m = t.column("method").unwrap();
        assert_eq!(t.rows[0][m], "no_interference");
        assert_eq!(t.rows[0][t.column("rate_peak").unwrap()], "inf");
        assert_eq!(t.rows[1][m], "quadrature");
    }

    #[test]
    fn actual_rate_is_peak_times_selection() {
        let t = run_experiment(&default_spec(ExperimentKind::ActualRateVsRatio), &RunOptions { jobs: 1 }).unwrap();
        let (p, s, a) = (col(&t, "rate_peak"), col(&t, "p_selection"), col(&t, "rate_actual"));
        for i in 0..t.rows.len() {
            assert_eq!(a[i], p[i] * s[i]);
        }
    }

    #[test]
    fn overrides_enable_monte_carlo() {
        let spec = default_spec(ExperimentKind::RateVsBeta);
        let o = Overrides {
            seed: Some(4),
            realizations: Some(200),
            ..Overrides::default()
        };
        let s = apply_overrides(spec, &o).unwrap();
        let sim = s.sim.unwrap();
        assert_eq!((sim.seed, sim.n_realizations, sim.idle_mode), (4, 200, false));
        let mgf = apply_overrides(default_spec(ExperimentKind::MgfProfile), &o).unwrap();
        assert!(mgf.sim.is_none());
        let bad = Overrides {
            realizations: Some(0),
            ..Overrides::default()
        };
        assert!(apply_overrides(default_spec(ExperimentKind::RateVsBeta), &bad).is_err());
    }

    #[test]
    fn mgf_profile_starts_at_one() {
        let spec = parse_config_str("kind = \"mgf_profile\"\n[grid]\nvalues = [0.0, 1.0]\nbetas = [4.0]\n").unwrap();
        let t = run_experiment(&spec, &RunOptions { jobs: 1 }).unwrap();
        assert_eq!(t.header[5], "mgf_taylor_4");
        for name in ["mgf_exact", "mgf_approx", "mgf_taylor_4", "mgf_rayleigh_marked"] {
            assert_eq!(col(&t, name)[0], 1.0);
        }
        // unit prefactor, x = 1: exp(1 − ₁F₁(−1/2; 1/2; −1))
        assert!((col(&t, "mgf_exact")[1] - 0.422_516_108).abs() < 1e-8);
    }
}
