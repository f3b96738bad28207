use std::fs::File;
use std::io::{self, BufWriter};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use udn_rate_cli::{
    apply_overrides, default_spec, parse_config, run_experiment, simulate_samples, write_csv, CliError,
    ExperimentKind, ExperimentSpec, Overrides, RunOptions, Table,
};

#[derive(Parser)]
#[command(name = "udn-rate", version, about = "Coverage and rate curves for Poisson cellular networks, as CSV")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Coverage probability versus SIR threshold (fully loaded or partial load).
    Coverage(Common),
    /// Fully loaded ergodic rate versus path-loss exponent.
    Rate(Common),
    /// Peak and per-user rate versus user/base-station density ratio.
    LoadCurves(Common),
    /// Interference MGF in every evaluation mode.
    Mgf(Common),
    /// Raw Monte Carlo samples, one row per realization and exponent.
    Simulate(Common),
    /// Runs the acceptance suite and prints a pass/fail table.
    Validate(Common),
}

#[derive(Args)]
struct Common {
    /// Experiment file (TOML); built-in defaults when omitted.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Monte Carlo seed; also enables the Monte Carlo series.
    #[arg(long)]
    seed: Option<u64>,
    /// Output CSV path; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads for the simulator.
    #[arg(long)]
    jobs: Option<usize>,
    /// Read the SIR-threshold grid in dB.
    #[arg(long)]
    db: bool,
    /// Monte Carlo realizations; also enables the Monte Carlo series.
    #[arg(long)]
    realizations: Option<usize>,
}

fn load(common: &Common, allowed: &[ExperimentKind]) -> Result<ExperimentSpec, CliError> {
    let spec = match &common.config {
        Some(path) => parse_config(path)?,
        None => default_spec(allowed[0]),
    };
    if !allowed.contains(&spec.kind) {
        let names: Vec<&str> = allowed.iter().map(|k| k.as_str()).collect();
        return Err(CliError::Config {
            field: "kind".into(),
            message: format!("`{}` is not valid for this subcommand (expected {})", spec.kind.as_str(), names.join(" or ")),
        });
    }
    apply_overrides(
        spec,
        &Overrides {
            seed: common.seed,
            realizations: common.realizations,
            db: common.db,
            out: common.out.clone(),
        },
    )
}

fn options(common: &Common) -> Result<RunOptions, CliError> {
    match common.jobs {
        Some(0) => Err(CliError::Config {
            field: "--jobs".into(),
            message: "must be >= 1".into(),
        }),
        Some(jobs) => Ok(RunOptions { jobs }),
        None => Ok(RunOptions::default()),
    }
}

fn emit(table: &Table, spec: &ExperimentSpec) -> Result<(), CliError> {
    match &spec.output_path {
        Some(path) => write_csv(table, BufWriter::new(File::create(path)?)),
        None => write_csv(table, io::stdout().lock()),
    }
}

fn run(cli: Cli) -> Result<bool, CliError> {
    use ExperimentKind::*;
    let (common, allowed): (&Common, &[ExperimentKind]) = match &cli.command {
        Command::Coverage(c) => (c, &[CoverageVsGamma, CoveragePartialLoad]),
        Command::Rate(c) => (c, &[RateVsBeta]),
        Command::LoadCurves(c) => (c, &[PeakRateVsRatio, ActualRateVsRatio]),
        Command::Mgf(c) => (c, &[MgfProfile]),
        Command::Simulate(c) => (
            c,
            &[RateVsBeta, CoverageVsGamma, CoveragePartialLoad, PeakRateVsRatio, ActualRateVsRatio],
        ),
        Command::Validate(c) => (c, &[Validate]),
    };
    let spec = load(common, allowed)?;
    let opts = options(common)?;
    match cli.command {
        Command::Simulate(_) => {
            emit(&simulate_samples(&spec, &opts)?, &spec)?;
            Ok(true)
        }
        Command::Validate(_) => {
            let table = run_experiment(&spec, &opts)?;
            let passed = table.column("passed").expect("validate table has a passed column");
            for row in &table.rows {
                let verdict = if row[passed] == "true" { "PASS" } else { "FAIL" };
                eprintln!("{verdict} {:>2} {:<30} {:>8} s  {}", row[0], row[1], row[3], row[5]);
            }
            if spec.output_path.is_some() {
                emit(&table, &spec)?;
            }
            Ok(table.rows.iter().all(|r| r[passed] == "true"))
        }
        _ => {
            emit(&run_experiment(&spec, &opts)?, &spec)?;
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("udn-rate: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
