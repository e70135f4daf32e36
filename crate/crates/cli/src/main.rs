//! `resonant`: batch experiments for frequency-selective global control.

mod config;
mod error;
mod experiments;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, ValueEnum};

use config::LoadedConfig;
use error::{CliError, CliResult};
use experiments::{RunContext, RunResult};
use output::{sha256_hex, Manifest};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Verb {
    /// Level statistics and line table of a model.
    Spectrum,
    /// Propagate a state under a pulse schedule.
    Evolve,
    /// Compile a circuit and score it at each γ_eff.
    Gate,
    /// Full versus rotating-wave infidelity across γ_eff.
    RwaScan,
    /// Selectivity time and minimum line gap scaling.
    SelectivityScaling,
    /// Spacing-ratio ensembles, integrable versus GOE.
    ChaosCompare,
}

impl Verb {
    fn name(self) -> &'static str {
        match self {
            Verb::Spectrum => "spectrum",
            Verb::Evolve => "evolve",
            Verb::Gate => "gate",
            Verb::RwaScan => "rwa-scan",
            Verb::SelectivityScaling => "selectivity-scaling",
            Verb::ChaosCompare => "chaos-compare",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "resonant", version, about = "Frequency-selective control experiments")]
struct Cli {
    #[arg(value_enum)]
    verb: Verb,
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Output directory; created if missing.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads for sweep points (default: all cores).
    #[arg(long)]
    jobs: Option<usize>,
    /// First seed; replaces the config seeds with consecutive values.
    #[arg(long)]
    seed: Option<u64>,
    /// Integrator tolerance, overriding the config.
    #[arg(long)]
    tol: Option<f64>,
}

fn run(cli: &Cli) -> CliResult<RunResult> {
    if let Some(jobs) = cli.jobs {
        if jobs == 0 {
            return Err(CliError::config("--jobs", "must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| CliError::config("--jobs", e.to_string()))?;
    }
    let mut loaded = LoadedConfig::load(&cli.config)?;
    loaded.config.check_kind(cli.verb.name())?;
    let ctx = RunContext {
        seed: cli.seed,
        tol: cli.tol,
    };
    let started = Instant::now();
    let mut result = match cli.verb {
        Verb::Spectrum => experiments::spectrum(&mut loaded, &ctx),
        Verb::Evolve => experiments::evolve(&mut loaded, &ctx),
        Verb::Gate => experiments::gate(&mut loaded, &ctx),
        Verb::RwaScan => experiments::rwa_scan(&mut loaded, &ctx),
        Verb::SelectivityScaling => experiments::selectivity_scaling(&mut loaded, &ctx),
        Verb::ChaosCompare => experiments::chaos_compare(&mut loaded, &ctx),
    }?;
    let manifest = Manifest {
        tool: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
        experiment: cli.verb.name().to_string(),
        config: cli.config.clone(),
        config_sha256: sha256_hex(&loaded.bytes),
        inputs: loaded.inputs.iter().map(|(p, b)| (p.clone(), sha256_hex(b))).collect(),
        seeds: result.seeds.clone(),
        tol: cli.tol.or(loaded.config.tol),
        jobs: cli.jobs,
        wall_clock_seconds: started.elapsed().as_secs_f64(),
    };
    let outputs = std::mem::take(&mut result.outputs);
    for name in outputs.names() {
        log::info!("writing {}", cli.out.join(name).display());
    }
    output::commit(&cli.out, outputs, &manifest)?;
    Ok(result)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(result) => {
            if !result.summary.is_empty() {
                println!("{}", result.summary);
            }
            println!("results written to {}", cli.out.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
