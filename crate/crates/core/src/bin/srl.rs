//! Command-line front end: run experiments, generate and analyze instances,
//! recompute statistics from a results CSV.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use banditsrl::env::{analyze_all, BanditInstance, GeneratorConfig};
use banditsrl::harness::{self, Benchmark, GroundTruth, RunConfig, RunOptions};

#[derive(Parser)]
#[command(name = "srl", version, about = "Representation selection for contextual linear bandits")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a run config; writes the CSV and prints summary JSON.
    Run {
        /// JSON run config.
        #[arg(long)]
        config: PathBuf,
        /// Override the master seed.
        #[arg(long)]
        seed: Option<u64>,
        /// Override the CSV output path.
        #[arg(long)]
        out: Option<PathBuf>,
        /// Override the horizon.
        #[arg(long)]
        horizon: Option<u64>,
        /// Override the number of runs.
        #[arg(long)]
        runs: Option<u32>,
        /// Override the logging cadence.
        #[arg(long)]
        log_every: Option<u64>,
        /// Worker threads (output does not depend on this).
        #[arg(long, default_value_t = 1)]
        workers: usize,
    },
    /// Write a benchmark instance as JSON.
    Gen {
        #[arg(long)]
        benchmark: Benchmark,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Reward noise scale.
        #[arg(long, default_value_t = 0.3)]
        sigma: f64,
        #[arg(long)]
        out: PathBuf,
    },
    /// Print one spectral report (JSON line) per representation.
    Analyze {
        #[arg(long)]
        instance: PathBuf,
    },
    /// Recompute statistics from a results CSV.
    Stats {
        /// Results CSV.
        #[arg(long = "in")]
        input: PathBuf,
        /// Run config; supplies horizon, cadence and ground-truth labels.
        #[arg(long)]
        config: Option<PathBuf>,
        /// Override the config's seed (use the one the run used).
        #[arg(long)]
        seed: Option<u64>,
        /// Horizon when no config is given (default: largest logged t).
        #[arg(long)]
        horizon: Option<u64>,
        /// Logging cadence when no config is given.
        #[arg(long, default_value_t = 100)]
        log_every: u64,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<(), Box<dyn std::error::Error>> {
    match cli.command {
        Command::Run {
            config,
            seed,
            out,
            horizon,
            runs,
            log_every,
            workers,
        } => {
            let mut cfg = RunConfig::load(&config)?;
            if let Some(s) = seed {
                cfg.seed = s;
            }
            if let Some(p) = out {
                cfg.out_path = p.to_string_lossy().into_owned();
            }
            if let Some(h) = horizon {
                cfg.horizon = h;
            }
            if let Some(n) = runs {
                cfg.n_runs = n;
            }
            if let Some(l) = log_every {
                cfg.log_every = l;
            }
            let exp = harness::run_experiment(
                &cfg,
                RunOptions {
                    workers,
                    full_trace: false,
                },
            )?;
            println!("{}", serde_json::to_string_pretty(&exp.stats)?);
        }
        Command::Gen {
            benchmark,
            seed,
            sigma,
            out,
        } => {
            let inst = benchmark.build(seed, sigma, &GeneratorConfig::default())?;
            inst.save(&out)?;
        }
        Command::Analyze { instance } => {
            let inst = BanditInstance::load(&instance)?;
            for report in analyze_all(&inst) {
                println!("{}", serde_json::to_string(&report)?);
            }
        }
        Command::Stats {
            input,
            config,
            seed,
            horizon,
            log_every,
        } => {
            let records = harness::read_csv(&input)?;
            let (horizon, log_every, truth) = match config {
                Some(path) => {
                    let mut cfg = RunConfig::load(&path)?;
                    if let Some(s) = seed {
                        cfg.seed = s;
                    }
                    let truth = GroundTruth::from_instance(&cfg.instance()?);
                    (horizon.unwrap_or(cfg.horizon), cfg.log_every, truth)
                }
                None => {
                    let t_max = records.iter().map(|r| r.t).max().unwrap_or(1);
                    (horizon.unwrap_or(t_max), log_every, GroundTruth::default())
                }
            };
            let stats = harness::fit_regime(&records, horizon, log_every, &truth);
            println!("{}", serde_json::to_string_pretty(&stats)?);
        }
    }
    Ok(())
}
