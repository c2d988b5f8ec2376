//! Runs a configuration through the harness in parallel, writes the results
//! CSV, reads it back and recomputes the regime statistics from the rows
//! alone — the same path the `srl run` / `srl stats` subcommands take.
//!
//! ```bash
//! cargo run --release --example experiment_csv -- [config.json]
//! ```
//!
//! Without a config a short ε-greedy run on the no-HLS benchmark is used.

use std::path::Path;

use banditsrl::algos::{AlgoConfig, AlgoKind};
use banditsrl::harness::{fit_regime, read_csv, run_experiment, Benchmark, GroundTruth, RunConfig, RunOptions};
use banditsrl::srl::SrlConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut cfg = match std::env::args().nth(1) {
        Some(path) => RunConfig::load(Path::new(&path))?,
        None => {
            let mut c = RunConfig::new(
                Benchmark::VaryingDimNoHls,
                AlgoConfig::with_kind(AlgoKind::EpsGreedy),
                Some(SrlConfig::default()),
            );
            c.n_runs = 4;
            c.horizon = 10_000;
            c
        }
    };
    let dir = std::env::temp_dir().join("banditsrl-example");
    std::fs::create_dir_all(&dir)?;
    let csv = dir.join("results.csv");
    cfg.out_path = csv.to_string_lossy().into_owned();

    let exp = run_experiment(&cfg, RunOptions { workers: 4, full_trace: false })?;
    println!("wrote {} rows to {}", exp.records().count(), csv.display());

    let rows = read_csv(&csv)?;
    let stats = fit_regime(&rows, cfg.horizon, cfg.log_every, &GroundTruth::from_instance(&exp.instance));
    assert_eq!(stats, exp.stats);
    println!("{}", serde_json::to_string_pretty(&stats)?);
    Ok(())
}
