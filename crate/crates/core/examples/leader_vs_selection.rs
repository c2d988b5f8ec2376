//! On the mixing benchmark no single candidate is HLS but their mixture is.
//! The Leader rule, which plays the action maximizing the tightest upper
//! bound across all surviving candidates, can exploit the mixture; selecting
//! one representation cannot.
//!
//! ```bash
//! cargo run --release --example leader_vs_selection -- [runs] [horizon]
//! ```

use banditsrl::algos::{AlgoConfig, AlgoKind};
use banditsrl::harness::{run_experiment, Benchmark, RunConfig, RunOptions};
use banditsrl::srl::SrlConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let runs: u32 = args.next().map_or(Ok(5), |s| s.parse())?;
    let horizon: u64 = args.next().map_or(Ok(30_000), |s| s.parse())?;

    for (name, kind, srl) in [
        ("leader", AlgoKind::Leader, None),
        ("selection+linucb", AlgoKind::Linucb, Some(SrlConfig::default())),
    ] {
        let mut cfg = RunConfig::new(Benchmark::Mixing, AlgoConfig::with_kind(kind), srl);
        cfg.n_runs = runs;
        cfg.horizon = horizon;
        let s = run_experiment(&cfg, RunOptions::default())?.stats;
        let finals: Vec<String> = s.runs.iter().map(|r| format!("{:.0}", r.final_regret)).collect();
        println!(
            "{name:<18} mean regret {:>7.1} ± {:<6.1} tail growth {:>6.1}  per run [{}]",
            s.final_regret_mean,
            s.final_regret_std,
            s.tail_growth_mean,
            finals.join(", ")
        );
    }
    Ok(())
}
