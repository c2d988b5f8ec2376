//! Scales the likelihood-ratio threshold (`alpha_glrt`) on the
//! varying-dimension benchmark. `0` disables the test, so the base algorithm
//! keeps exploring forever; larger values make the test more conservative.
//!
//! ```bash
//! cargo run --release --example glrt_ablation -- [eps_greedy|linucb|lints|igw] [runs]
//! ```

use banditsrl::algos::{AlgoConfig, AlgoKind};
use banditsrl::harness::{run_experiment, Benchmark, RunConfig, RunOptions};
use banditsrl::srl::SrlConfig;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let kind: AlgoKind = serde_json::from_value(args.next().unwrap_or("eps_greedy".into()).into())?;
    let runs: u32 = args.next().map_or(Ok(3), |s| s.parse())?;

    for alpha_glrt in [0.0, 1.0, 5.0] {
        let srl = SrlConfig { alpha_glrt, ..SrlConfig::default() };
        let mut cfg = RunConfig::new(Benchmark::VaryingDim, AlgoConfig::with_kind(kind), Some(srl));
        cfg.n_runs = runs;
        let s = run_experiment(&cfg, RunOptions::default())?.stats;
        println!(
            "{kind} alpha_glrt={alpha_glrt:<3} regret {:>8.1}  tail growth {:>7.1}  slope {:.3}  glrt tail rate {:.3}",
            s.final_regret_mean, s.tail_growth_mean, s.loglog_slope, s.glrt_tail_rate_mean
        );
    }
    Ok(())
}
