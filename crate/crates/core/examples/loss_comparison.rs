//! Compares the selection losses on the weak-HLS benchmark, where the only
//! HLS candidate has been padded with constant coordinates: the
//! minimum-eigenvalue loss cannot see through the padding, the weak losses
//! can.
//!
//! ```bash
//! cargo run --release --example loss_comparison -- [runs] [horizon]
//! ```

use banditsrl::algos::{AlgoConfig, AlgoKind};
use banditsrl::harness::{run_experiment, Benchmark, RunConfig, RunOptions};
use banditsrl::srl::{LossKind, SrlConfig};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let runs: u32 = args.next().map_or(Ok(3), |s| s.parse())?;
    let horizon: u64 = args.next().map_or(Ok(30_000), |s| s.parse())?;

    println!("{:<10} {:>12} {:>12} {:>8}  lock times", "loss", "final", "tail", "slope");
    for loss in [LossKind::Eig, LossKind::Weak, LossKind::WeakNorm, LossKind::Bic] {
        let srl = SrlConfig { loss, ..SrlConfig::default() };
        let mut cfg = RunConfig::new(Benchmark::WeakHls, AlgoConfig::with_kind(AlgoKind::Linucb), Some(srl));
        cfg.n_runs = runs;
        cfg.horizon = horizon;
        let s = run_experiment(&cfg, RunOptions::default())?.stats;
        let locks: Vec<String> = s
            .runs
            .iter()
            .map(|r| r.hls_lock_time.map_or("never".into(), |t| t.to_string()))
            .collect();
        println!(
            "{:<10} {:>12.1} {:>12.1} {:>8.3}  {}",
            format!("{loss:?}"),
            s.final_regret_mean,
            s.tail_growth_mean,
            s.loglog_slope,
            locks.join(",")
        );
    }
    Ok(())
}
