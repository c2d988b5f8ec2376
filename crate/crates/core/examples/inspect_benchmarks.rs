//! Generates every benchmark instance and prints the spectral report of each
//! candidate representation: dimension, `λ*`, HLS / weak-HLS status and the
//! best achievable fit error.
//!
//! ```bash
//! cargo run --example inspect_benchmarks -- [seed] [out.json]
//! ```
//!
//! With an output path, the varying-dimension instance is also saved as JSON.

use std::path::Path;

use banditsrl::env::{analyze_all, GeneratorConfig};
use banditsrl::harness::Benchmark;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().map_or(Ok(0), |s| s.parse())?;
    let out = args.next();

    for bench in Benchmark::ALL {
        let inst = bench.build(seed, 0.3, &GeneratorConfig::default())?;
        println!(
            "{:?}: {} contexts × {} actions, min gap {:.3}, {} candidates ({} realizable)",
            bench,
            inst.n_contexts(),
            inst.n_actions(),
            inst.min_gap(),
            inst.reps().len(),
            inst.star_ids().len()
        );
        for (k, r) in analyze_all(&inst).iter().enumerate() {
            println!(
                "  {:<14} d={:<3} λ*={:<9.2e} hls={:<5} weak_hls={:<5} realizable={:<5} fit_error={:.2e}",
                r.rep_id,
                r.dim,
                r.lambda_star,
                r.is_hls,
                r.is_weak_hls,
                inst.is_realizable(k),
                r.fit_error
            );
        }
    }

    if let Some(path) = out {
        let inst = Benchmark::VaryingDim.build(seed, 0.3, &GeneratorConfig::default())?;
        inst.save(Path::new(&path))?;
        println!("saved varying_dim instance to {path}");
    }
    Ok(())
}
