//! Runs each base algorithm (LinUCB, ε-greedy, LinTS, IGW) alone on the
//! realizable HLS representation and reports cumulative regret.
//!
//! ```bash
//! cargo run --release --example base_algorithms -- [horizon]
//! ```

use banditsrl::algos::{AlgoConfig, AlgoKind, BaseLearner};
use banditsrl::env::{make_single_rep, GeneratorConfig};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let horizon: u64 = std::env::args().nth(1).map_or(Ok(10_000), |s| s.parse())?;
    let inst = make_single_rep(0, 0.3, true, &GeneratorConfig::default())?;
    let rep = inst.rep(0);

    for kind in [AlgoKind::Linucb, AlgoKind::EpsGreedy, AlgoKind::Lints, AlgoKind::Igw] {
        let cfg = AlgoConfig::with_kind(kind);
        let mut learner = BaseLearner::new(&cfg, rep.dim(), cfg.delta)?;
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mut regret = 0.0;
        let mut checkpoints = Vec::new();
        for t in 1..=horizon {
            let x = inst.sample_context(&mut rng);
            let a = learner.choose(x, rep, &mut rng)?;
            let y = inst.step(x, a, &mut rng);
            learner.feed(rep.feature(x, a), y)?;
            regret += inst.gap(x, a);
            if t % (horizon / 5) == 0 {
                checkpoints.push(format!("R({t})={regret:.1}"));
            }
        }
        println!("{kind:<10} {}", checkpoints.join("  "));
    }
    Ok(())
}
