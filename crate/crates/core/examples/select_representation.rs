//! Drives the phased selection controller step by step on the
//! varying-dimension benchmark and prints what happens at every phase
//! boundary: the surviving candidates, the selected representation and
//! whether the likelihood-ratio test has started to fire.
//!
//! ```bash
//! cargo run --release --example select_representation -- [horizon] [eig|weak|weak_norm|bic]
//! ```

use banditsrl::algos::{AlgoConfig, AlgoKind};
use banditsrl::env::{make_varying_dimension, GeneratorConfig};
use banditsrl::srl::{LossKind, SrlConfig, SrlController};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut args = std::env::args().skip(1);
    let horizon: u64 = args.next().map_or(Ok(30_000), |s| s.parse())?;
    let loss: LossKind = serde_json::from_value(args.next().unwrap_or("eig".into()).into())?;

    let inst = make_varying_dimension(0, 0.3, &GeneratorConfig::default())?;
    let algo = AlgoConfig::with_kind(AlgoKind::Linucb);
    let cfg = SrlConfig { loss, ..SrlConfig::default() };
    let mut ctl = SrlController::new(&inst, &algo, &cfg)?;
    let mut rng = ChaCha8Rng::seed_from_u64(0);

    let (mut regret, mut triggered) = (0.0, 0u64);
    for t in 1..=horizon {
        let x = inst.sample_context(&mut rng);
        let d = ctl.decide(&inst, x, &mut rng)?;
        let y = inst.step(x, d.action, &mut rng);
        regret += inst.gap(x, d.action);
        triggered += d.glrt_triggered as u64;
        if let Some(b) = ctl.observe(&inst, x, d.action, y, d.glrt_triggered)? {
            let names: Vec<&str> = b.active_set.iter().map(|&k| inst.rep(k).id()).collect();
            println!(
                "t={t:<6} phase {:<2} selected {:<10} |Φ_t|={:<2} regret {regret:>8.1} glrt share {:.2}  {:?}",
                b.phase,
                b.selected.map_or("-", |k| inst.rep(k).id()),
                b.active_set.len(),
                triggered as f64 / t as f64,
                names
            );
        }
    }
    println!("final regret {regret:.1}");
    Ok(())
}
