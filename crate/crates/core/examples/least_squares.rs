//! The numerical building blocks: incremental ridge regression with a
//! maintained inverse, symmetric minimum eigenvalues, and least squares
//! constrained to a Euclidean ball.
//!
//! ```bash
//! cargo run --example least_squares
//! ```

use banditsrl::linalg::{self, constrained_ls, RlsState, SymMatrix};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let truth = [0.8, -0.4, 0.2];

    // Stream noisy observations into a ridge estimator.
    let mut rls = RlsState::new(3, 1.0)?;
    let mut data = Vec::new();
    for _ in 0..2000 {
        let phi: Vec<f64> = (0..3).map(|_| rng.random_range(-1.0..1.0)).collect();
        let y = linalg::dot(&phi, &truth) + 0.1 * rng.random_range(-1.0..1.0);
        rls.update(&phi, y)?;
        data.push((phi, y));
    }
    println!("ridge estimate      {:?}", rls.theta());
    println!("inverse residual    {:.2e}", rls.v().inverse_residual(rls.v_inv()));
    println!("λ_min(V - λI)       {:.3}", linalg::min_eigenvalue(&rls.gram(), 1e-12));

    // The same data fitted inside balls of shrinking radius.
    for bound in [2.0, 0.5, 0.1] {
        let fit = constrained_ls(&data, bound, 1e-9, 1e-10)?;
        println!(
            "ball ‖θ‖ ≤ {bound:<4}  θ = {:?}  mse = {:.4}  on boundary = {}",
            fit.theta.iter().map(|v| (v * 1e4).round() / 1e4).collect::<Vec<_>>(),
            fit.mse,
            fit.on_boundary
        );
    }

    let m = SymMatrix::from_rows(&[vec![2.0, 1.0], vec![1.0, 2.0]])?;
    println!("λ_min([[2,1],[1,2]]) = {}", linalg::min_eigenvalue(&m, 1e-12));
    Ok(())
}
