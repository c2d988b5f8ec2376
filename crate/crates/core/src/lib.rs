//! Phased representation selection for finite contextual linear bandits.
//!
//! The crate is organized bottom-up:
//!
//! - [`linalg`]: small dense symmetric linear algebra and recursive least squares.
//! - [`env`]: bandit instances, candidate representations and benchmark generators.
//! - [`algos`]: base algorithms (LinUCB, ε-greedy, LinTS, IGW) and the Leader rule.
//! - [`srl`]: the phased selection controller and the Leader baseline controller.
//! - [`harness`]: seeded experiment runner, results CSV and regret-regime statistics.

pub mod algos;
pub mod env;
pub mod harness;
pub mod linalg;
pub mod srl;
