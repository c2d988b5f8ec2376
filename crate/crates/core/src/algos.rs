//! Fixed-representation base algorithms and the Leader action rule.
//!
//! Every rule reads a representation and a [`RlsState`] and returns an
//! action index; ties always go to the lowest index. [`BaseLearner`] wraps
//! one rule with its own least-squares state behind a choose/feed interface.

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::env::{argmax, Representation};
use crate::linalg::{self, Cholesky, LinalgError, RlsState};

#[derive(Debug, Error)]
pub enum AlgoError {
    #[error("invalid algorithm config: {0}")]
    Config(String),
    #[error("invalid action distribution: {0}")]
    Distribution(String),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, AlgoError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AlgoKind {
    Linucb,
    EpsGreedy,
    Lints,
    Igw,
    Leader,
}

impl std::fmt::Display for AlgoKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = match self {
            AlgoKind::Linucb => "linucb",
            AlgoKind::EpsGreedy => "eps_greedy",
            AlgoKind::Lints => "lints",
            AlgoKind::Igw => "igw",
            AlgoKind::Leader => "leader",
        };
        f.write_str(name)
    }
}

/// Hyperparameters of the base algorithms.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct AlgoConfig {
    pub kind: AlgoKind,
    /// Confidence level in `(0, 1)`.
    pub delta: f64,
    /// Noise scale used in confidence widths (and by the simulator).
    pub sigma: f64,
    /// Ridge regularization.
    pub lambda: f64,
    /// Multiplier on the self-normalized part of the UCB width.
    pub alpha_ucb: f64,
    /// `ε_t = t^{-eps_exponent}`.
    pub eps_exponent: f64,
    pub igw_gamma1: f64,
    pub igw_gamma2: f64,
    /// Refit the IGW estimate every step (otherwise frozen per phase).
    pub igw_refit: bool,
}

impl Default for AlgoConfig {
    fn default() -> Self {
        Self {
            kind: AlgoKind::Linucb,
            delta: 0.01,
            sigma: 0.3,
            lambda: 1.0,
            alpha_ucb: 1.0,
            eps_exponent: 1.0 / 3.0,
            igw_gamma1: 10.0,
            igw_gamma2: 1.0 / 3.0,
            igw_refit: true,
        }
    }
}

impl AlgoConfig {
    pub fn with_kind(kind: AlgoKind) -> Self {
        Self {
            kind,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(AlgoError::Config(m.to_string()));
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.lambda > 0.0) || !self.lambda.is_finite() {
            return bad("lambda must be positive");
        }
        if !(self.sigma >= 0.0) || !self.sigma.is_finite() {
            return bad("sigma must be nonnegative");
        }
        if !(self.alpha_ucb >= 0.0) || !self.alpha_ucb.is_finite() {
            return bad("alpha_ucb must be nonnegative");
        }
        if !(self.eps_exponent > 0.0 && self.eps_exponent <= 1.0) {
            return bad("eps_exponent must lie in (0, 1]");
        }
        if !(self.igw_gamma1 >= 0.0) || !self.igw_gamma1.is_finite() || !self.igw_gamma2.is_finite() {
            return bad("igw_gamma1 must be nonnegative and gamma2 finite");
        }
        Ok(())
    }
}

/// `β_{t,δ} = σ √(2 log(1/δ) + d log(1 + t L² / (λ d))) + √λ B`.
pub fn beta_threshold(t: f64, d: usize, l: f64, b: f64, lambda: f64, sigma: f64, delta: f64) -> f64 {
    let d = d as f64;
    let inner = 2.0 * (1.0 / delta).ln() + d * (1.0 + t * l * l / (lambda * d)).ln();
    sigma * inner.sqrt() + lambda.sqrt() * b
}

/// `C_UCB = α σ √(2 ln(1/δ) + ln det V - d ln λ) + √λ B`, using the running
/// log-determinant of `rls`.
pub fn ucb_width(rls: &RlsState, param_bound: f64, cfg: &AlgoConfig, delta: f64) -> f64 {
    let d = rls.dim() as f64;
    let log_ratio = (rls.log_det() - d * rls.lambda().ln()).max(0.0);
    let inner = 2.0 * (1.0 / delta).ln() + log_ratio;
    cfg.alpha_ucb * cfg.sigma * inner.sqrt() + rls.lambda().sqrt() * param_bound
}

/// `φᵀθ + C ||φ||_{V^{-1}}`.
#[inline]
pub fn ucb_index(phi: &[f64], rls: &RlsState, width: f64) -> f64 {
    let bonus = rls.v_inv().quad_form(phi).max(0.0).sqrt();
    linalg::dot(phi, rls.theta()) + width * bonus
}

/// Greedy action for a parameter estimate.
pub fn greedy_action(x: usize, rep: &Representation, theta: &[f64]) -> usize {
    argmax(&rep.values(x, theta))
}

pub fn linucb_choose(x: usize, rep: &Representation, rls: &RlsState, cfg: &AlgoConfig, delta: f64) -> usize {
    let width = ucb_width(rls, rep.param_bound(), cfg, delta);
    let ucbs: Vec<f64> = (0..rep.n_actions())
        .map(|a| ucb_index(rep.feature(x, a), rls, width))
        .collect();
    argmax(&ucbs)
}

/// `ε_t = t^{-exponent}` for `t ≥ 1`.
pub fn epsilon(t: u64, exponent: f64) -> f64 {
    (t.max(1) as f64).powf(-exponent)
}

pub fn eps_greedy_choose<R: Rng + ?Sized>(
    x: usize,
    rep: &Representation,
    rls: &RlsState,
    cfg: &AlgoConfig,
    t: u64,
    rng: &mut R,
) -> usize {
    let u: f64 = rng.random();
    if u < epsilon(t, cfg.eps_exponent) {
        rng.random_range(0..rep.n_actions())
    } else {
        greedy_action(x, rep, rls.theta())
    }
}

/// Samples `θ̃ ~ N(θ, C² V^{-1})` and plays greedily for it.
pub fn lints_choose<R: Rng + ?Sized>(
    x: usize,
    rep: &Representation,
    rls: &RlsState,
    cfg: &AlgoConfig,
    delta: f64,
    rng: &mut R,
) -> Result<usize> {
    let theta = lints_sample(rls, ucb_width(rls, rep.param_bound(), cfg, delta), rng)?;
    Ok(greedy_action(x, rep, &theta))
}

/// One draw of `N(θ, c² V^{-1})` through the lower Cholesky factor of `V^{-1}`.
pub fn lints_sample<R: Rng + ?Sized>(rls: &RlsState, c: f64, rng: &mut R) -> Result<Vec<f64>> {
    let chol = Cholesky::new(rls.v_inv())?;
    let z: Vec<f64> = (0..rls.dim()).map(|_| rng.sample(StandardNormal)).collect();
    let noise = chol.mul_lower(&z);
    Ok(rls.theta().iter().zip(noise).map(|(t, n)| t + c * n).collect())
}

/// `p(a) = 1/(A + γ₁ t^{γ₂} (max f - f(a)))` off the greedy arm, which gets
/// the residual mass.
pub fn igw_distribution(values: &[f64], gamma1: f64, gamma2: f64, t: u64) -> Result<Vec<f64>> {
    let n = values.len();
    if n == 0 {
        return Err(AlgoError::Distribution("no actions".into()));
    }
    let best = argmax(values);
    let scale = gamma1 * (t.max(1) as f64).powf(gamma2);
    let mut p = vec![0.0; n];
    let mut rest = 0.0;
    for a in 0..n {
        if a != best {
            p[a] = 1.0 / (n as f64 + scale * (values[best] - values[a]));
            rest += p[a];
        }
    }
    p[best] = 1.0 - rest;
    if p.iter().any(|q| !(*q >= 0.0)) {
        return Err(AlgoError::Distribution(format!("negative mass in {p:?}")));
    }
    let total: f64 = p.iter().sum();
    if (total - 1.0).abs() > 1e-12 {
        return Err(AlgoError::Distribution(format!("mass sums to {total}")));
    }
    Ok(p)
}

/// Inverse-CDF draw; the last positive-mass index absorbs roundoff.
pub fn sample_categorical<R: Rng + ?Sized>(p: &[f64], rng: &mut R) -> usize {
    let u: f64 = rng.random();
    let mut acc = 0.0;
    for (i, q) in p.iter().enumerate() {
        acc += q;
        if u < acc {
            return i;
        }
    }
    p.iter().rposition(|q| *q > 0.0).unwrap_or(0)
}

pub fn igw_choose<R: Rng + ?Sized>(
    x: usize,
    rep: &Representation,
    theta: &[f64],
    cfg: &AlgoConfig,
    t: u64,
    rng: &mut R,
) -> Result<usize> {
    let p = igw_distribution(&rep.values(x, theta), cfg.igw_gamma1, cfg.igw_gamma2, t)?;
    Ok(sample_categorical(&p, rng))
}

/// One active representation as seen by the Leader rule.
pub struct LeaderArm<'a> {
    pub rep: &'a Representation,
    pub rls: &'a RlsState,
    pub width: f64,
}

/// `argmax_a min_φ UCB(x, a, φ)`.
pub fn leader_choose(x: usize, arms: &[LeaderArm<'_>]) -> usize {
    assert!(!arms.is_empty(), "leader needs at least one representation");
    let n = arms[0].rep.n_actions();
    let scores: Vec<f64> = (0..n)
        .map(|a| {
            arms.iter()
                .map(|arm| ucb_index(arm.rep.feature(x, a), arm.rls, arm.width))
                .fold(f64::INFINITY, f64::min)
        })
        .collect();
    argmax(&scores)
}

/// A base algorithm with its own least-squares state.
///
/// The internal round counter is the number of samples fed plus one, so a
/// learner warm-started on `n` samples continues its schedules at `n + 1`.
#[derive(Debug, Clone)]
pub struct BaseLearner {
    cfg: AlgoConfig,
    delta: f64,
    rls: RlsState,
    /// Estimate frozen at (re)start for the non-refit IGW variant.
    frozen_theta: Vec<f64>,
}

impl BaseLearner {
    /// `delta` is the confidence the learner runs at (the configured one for
    /// a bare run, a phase-dependent one inside the selection loop).
    pub fn new(cfg: &AlgoConfig, dim: usize, delta: f64) -> Result<Self> {
        cfg.validate()?;
        if cfg.kind == AlgoKind::Leader {
            return Err(AlgoError::Config("leader is not a single-representation learner".into()));
        }
        if !(delta > 0.0 && delta < 1.0) {
            return Err(AlgoError::Config(format!("delta {delta} outside (0, 1)")));
        }
        Ok(Self {
            cfg: cfg.clone(),
            delta,
            rls: RlsState::new(dim, cfg.lambda)?,
            frozen_theta: vec![0.0; dim],
        })
    }

    pub fn rls(&self) -> &RlsState {
        &self.rls
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    /// Current round index `t ≥ 1`.
    pub fn round(&self) -> u64 {
        self.rls.count() + 1
    }

    pub fn choose<R: Rng + ?Sized>(&self, x: usize, rep: &Representation, rng: &mut R) -> Result<usize> {
        let t = self.round();
        Ok(match self.cfg.kind {
            AlgoKind::Linucb => linucb_choose(x, rep, &self.rls, &self.cfg, self.delta),
            AlgoKind::EpsGreedy => eps_greedy_choose(x, rep, &self.rls, &self.cfg, t, rng),
            AlgoKind::Lints => lints_choose(x, rep, &self.rls, &self.cfg, self.delta, rng)?,
            AlgoKind::Igw => {
                let theta = if self.cfg.igw_refit { self.rls.theta() } else { &self.frozen_theta };
                igw_choose(x, rep, theta, &self.cfg, t, rng)?
            }
            AlgoKind::Leader => unreachable!("rejected in BaseLearner::new"),
        })
    }

    pub fn feed(&mut self, phi: &[f64], y: f64) -> Result<()> {
        self.rls.update(phi, y)?;
        Ok(())
    }

    /// Freezes the current estimate for the non-refit IGW variant.
    pub fn freeze(&mut self) {
        self.frozen_theta = self.rls.theta().to_vec();
    }
}
