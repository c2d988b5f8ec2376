//! Phased representation selection with an MSE realizability constraint,
//! spectral selection losses and GLRT-gated greedy play.
//!
//! Time is 1-based: step `t` observes a context, plays, and feeds the reward.
//! Phases start at `t_0 = 1`; after step `t` a new phase begins when
//! `t = ceil(γ t_j)` and more than one candidate exists. At a phase start the
//! surviving set `Φ_t` is recomputed from every candidate's full-history
//! least-squares statistics, the configured loss picks the active
//! representation, and the base algorithm restarts at confidence
//! `δ_j / |Φ|` with `δ_j = δ / (2 (j+1)²)`.

use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::algos::{self, AlgoConfig, AlgoError, AlgoKind, BaseLearner, LeaderArm};
use crate::env::{argmax, BanditInstance, Representation};
use crate::linalg::{self, LinalgError, RlsState, SymMatrix};

/// Tiny ridge stabilizing the ball-constrained fits.
const FIT_RIDGE: f64 = 1e-9;
/// Relative tolerance under which two losses count as tied.
const LOSS_TIE_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SrlError {
    #[error("invalid selection config: {0}")]
    Config(String),
    #[error(transparent)]
    Algo(#[from] AlgoError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

pub type Result<T> = std::result::Result<T, SrlError>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LossKind {
    /// `-λ_min(V - λI) / L²`.
    Eig,
    /// `-min_s φ_sᵀ(V - λI)φ_s / L²` over observed pairs.
    Weak,
    /// As `Weak`, additionally normalizing each pair by `||φ_s||²`.
    WeakNorm,
    /// Regret-bound tradeoff loss.
    Bic,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SrlConfig {
    /// Phase growth factor, `> 1`.
    pub gamma: f64,
    /// Global confidence level.
    pub delta: f64,
    pub loss: LossKind,
    /// Scale on the GLRT threshold; `0` disables the test.
    pub alpha_glrt: f64,
    /// Replay the full history into a freshly selected base algorithm.
    pub warm_start: bool,
    /// Restart the base algorithm at every phase even if the selection is
    /// unchanged.
    pub reset_on_phase: bool,
    /// Ball-constrained MSE in the realizability test (ridge MSE otherwise).
    pub use_ball_constraint: bool,
    /// Minimum gap handed to the `Bic` loss; `None` uses the guess `t^{-1/4}`.
    pub bic_gap: Option<f64>,
}

impl Default for SrlConfig {
    fn default() -> Self {
        Self {
            gamma: 2.0,
            delta: 0.01,
            loss: LossKind::Eig,
            alpha_glrt: 1.0,
            warm_start: true,
            reset_on_phase: true,
            use_ball_constraint: true,
            bic_gap: None,
        }
    }
}

impl SrlConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: &str| Err(SrlError::Config(m.to_string()));
        if !(self.gamma > 1.0) || !self.gamma.is_finite() {
            return bad("gamma must exceed 1");
        }
        if !(self.delta > 0.0 && self.delta < 1.0) {
            return bad("delta must lie in (0, 1)");
        }
        if !(self.alpha_glrt >= 0.0) || !self.alpha_glrt.is_finite() {
            return bad("alpha_glrt must be nonnegative");
        }
        if let Some(g) = self.bic_gap {
            if !(g > 0.0) {
                return bad("bic_gap must be positive");
            }
        }
        Ok(())
    }

    /// `δ_j = δ / (2 (j+1)²)`.
    pub fn phase_delta(&self, j: u32) -> f64 {
        let k = (j + 1) as f64;
        self.delta / (2.0 * k * k)
    }

    /// Confidence handed to the base learner in phase `j` with `n_reps`
    /// candidates: `δ_j / |Φ|`, or plain `δ` for a single candidate, whose
    /// learner is never reset and so needs no union over phases.
    pub fn base_delta(&self, j: u32, n_reps: usize) -> f64 {
        if n_reps == 1 {
            self.delta
        } else {
            self.phase_delta(j) / n_reps as f64
        }
    }

    /// `ceil(γ t_j)`.
    pub fn next_boundary(&self, t_j: u64) -> u64 {
        (self.gamma * t_j as f64).ceil() as u64
    }
}

/// `α_{t,δ} = (40/t) (log 8 + 2 log|Φ| + d log(12 L B t) + 3 log t - log δ) + 2/t`.
pub fn alpha_threshold(t: f64, d: usize, l: f64, b: f64, n_reps: usize, delta: f64) -> f64 {
    let log_term = 8f64.ln()
        + 2.0 * (n_reps as f64).ln()
        + d as f64 * (12.0 * l * b * t).ln()
        + 3.0 * t.ln()
        - delta.ln();
    40.0 / t * log_term + 2.0 / t
}

/// Outcome of the realizability test for one representation.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MseRecord {
    pub rep: usize,
    pub theta_hat: Vec<f64>,
    pub mse: f64,
    pub alpha: f64,
}

/// Evaluates every candidate's MSE on the history summarized by `rls`
/// (one state per representation, all fed the same samples) and returns
/// the indices satisfying `mse ≤ min_φ' (mse_φ' + α_φ')` with their records.
pub fn compute_active_set(
    reps: &[Representation],
    rls: &[RlsState],
    delta: f64,
    use_ball_constraint: bool,
) -> Result<(Vec<usize>, Vec<MseRecord>)> {
    let n = reps.len();
    let mut records = Vec::with_capacity(n);
    for (k, (rep, state)) in reps.iter().zip(rls).enumerate() {
        let t = state.count();
        if t == 0 {
            return Err(SrlError::Config("active set needs a nonempty history".into()));
        }
        let moments = state.moments();
        let (theta_hat, mse) = if use_ball_constraint {
            let fit = moments.constrained_fit(rep.param_bound(), FIT_RIDGE, linalg::BALL_TOL)?;
            (fit.theta, fit.mse)
        } else {
            (state.theta().to_vec(), moments.mse(state.theta()))
        };
        let alpha = alpha_threshold(
            t as f64,
            rep.dim(),
            rep.feature_bound(),
            rep.param_bound(),
            n,
            delta,
        );
        records.push(MseRecord {
            rep: k,
            theta_hat,
            mse,
            alpha,
        });
    }
    let bound = records
        .iter()
        .map(|r| r.mse + r.alpha)
        .fold(f64::INFINITY, f64::min);
    let members = records.iter().filter(|r| r.mse <= bound).map(|r| r.rep).collect();
    Ok((members, records))
}

/// `-λ_min(G) / L²` for the unregularized design `G = V - λI`.
pub fn loss_eig(gram: &SymMatrix, l: f64) -> f64 {
    -linalg::min_eigenvalue(gram, 1e-12) / (l * l)
}

/// `-min_s φ_sᵀ G φ_s / L²` (or `/ (L² ||φ_s||²)` when `normalized`, which
/// makes the loss invariant to feature scaling; zero features are skipped).
/// Returns 0 for an empty history.
pub fn loss_weak<'a>(
    observed: impl IntoIterator<Item = &'a [f64]>,
    gram: &SymMatrix,
    l: f64,
    normalized: bool,
) -> f64 {
    let mut best = f64::INFINITY;
    for phi in observed {
        let q = gram.quad_form(phi);
        let v = if normalized {
            let n2 = linalg::dot(phi, phi);
            if n2 == 0.0 {
                continue;
            }
            q / (n2 * l * l)
        } else {
            q / (l * l)
        };
        best = best.min(v);
    }
    if best.is_finite() {
        -best
    } else {
        0.0
    }
}

/// LinUCB-style regret bound `d² log(|Φ| t / δ)² / Δ`.
pub fn linucb_regret_bound(d: usize, n_reps: usize, t: f64, delta: f64, gap: f64) -> f64 {
    let lg = (n_reps as f64 * t / delta).ln();
    (d * d) as f64 * lg * lg / gap
}

/// Bound on suboptimal pulls `(2 τ + R̄ log₂ t) / Δ`.
pub fn subopt_pulls_bound(tau_elim: f64, regret_bound: f64, t: f64, gap: f64) -> f64 {
    (2.0 * tau_elim + regret_bound * t.log2()) / gap
}

/// `R̄ - [λ_min(G)/L² - g - 8 √(t log(4 d |Φ| t / δ))]₊`.
#[allow(clippy::too_many_arguments)]
pub fn loss_bic(
    gram: &SymMatrix,
    l: f64,
    t: f64,
    n_reps: usize,
    delta: f64,
    regret_bound: f64,
    subopt_bound: f64,
) -> f64 {
    let d = gram.dim() as f64;
    let spectral = linalg::min_eigenvalue(gram, 1e-12) / (l * l);
    let dev = 8.0 * (t * (4.0 * d * n_reps as f64 * t / delta).ln()).sqrt();
    regret_bound - (spectral - subopt_bound - dev).max(0.0)
}

/// Argmin over `candidates` of `losses` (parallel slices); near-ties within a
/// relative `1e-9` go to the lowest representation index.
pub fn select_representation(candidates: &[usize], losses: &[f64]) -> usize {
    assert!(!candidates.is_empty() && candidates.len() == losses.len());
    let min = losses.iter().copied().fold(f64::INFINITY, f64::min);
    let tol = LOSS_TIE_TOL * min.abs().max(1.0);
    candidates
        .iter()
        .zip(losses)
        .filter(|(_, l)| **l <= min + tol)
        .map(|(c, _)| *c)
        .min()
        .expect("nonempty")
}

/// `min_{a ≠ π*} (φ(π*) - φ(a))ᵀθ / ||φ(π*) - φ(a)||_{V^{-1}}` with `π*` the
/// greedy arm; `+∞` with a single action. Pairs with identical features are
/// skipped.
pub fn glr_statistic(x: usize, rep: &Representation, rls: &RlsState) -> f64 {
    let values = rep.values(x, rls.theta());
    let best = argmax(&values);
    let star = rep.feature(x, best);
    let mut glr = f64::INFINITY;
    let mut diff = vec![0.0; rep.dim()];
    for a in 0..rep.n_actions() {
        if a == best {
            continue;
        }
        let num = values[best] - values[a];
        if num == 0.0 {
            return 0.0;
        }
        for ((d, s), p) in diff.iter_mut().zip(star).zip(rep.feature(x, a)) {
            *d = s - p;
        }
        let den2 = rls.v_inv().quad_form(&diff);
        if den2 <= 0.0 {
            continue;
        }
        glr = glr.min(num / den2.sqrt());
    }
    glr
}

/// What happened at a phase boundary.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BoundaryRecord {
    pub t: u64,
    pub phase: u32,
    pub active_set: Vec<usize>,
    /// Representation chosen by the loss (`None` for the Leader baseline).
    pub selected: Option<usize>,
    /// Loss of every member of the active set, in set order.
    pub losses: Vec<f64>,
    pub mse: Vec<MseRecord>,
}

/// The action for one step and how it was reached.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Decision {
    pub action: usize,
    pub glrt_triggered: bool,
    /// GLR of the active representation (`None` when the test is disabled).
    pub glr: Option<f64>,
    pub threshold: f64,
}

/// Interaction history shared by the controllers: every representation's
/// full-history least-squares state plus the raw samples.
#[derive(Debug, Clone)]
struct Tracker {
    rls: Vec<RlsState>,
    history: Vec<(usize, usize, f64)>,
    seen: Vec<bool>,
    seen_pairs: Vec<(usize, usize)>,
    n_actions: usize,
}

impl Tracker {
    fn new(instance: &BanditInstance, lambda: f64) -> Result<Self> {
        let rls = instance
            .reps()
            .iter()
            .map(|r| RlsState::new(r.dim(), lambda))
            .collect::<std::result::Result<Vec<_>, _>>()?;
        Ok(Self {
            rls,
            history: Vec::new(),
            seen: vec![false; instance.n_contexts() * instance.n_actions()],
            seen_pairs: Vec::new(),
            n_actions: instance.n_actions(),
        })
    }

    fn record(&mut self, instance: &BanditInstance, x: usize, a: usize, y: f64) -> Result<()> {
        for (rep, state) in instance.reps().iter().zip(self.rls.iter_mut()) {
            state.update(rep.feature(x, a), y)?;
        }
        self.history.push((x, a, y));
        let key = x * self.n_actions + a;
        if !self.seen[key] {
            self.seen[key] = true;
            self.seen_pairs.push((x, a));
        }
        Ok(())
    }
}

/// Phase bookkeeping shared by both controllers.
#[derive(Debug, Clone, Copy)]
struct Schedule {
    phase: u32,
    phase_start: u64,
}

impl Schedule {
    fn start() -> Self {
        Self {
            phase: 0,
            phase_start: 1,
        }
    }

    fn is_boundary(&self, cfg: &SrlConfig, t: u64, n_reps: usize) -> bool {
        n_reps > 1 && t == cfg.next_boundary(self.phase_start)
    }
}

/// The representation-selection learner.
#[derive(Debug, Clone)]
pub struct SrlController {
    cfg: SrlConfig,
    algo: AlgoConfig,
    tracker: Tracker,
    base: BaseLearner,
    active: usize,
    active_set: Vec<usize>,
    schedule: Schedule,
}

impl SrlController {
    pub fn new(instance: &BanditInstance, algo: &AlgoConfig, cfg: &SrlConfig) -> Result<Self> {
        cfg.validate()?;
        algo.validate()?;
        if algo.kind == AlgoKind::Leader {
            return Err(SrlError::Config("use LeaderController for the leader baseline".into()));
        }
        let n = instance.reps().len();
        if n == 0 {
            return Err(SrlError::Config("instance has no representations".into()));
        }
        let base = BaseLearner::new(algo, instance.rep(0).dim(), cfg.base_delta(0, n))?;
        Ok(Self {
            cfg: cfg.clone(),
            algo: algo.clone(),
            tracker: Tracker::new(instance, algo.lambda)?,
            base,
            active: 0,
            active_set: (0..n).collect(),
            schedule: Schedule::start(),
        })
    }

    pub fn active_rep(&self) -> usize {
        self.active
    }
    pub fn active_set(&self) -> &[usize] {
        &self.active_set
    }
    pub fn phase(&self) -> u32 {
        self.schedule.phase
    }
    pub fn phase_start(&self) -> u64 {
        self.schedule.phase_start
    }
    /// Completed steps.
    pub fn t(&self) -> u64 {
        self.tracker.history.len() as u64
    }
    pub fn rls(&self, k: usize) -> &RlsState {
        &self.tracker.rls[k]
    }
    pub fn base(&self) -> &BaseLearner {
        &self.base
    }
    pub fn history(&self) -> &[(usize, usize, f64)] {
        &self.tracker.history
    }

    /// Runs the GLRT on the active representation and picks the action.
    pub fn decide<R: Rng + ?Sized>(
        &self,
        instance: &BanditInstance,
        x: usize,
        rng: &mut R,
    ) -> Result<Decision> {
        let rep = instance.rep(self.active);
        let rls = &self.tracker.rls[self.active];
        let n = instance.reps().len();
        if self.cfg.alpha_glrt > 0.0 {
            let threshold = self.cfg.alpha_glrt
                * algos::beta_threshold(
                    self.t() as f64,
                    rep.dim(),
                    rep.feature_bound(),
                    rep.param_bound(),
                    self.algo.lambda,
                    self.algo.sigma,
                    self.cfg.delta / n as f64,
                );
            let glr = glr_statistic(x, rep, rls);
            if glr > threshold {
                return Ok(Decision {
                    action: algos::greedy_action(x, rep, rls.theta()),
                    glrt_triggered: true,
                    glr: Some(glr),
                    threshold,
                });
            }
            return Ok(Decision {
                action: self.base.choose(x, rep, rng)?,
                glrt_triggered: false,
                glr: Some(glr),
                threshold,
            });
        }
        Ok(Decision {
            action: self.base.choose(x, rep, rng)?,
            glrt_triggered: false,
            glr: None,
            threshold: f64::INFINITY,
        })
    }

    /// Feeds the reward of step `t`; returns the boundary record when a new
    /// phase starts after this step.
    pub fn observe(
        &mut self,
        instance: &BanditInstance,
        x: usize,
        a: usize,
        y: f64,
        glrt_triggered: bool,
    ) -> Result<Option<BoundaryRecord>> {
        self.tracker.record(instance, x, a, y)?;
        if !glrt_triggered {
            self.base.feed(instance.rep(self.active).feature(x, a), y)?;
        }
        let t = self.t();
        if self.schedule.is_boundary(&self.cfg, t, instance.reps().len()) {
            return self.boundary(instance, t).map(Some);
        }
        Ok(None)
    }

    fn losses(&self, instance: &BanditInstance, members: &[usize], t: u64) -> Vec<f64> {
        let n = instance.reps().len();
        let t_f = t as f64;
        let gap = self.cfg.bic_gap.unwrap_or_else(|| t_f.powf(-0.25));
        // Suboptimal-pull bound uses the worst regret bound over the set.
        let delta_log = self.cfg.phase_delta(t_f.log2().floor() as u32) / n as f64;
        let worst_regret = members
            .iter()
            .map(|&k| linucb_regret_bound(instance.rep(k).dim(), n, t_f, delta_log, gap))
            .fold(0.0, f64::max);
        let g = subopt_pulls_bound(0.0, worst_regret, t_f, gap);
        let delta_j = self.cfg.phase_delta(self.schedule.phase) / n as f64;

        members
            .iter()
            .map(|&k| {
                let rep = instance.rep(k);
                let gram = self.tracker.rls[k].gram();
                let l = rep.feature_bound();
                match self.cfg.loss {
                    LossKind::Eig => loss_eig(&gram, l),
                    LossKind::Weak | LossKind::WeakNorm => loss_weak(
                        self.tracker.seen_pairs.iter().map(|&(x, a)| rep.feature(x, a)),
                        &gram,
                        l,
                        self.cfg.loss == LossKind::WeakNorm,
                    ),
                    LossKind::Bic => {
                        let r = linucb_regret_bound(rep.dim(), n, t_f, delta_j, gap);
                        loss_bic(&gram, l, t_f, n, self.cfg.delta, r, g)
                    }
                }
            })
            .collect()
    }

    fn boundary(&mut self, instance: &BanditInstance, t: u64) -> Result<BoundaryRecord> {
        self.schedule.phase += 1;
        self.schedule.phase_start = t;
        let (members, records) = compute_active_set(
            instance.reps(),
            &self.tracker.rls,
            self.cfg.delta,
            self.cfg.use_ball_constraint,
        )?;
        let losses = self.losses(instance, &members, t);
        let selected = select_representation(&members, &losses);
        let previous = self.active;
        self.active = selected;
        self.active_set = members.clone();

        let delta = self.cfg.base_delta(self.schedule.phase, instance.reps().len());
        if self.cfg.reset_on_phase || selected != previous {
            let rep = instance.rep(selected);
            let mut base = BaseLearner::new(&self.algo, rep.dim(), delta)?;
            if self.cfg.warm_start {
                for &(x, a, y) in &self.tracker.history {
                    base.feed(rep.feature(x, a), y)?;
                }
            }
            base.freeze();
            self.base = base;
        }
        Ok(BoundaryRecord {
            t,
            phase: self.schedule.phase,
            active_set: members,
            selected: Some(selected),
            losses,
            mse: records,
        })
    }
}

/// The Leader baseline: optimistic in every surviving representation at
/// once, playing `argmax_a min_φ UCB(x, a, φ)`. The surviving set follows
/// the same realizability test and phase schedule as [`SrlController`].
#[derive(Debug, Clone)]
pub struct LeaderController {
    cfg: SrlConfig,
    algo: AlgoConfig,
    tracker: Tracker,
    active_set: Vec<usize>,
    schedule: Schedule,
}

impl LeaderController {
    pub fn new(instance: &BanditInstance, algo: &AlgoConfig, cfg: &SrlConfig) -> Result<Self> {
        cfg.validate()?;
        algo.validate()?;
        let n = instance.reps().len();
        if n == 0 {
            return Err(SrlError::Config("instance has no representations".into()));
        }
        Ok(Self {
            cfg: cfg.clone(),
            algo: algo.clone(),
            tracker: Tracker::new(instance, algo.lambda)?,
            active_set: (0..n).collect(),
            schedule: Schedule::start(),
        })
    }

    pub fn active_set(&self) -> &[usize] {
        &self.active_set
    }
    pub fn phase(&self) -> u32 {
        self.schedule.phase
    }
    pub fn t(&self) -> u64 {
        self.tracker.history.len() as u64
    }
    pub fn rls(&self, k: usize) -> &RlsState {
        &self.tracker.rls[k]
    }

    pub fn decide(&self, instance: &BanditInstance, x: usize) -> usize {
        let delta = self.cfg.delta / instance.reps().len() as f64;
        let arms: Vec<LeaderArm<'_>> = self
            .active_set
            .iter()
            .map(|&k| {
                let rep = instance.rep(k);
                let rls = &self.tracker.rls[k];
                LeaderArm {
                    rep,
                    rls,
                    width: algos::ucb_width(rls, rep.param_bound(), &self.algo, delta),
                }
            })
            .collect();
        algos::leader_choose(x, &arms)
    }

    pub fn observe(
        &mut self,
        instance: &BanditInstance,
        x: usize,
        a: usize,
        y: f64,
    ) -> Result<Option<BoundaryRecord>> {
        self.tracker.record(instance, x, a, y)?;
        let t = self.t();
        if !self.schedule.is_boundary(&self.cfg, t, instance.reps().len()) {
            return Ok(None);
        }
        self.schedule.phase += 1;
        self.schedule.phase_start = t;
        let (members, records) = compute_active_set(
            instance.reps(),
            &self.tracker.rls,
            self.cfg.delta,
            self.cfg.use_ball_constraint,
        )?;
        self.active_set = members.clone();
        Ok(Some(BoundaryRecord {
            t,
            phase: self.schedule.phase,
            active_set: members,
            selected: None,
            losses: Vec::new(),
            mse: records,
        }))
    }
}
