//! Finite stochastic contextual linear bandits and candidate representations.
//!
//! A [`BanditInstance`] owns the mean-reward table, the context distribution
//! and the candidate set of [`Representation`]s. Ground-truth realizability
//! labels travel with the instance (`star_ids`) so simulations can audit
//! selection decisions; learners never read them.

mod generate;
mod io;

pub use generate::{
    analyze_all, make_mixing, make_single_rep, make_varying_dimension, make_varying_dimension_no_hls,
    make_varying_dimension_realizable_only, make_weak_hls, mixture_min_eigenvalue, GeneratorConfig,
};
pub use io::InstanceDoc;

use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{self, LinalgError, LsMoments, SymMatrix};

/// Spectral positivity threshold for HLS / weak-HLS decisions.
pub const SPECTRAL_EPS: f64 = 1e-9;
/// Minimum misspecification accepted for a non-realizable representation.
pub const MISSPEC_FLOOR: f64 = 1e-3;

#[derive(Debug, Error)]
pub enum EnvError {
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("generation failed after {attempts} attempts: {what}")]
    Generation { what: String, attempts: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
    #[error("instance json: {0}")]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, EnvError>;

/// A feature table `φ(x, a) ∈ R^d` over a finite context-action grid.
#[derive(Debug, Clone, PartialEq)]
pub struct Representation {
    id: String,
    dim: usize,
    n_contexts: usize,
    n_actions: usize,
    features: Vec<f64>,
    feature_bound: f64,
    param_bound: f64,
}

impl Representation {
    /// `features` is row-major over `(context, action, coordinate)`.
    /// The feature bound `L` is recomputed as the realized maximum norm.
    pub fn new(
        id: impl Into<String>,
        dim: usize,
        n_contexts: usize,
        n_actions: usize,
        features: Vec<f64>,
        param_bound: f64,
    ) -> Result<Self> {
        let id = id.into();
        if dim == 0 || n_contexts == 0 || n_actions == 0 {
            return Err(EnvError::Invalid(format!("{id}: empty dimension")));
        }
        if features.len() != dim * n_contexts * n_actions {
            return Err(EnvError::Invalid(format!(
                "{id}: expected {} feature entries, got {}",
                dim * n_contexts * n_actions,
                features.len()
            )));
        }
        if features.iter().any(|v| !v.is_finite()) {
            return Err(EnvError::Invalid(format!("{id}: non-finite feature")));
        }
        if !(param_bound > 0.0) || !param_bound.is_finite() {
            return Err(EnvError::Invalid(format!("{id}: parameter bound must be positive")));
        }
        let feature_bound = features
            .chunks_exact(dim)
            .map(linalg::norm2)
            .fold(0.0, f64::max);
        if !(feature_bound > 0.0) {
            return Err(EnvError::Invalid(format!("{id}: all features are zero")));
        }
        Ok(Self {
            id,
            dim,
            n_contexts,
            n_actions,
            features,
            feature_bound,
            param_bound,
        })
    }

    pub fn id(&self) -> &str {
        &self.id
    }
    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn n_contexts(&self) -> usize {
        self.n_contexts
    }
    pub fn n_actions(&self) -> usize {
        self.n_actions
    }
    /// `L_φ = max ||φ(x,a)||`.
    pub fn feature_bound(&self) -> f64 {
        self.feature_bound
    }
    /// `B_φ`, radius of the admissible parameter ball.
    pub fn param_bound(&self) -> f64 {
        self.param_bound
    }
    pub fn features(&self) -> &[f64] {
        &self.features
    }

    #[inline]
    pub fn feature(&self, x: usize, a: usize) -> &[f64] {
        let start = (x * self.n_actions + a) * self.dim;
        &self.features[start..start + self.dim]
    }

    /// `φᵀθ` for every action at context `x`.
    pub fn values(&self, x: usize, theta: &[f64]) -> Vec<f64> {
        (0..self.n_actions)
            .map(|a| linalg::dot(self.feature(x, a), theta))
            .collect()
    }

    pub fn with_id(mut self, id: impl Into<String>) -> Self {
        self.id = id.into();
        self
    }

    /// Scales features by `c > 0` and the parameter bound by `1/c`.
    pub fn scaled(&self, c: f64) -> Result<Self> {
        Self::new(
            self.id.clone(),
            self.dim,
            self.n_contexts,
            self.n_actions,
            self.features.iter().map(|v| c * v).collect(),
            self.param_bound / c,
        )
    }

    /// Appends `extra` coordinates equal to `value` to every feature.
    pub fn padded(&self, extra: usize, value: f64) -> Result<Self> {
        let d = self.dim + extra;
        let mut features = Vec::with_capacity(d * self.n_contexts * self.n_actions);
        for row in self.features.chunks_exact(self.dim) {
            features.extend_from_slice(row);
            features.extend(std::iter::repeat_n(value, extra));
        }
        Self::new(
            self.id.clone(),
            d,
            self.n_contexts,
            self.n_actions,
            features,
            self.param_bound,
        )
    }

    /// Keeps only the listed coordinates.
    pub fn subset(&self, coords: &[usize], id: impl Into<String>) -> Result<Self> {
        let mut features = Vec::with_capacity(coords.len() * self.n_contexts * self.n_actions);
        for row in self.features.chunks_exact(self.dim) {
            features.extend(coords.iter().map(|&i| row[i]));
        }
        Self::new(
            id,
            coords.len(),
            self.n_contexts,
            self.n_actions,
            features,
            self.param_bound,
        )
    }
}

/// A finite contextual bandit with Gaussian reward noise.
#[derive(Debug, Clone)]
pub struct BanditInstance {
    n_contexts: usize,
    n_actions: usize,
    rho: Vec<f64>,
    rho_cdf: Vec<f64>,
    mu: Vec<f64>,
    sigma: f64,
    reps: Vec<Representation>,
    star_ids: Vec<String>,
    opt_action: Vec<usize>,
    min_gap: f64,
}

impl BanditInstance {
    /// Validates the instance invariants: `rho` is a distribution, every
    /// context has a unique optimal action, the minimum gap over supported
    /// contexts is positive, and every representation matches the grid.
    pub fn new(
        rho: Vec<f64>,
        mu: Vec<Vec<f64>>,
        sigma: f64,
        reps: Vec<Representation>,
        star_ids: Vec<String>,
    ) -> Result<Self> {
        let n_contexts = rho.len();
        if n_contexts == 0 || mu.len() != n_contexts {
            return Err(EnvError::Invalid("rho and mu must cover the same contexts".into()));
        }
        let n_actions = mu[0].len();
        if n_actions == 0 || mu.iter().any(|r| r.len() != n_actions) {
            return Err(EnvError::Invalid("mu rows must have equal, positive length".into()));
        }
        if rho.iter().any(|p| !(*p >= 0.0) || !p.is_finite()) {
            return Err(EnvError::Invalid("rho must be nonnegative".into()));
        }
        let total: f64 = rho.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return Err(EnvError::Invalid(format!("rho sums to {total}, not 1")));
        }
        if !(sigma >= 0.0) || !sigma.is_finite() {
            return Err(EnvError::Invalid("sigma must be nonnegative".into()));
        }
        if mu.iter().flatten().any(|v| !v.is_finite()) {
            return Err(EnvError::Invalid("mu must be finite".into()));
        }

        let mut opt_action = Vec::with_capacity(n_contexts);
        let mut min_gap = f64::INFINITY;
        for (x, row) in mu.iter().enumerate() {
            let best = argmax(row);
            let runner_up = row
                .iter()
                .enumerate()
                .filter(|(a, _)| *a != best)
                .map(|(_, v)| *v)
                .fold(f64::NEG_INFINITY, f64::max);
            let gap = row[best] - runner_up;
            if n_actions > 1 && !(gap > 0.0) {
                return Err(EnvError::Invalid(format!("context {x}: optimal action not unique")));
            }
            if rho[x] > 0.0 && n_actions > 1 {
                min_gap = min_gap.min(gap);
            }
            opt_action.push(best);
        }

        let mut seen = std::collections::BTreeSet::new();
        for rep in &reps {
            if rep.n_contexts() != n_contexts || rep.n_actions() != n_actions {
                return Err(EnvError::Invalid(format!(
                    "{}: feature grid does not match instance",
                    rep.id()
                )));
            }
            if !seen.insert(rep.id().to_string()) {
                return Err(EnvError::Invalid(format!("duplicate representation id {}", rep.id())));
            }
        }
        for id in &star_ids {
            if !seen.contains(id) {
                return Err(EnvError::Invalid(format!("unknown realizable id {id}")));
            }
        }

        let mut acc = 0.0;
        let rho_cdf = rho
            .iter()
            .map(|p| {
                acc += p;
                acc
            })
            .collect();

        Ok(Self {
            n_contexts,
            n_actions,
            rho,
            rho_cdf,
            mu: mu.into_iter().flatten().collect(),
            sigma,
            reps,
            star_ids,
            opt_action,
            min_gap,
        })
    }

    pub fn n_contexts(&self) -> usize {
        self.n_contexts
    }
    pub fn n_actions(&self) -> usize {
        self.n_actions
    }
    pub fn rho(&self) -> &[f64] {
        &self.rho
    }
    pub fn sigma(&self) -> f64 {
        self.sigma
    }
    pub fn reps(&self) -> &[Representation] {
        &self.reps
    }
    pub fn rep(&self, k: usize) -> &Representation {
        &self.reps[k]
    }
    pub fn star_ids(&self) -> &[String] {
        &self.star_ids
    }
    pub fn min_gap(&self) -> f64 {
        self.min_gap
    }

    #[inline]
    pub fn mu(&self, x: usize, a: usize) -> f64 {
        self.mu[x * self.n_actions + a]
    }

    pub fn mu_row(&self, x: usize) -> &[f64] {
        &self.mu[x * self.n_actions..(x + 1) * self.n_actions]
    }

    pub fn mu_table(&self) -> Vec<Vec<f64>> {
        self.mu.chunks(self.n_actions).map(|r| r.to_vec()).collect()
    }

    #[inline]
    pub fn opt_action(&self, x: usize) -> usize {
        self.opt_action[x]
    }

    /// `Δ(x, a) = μ*(x) - μ(x, a)`.
    #[inline]
    pub fn gap(&self, x: usize, a: usize) -> f64 {
        self.mu(x, self.opt_action[x]) - self.mu(x, a)
    }

    pub fn is_realizable(&self, k: usize) -> bool {
        let id = self.reps[k].id();
        self.star_ids.iter().any(|s| s == id)
    }

    pub fn rep_index(&self, id: &str) -> Option<usize> {
        self.reps.iter().position(|r| r.id() == id)
    }

    /// Same bandit with a different candidate set.
    pub fn with_reps(&self, reps: Vec<Representation>, star_ids: Vec<String>) -> Result<Self> {
        Self::new(self.rho.clone(), self.mu_table(), self.sigma, reps, star_ids)
    }

    /// Draws a context from `rho`.
    pub fn sample_context<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        let u: f64 = rng.random();
        let idx = self.rho_cdf.partition_point(|c| *c <= u);
        if idx < self.n_contexts {
            idx
        } else {
            // u landed past the accumulated mass through roundoff.
            self.rho.iter().rposition(|p| *p > 0.0).unwrap_or(0)
        }
    }

    /// Noisy reward `μ(x, a) + σ η` with standard normal `η`. Exactly one
    /// normal draw per call, also when `σ = 0`.
    pub fn step<R: Rng + ?Sized>(&self, x: usize, a: usize, rng: &mut R) -> f64 {
        let eta: f64 = rng.sample(StandardNormal);
        self.mu(x, a) + self.sigma * eta
    }

    /// `E_ρ[φ(x, a*_x) φ(x, a*_x)^T]`.
    pub fn optimal_design(&self, rep: &Representation) -> SymMatrix {
        let mut m = SymMatrix::zeros(rep.dim());
        for x in 0..self.n_contexts {
            if self.rho[x] > 0.0 {
                m.add_outer(rep.feature(x, self.opt_action[x]), self.rho[x]);
            }
        }
        m
    }

    /// `(1/|A|) Σ_a E_ρ[φ(x, a) φ(x, a)^T]`.
    pub fn full_design(&self, rep: &Representation) -> SymMatrix {
        let mut m = SymMatrix::zeros(rep.dim());
        let w = 1.0 / self.n_actions as f64;
        for x in 0..self.n_contexts {
            if self.rho[x] > 0.0 {
                for a in 0..self.n_actions {
                    m.add_outer(rep.feature(x, a), w * self.rho[x]);
                }
            }
        }
        m
    }

    /// Max over all pairs of `|φᵀθ - μ|`.
    pub fn max_residual(&self, rep: &Representation, theta: &[f64]) -> f64 {
        let mut worst = 0.0f64;
        for x in 0..self.n_contexts {
            for a in 0..self.n_actions {
                worst = worst.max((linalg::dot(rep.feature(x, a), theta) - self.mu(x, a)).abs());
            }
        }
        worst
    }
}

/// Index of the largest entry; ties go to the lowest index.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (i, v) in values.iter().enumerate().skip(1) {
        if *v > values[best] {
            best = i;
        }
    }
    best
}

/// Spectral diagnostics of one representation on one instance.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpectralReport {
    pub rep_id: String,
    pub dim: usize,
    /// `λ_min(E_ρ[φ* φ*^T])`.
    pub lambda_star: f64,
    pub is_hls: bool,
    /// `λ_min` of the optimal-arm design restricted to `span(φ)`.
    pub weak_margin: f64,
    pub is_weak_hls: bool,
    /// `min_{x,a} φᵀ M* φ / ||φ||²` over nonzero features.
    pub min_normalized_quadratic: f64,
    /// Best policy-wise average squared fit over the parameter ball.
    pub fit_error: f64,
    pub eps_phi: f64,
}

/// HLS, weak-HLS and misspecification diagnostics.
///
/// Weak-HLS is decided by `span(φ*) = span(φ)`, checked as positivity of
/// `M*` restricted to the span of all features. The per-feature quadratic
/// ratio is reported alongside; it is positive for every weak-HLS
/// representation but can also be positive when a feature only partly lies
/// outside `span(φ*)`.
pub fn analyze_representation(instance: &BanditInstance, rep: &Representation) -> SpectralReport {
    let m_star = instance.optimal_design(rep);
    let lambda_star = linalg::min_eigenvalue(&m_star, 1e-14);
    let is_hls = lambda_star > SPECTRAL_EPS;

    let weak_margin = restricted_min_eigenvalue(&m_star, &instance.full_design(rep));
    let is_weak_hls = is_hls || weak_margin > SPECTRAL_EPS;

    let mut min_ratio = f64::INFINITY;
    for x in 0..instance.n_contexts() {
        for a in 0..instance.n_actions() {
            let phi = rep.feature(x, a);
            let n2 = linalg::dot(phi, phi);
            if n2 > 0.0 {
                min_ratio = min_ratio.min(m_star.quad_form(phi) / n2);
            }
        }
    }

    let fit_error = misspecification(instance, rep);
    SpectralReport {
        rep_id: rep.id().to_string(),
        dim: rep.dim(),
        lambda_star,
        is_hls,
        weak_margin,
        is_weak_hls,
        min_normalized_quadratic: min_ratio,
        fit_error,
        eps_phi: fit_error.max(0.0),
    }
}

/// `min_{v ∈ range(span_of), ||v|| = 1} vᵀ M v`.
pub fn restricted_min_eigenvalue(m: &SymMatrix, span_of: &SymMatrix) -> f64 {
    let d = m.dim();
    let eig = linalg::symmetric_eigen(span_of, 1e-14);
    let top = eig.values.iter().copied().fold(0.0f64, f64::max);
    let basis: Vec<Vec<f64>> = (0..d)
        .filter(|&k| eig.values[k] > 1e-10 * top.max(f64::MIN_POSITIVE))
        .map(|k| eig.vector(k))
        .collect();
    if basis.is_empty() {
        return 0.0;
    }
    let k = basis.len();
    let mv: Vec<Vec<f64>> = basis.iter().map(|q| m.mul_vec(q)).collect();
    let restricted = SymMatrix::from_upper(k, |i, j| linalg::dot(&basis[i], &mv[j]));
    linalg::min_eigenvalue(&restricted, 1e-14)
}

/// `min_{θ ∈ B} min_π E_ρ[(φ(x,π(x))ᵀθ - μ(x,π(x)))²]` by alternating exact
/// policy improvement with ball-constrained fits, from several starts.
pub fn misspecification(instance: &BanditInstance, rep: &Representation) -> f64 {
    let nx = instance.n_contexts();
    let na = instance.n_actions();
    let bound = rep.param_bound();

    let fit_policy = |policy: &[usize]| -> Option<(Vec<f64>, f64)> {
        let mut m = LsMoments::new(rep.dim());
        for x in 0..nx {
            if instance.rho()[x] > 0.0 {
                let a = policy[x];
                m.add(rep.feature(x, a), instance.mu(x, a), instance.rho()[x]);
            }
        }
        m.constrained_fit(bound, 1e-12, linalg::BALL_TOL)
            .ok()
            .map(|f| (f.theta, f.mse))
    };
    let improve = |theta: &[f64]| -> Vec<usize> {
        (0..nx)
            .map(|x| {
                let errs: Vec<f64> = (0..na)
                    .map(|a| -(linalg::dot(rep.feature(x, a), theta) - instance.mu(x, a)).powi(2))
                    .collect();
                argmax(&errs)
            })
            .collect()
    };

    let mut starts: Vec<Vec<usize>> = vec![(0..nx).map(|x| instance.opt_action(x)).collect()];
    for a in 0..na {
        starts.push(vec![a; nx]);
    }
    // Policy induced by the all-pairs least-squares fit.
    let mut all = LsMoments::new(rep.dim());
    for x in 0..nx {
        for a in 0..na {
            all.add(rep.feature(x, a), instance.mu(x, a), instance.rho()[x]);
        }
    }
    if let Ok(f) = all.constrained_fit(bound, 1e-12, linalg::BALL_TOL) {
        starts.push(improve(&f.theta));
    }

    let mut best = f64::INFINITY;
    for start in starts {
        let mut policy = start;
        let mut value = f64::INFINITY;
        for _ in 0..100 {
            let Some((theta, mse)) = fit_policy(&policy) else {
                break;
            };
            value = value.min(mse);
            let next = improve(&theta);
            if next == policy {
                break;
            }
            policy = next;
        }
        best = best.min(value);
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn tiny_instance(sigma: f64) -> BanditInstance {
        let rep = Representation::new("r", 1, 1, 2, vec![1.0, -1.0], 1.0).unwrap();
        BanditInstance::new(vec![1.0], vec![vec![0.5, -0.5]], sigma, vec![rep], vec!["r".into()])
            .unwrap()
    }

    #[test]
    fn zero_noise_reward_is_the_mean() {
        let inst = tiny_instance(0.0);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            assert_eq!(inst.step(0, 1, &mut rng), -0.5);
        }
    }

    #[test]
    fn reward_replays_under_fixed_seed() {
        let inst = tiny_instance(0.3);
        let draw = |seed| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            (0..5).map(|_| inst.step(0, 0, &mut rng)).collect::<Vec<_>>()
        };
        assert_eq!(draw(9), draw(9));
        assert_ne!(draw(9), draw(10));
    }

    #[test]
    fn point_mass_context_distribution() {
        let mu = vec![vec![1.0, 0.0]; 4];
        let inst = BanditInstance::new(vec![0.0, 0.0, 1.0, 0.0], mu, 0.1, vec![], vec![]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        assert!((0..1000).all(|_| inst.sample_context(&mut rng) == 2));
    }

    #[test]
    fn instance_validation() {
        assert!(BanditInstance::new(vec![0.5, 0.6], vec![vec![1.0, 0.0]; 2], 0.1, vec![], vec![]).is_err());
        // tied optimal actions
        assert!(BanditInstance::new(vec![1.0], vec![vec![1.0, 1.0]], 0.1, vec![], vec![]).is_err());
        let inst = BanditInstance::new(
            vec![0.5, 0.5, 0.0],
            vec![vec![1.0, 0.0], vec![0.0, 0.3], vec![0.0, 0.01]],
            0.1,
            vec![],
            vec![],
        )
        .unwrap();
        assert_eq!(inst.opt_action(1), 1);
        // zero-probability context does not count toward the gap
        assert!((inst.min_gap() - 0.3).abs() < 1e-15);
        assert!(BanditInstance::new(vec![1.0], vec![vec![1.0, 0.0]], 0.1, vec![], vec!["nope".into()]).is_err());
    }

    #[test]
    fn one_hot_representation_is_not_hls() {
        let (nx, na) = (3, 2);
        let d = nx * na;
        let mut feats = vec![0.0; nx * na * d];
        for x in 0..nx {
            for a in 0..na {
                feats[(x * na + a) * d + x * na + a] = 1.0;
            }
        }
        let rep = Representation::new("onehot", d, nx, na, feats, 1.0).unwrap();
        let mu = vec![vec![0.5, 0.1], vec![0.2, 0.9], vec![0.3, 0.0]];
        let inst = BanditInstance::new(vec![1.0 / 3.0; 3], mu, 0.1, vec![rep.clone()], vec![]).unwrap();
        let report = analyze_representation(&inst, &rep);
        assert_eq!(report.lambda_star, 0.0);
        assert!(!report.is_hls);
        assert!(!report.is_weak_hls);
        assert!(report.fit_error < 1e-12);
    }

    #[test]
    fn scalar_full_rank_representation_is_hls() {
        let inst = tiny_instance(0.1);
        let report = analyze_representation(&inst, inst.rep(0));
        assert!((report.lambda_star - 1.0).abs() < 1e-14);
        assert!(report.is_hls && report.is_weak_hls);
    }

    #[test]
    fn padding_keeps_weak_hls_but_breaks_hls() {
        // Optimal features e1, e2, e1+e2: after padding they still span the
        // constant direction, so every padded feature stays in their span.
        let feats = vec![1.0, 0.0, 0.2, 0.1, 0.0, 1.0, 0.1, 0.3, 1.0, 1.0, 0.3, 0.3];
        let rep = Representation::new("base", 2, 3, 2, feats, 2.0).unwrap();
        let mu = vec![vec![1.0, 0.2], vec![1.0, 0.4], vec![2.0, 0.6]];
        let inst = BanditInstance::new(vec![1.0 / 3.0; 3], mu, 0.1, vec![], vec![]).unwrap();
        assert!(analyze_representation(&inst, &rep).is_hls);
        let padded = rep.padded(3, 1.0).unwrap();
        let report = analyze_representation(&inst, &padded);
        assert!(!report.is_hls);
        assert!(report.lambda_star.abs() < 1e-12);
        assert!(report.is_weak_hls);
    }

    #[test]
    fn partial_overlap_is_not_weak_hls() {
        // Optimal features only span e1; a suboptimal feature has an e2 part.
        let feats = vec![1.0, 0.0, 0.5, 0.5];
        let rep = Representation::new("r", 2, 1, 2, feats, 1.0).unwrap();
        let inst = BanditInstance::new(vec![1.0], vec![vec![1.0, 0.5]], 0.1, vec![], vec![]).unwrap();
        let report = analyze_representation(&inst, &rep);
        assert!(!report.is_weak_hls);
        // The per-feature quadratic ratio is positive nonetheless.
        assert!(report.min_normalized_quadratic > 0.1);
    }

    #[test]
    fn representation_rejects_bad_tables() {
        assert!(Representation::new("r", 2, 1, 1, vec![1.0], 1.0).is_err());
        assert!(Representation::new("r", 1, 1, 1, vec![0.0], 1.0).is_err());
        assert!(Representation::new("r", 1, 1, 1, vec![1.0], 0.0).is_err());
        let r = Representation::new("r", 2, 1, 1, vec![3.0, 4.0], 1.0).unwrap();
        assert_eq!(r.feature_bound(), 5.0);
    }
}
