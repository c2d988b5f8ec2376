//! Benchmark generators: varying-dimension, weak-HLS padding, no-HLS and
//! mixing instances.
//!
//! Every generator is a pure function of `(seed, sigma, config)`. Invariants
//! that the learning guarantees assume (unique optimal arms, a minimum gap,
//! non-redundant realizable features, a misspecification floor) are enforced
//! by bounded rejection sampling.

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{
    analyze_representation, argmax, misspecification, BanditInstance, EnvError, Representation,
    Result, MISSPEC_FLOOR, SPECTRAL_EPS,
};
use crate::linalg::{self, SymMatrix};

/// Dimensions of the realizable family, in candidate order. The first dim-6
/// entry is the HLS representation.
pub const REALIZABLE_DIMS: [usize; 6] = [2, 3, 4, 5, 6, 6];
/// Dimensions of the random misspecified representations.
pub const RANDOM_MISSPEC_DIMS: [usize; 5] = [3, 9, 12, 12, 18];
/// Dimension of the representation the reward table is drawn from.
pub const HLS_DIM: usize = 6;
/// Constant coordinates appended in the weak-HLS benchmark.
pub const WEAK_PAD: usize = 5;

/// Shape and acceptance parameters shared by all generators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GeneratorConfig {
    pub n_contexts: usize,
    pub n_actions: usize,
    /// Every context must separate its best action by at least this much.
    pub min_gap: f64,
    /// Rejection budget per representation (and per context row).
    pub max_attempts: usize,
    /// Minimum eigenvalue of the all-actions design for realizable reps.
    pub non_redundancy: f64,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            n_contexts: 100,
            n_actions: 5,
            min_gap: 0.05,
            max_attempts: 500,
            non_redundancy: 1e-6,
        }
    }
}

impl GeneratorConfig {
    fn validate(&self) -> Result<()> {
        if self.n_contexts == 0 || self.n_actions < 2 {
            return Err(EnvError::Invalid("need at least one context and two actions".into()));
        }
        if !(self.min_gap > 0.0) || self.min_gap >= 2.0 {
            return Err(EnvError::Invalid("min_gap must lie in (0, 2)".into()));
        }
        if self.max_attempts == 0 {
            return Err(EnvError::Invalid("max_attempts must be positive".into()));
        }
        Ok(())
    }
}

/// Shared ingredients of the varying-dimension family.
struct Family {
    rho: Vec<f64>,
    mu: Vec<Vec<f64>>,
    /// Realizable reps in candidate order; index 4 is HLS.
    realizable: Vec<(Representation, Vec<f64>)>,
    /// Non-HLS replacement for the HLS rep.
    deranked: Representation,
    misspecified: Vec<Representation>,
}

const HLS_SLOT: usize = 4;

fn gaussian_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.sample::<f64, _>(StandardNormal)).collect()
}

fn unit_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    loop {
        let v = gaussian_vec(rng, d);
        let n = linalg::norm2(&v);
        if n > 1e-6 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

/// Random direction with norm uniform in `[0.5, 1]`.
fn random_theta(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    let r = rng.random_range(0.5..=1.0);
    unit_vec(rng, d).into_iter().map(|c| c * r).collect()
}

/// Unit vector orthogonal to `theta`.
fn orthogonal_unit(rng: &mut ChaCha8Rng, theta: &[f64]) -> Vec<f64> {
    let tn2 = linalg::dot(theta, theta);
    loop {
        let mut v = gaussian_vec(rng, theta.len());
        let c = linalg::dot(&v, theta) / tn2;
        v.iter_mut().zip(theta).for_each(|(vi, ti)| *vi -= c * ti);
        let n = linalg::norm2(&v);
        if n > 1e-3 {
            return v.into_iter().map(|c| c / n).collect();
        }
    }
}

fn mu_row_gap(row: &[f64]) -> f64 {
    let best = argmax(row);
    let second = row
        .iter()
        .enumerate()
        .filter(|(a, _)| *a != best)
        .map(|(_, v)| *v)
        .fold(f64::NEG_INFINITY, f64::max);
    row[best] - second
}

/// Unit-norm feature whose component along the unit vector `theta` is
/// uniform on `[-1, 1]`, the remainder pointing in a uniform orthogonal
/// direction. Rewards `φ^T θ` then spread evenly over `[-1, 1]`.
fn spread_feature(rng: &mut ChaCha8Rng, theta: &[f64]) -> Vec<f64> {
    let v: f64 = rng.random_range(-1.0..=1.0);
    let w = orthogonal_unit(rng, theta);
    let r = (1.0 - v * v).max(0.0).sqrt();
    theta.iter().zip(&w).map(|(t, o)| v * t + r * o).collect()
}

/// Unit-norm features and a unit parameter direction, so `|μ| <= 1` with
/// rewards covering the whole range. Contexts are redrawn individually
/// until their gap clears `min_gap`.
fn draw_hls_candidate(
    rng: &mut ChaCha8Rng,
    cfg: &GeneratorConfig,
) -> Result<(Vec<f64>, Vec<f64>, Vec<Vec<f64>>)> {
    let (nx, na, d) = (cfg.n_contexts, cfg.n_actions, HLS_DIM);
    let theta = unit_vec(rng, d);
    let mut features = Vec::with_capacity(nx * na * d);
    let mut mu = Vec::with_capacity(nx);
    for _ in 0..nx {
        let mut accepted = None;
        for _ in 0..cfg.max_attempts {
            let rows: Vec<Vec<f64>> = (0..na).map(|_| spread_feature(rng, &theta)).collect();
            let vals: Vec<f64> = rows.iter().map(|r| linalg::dot(r, &theta)).collect();
            if mu_row_gap(&vals) >= cfg.min_gap {
                accepted = Some((rows, vals));
                break;
            }
        }
        let (rows, vals) = accepted.ok_or_else(|| EnvError::Generation {
            what: "context meeting the minimum gap".into(),
            attempts: cfg.max_attempts,
        })?;
        rows.iter().for_each(|r| features.extend_from_slice(r));
        mu.push(vals);
    }
    Ok((features, theta, mu))
}

fn opt_actions(mu: &[Vec<f64>]) -> Vec<usize> {
    mu.iter().map(|r| argmax(r)).collect()
}

/// Removes the component along `u` from the optimal-arm features (and from
/// every arm of the contexts listed in `full_contexts`). Realizability is
/// preserved because `u ⊥ θ`.
fn project_out(
    features: &mut [f64],
    d: usize,
    na: usize,
    opt: &[usize],
    u: &[f64],
    full_contexts: &[bool],
) {
    for (x, &astar) in opt.iter().enumerate() {
        for a in 0..na {
            if a != astar && !full_contexts[x] {
                continue;
            }
            let row = &mut features[(x * na + a) * d..(x * na + a + 1) * d];
            let c = linalg::dot(row, u);
            row.iter_mut().zip(u).for_each(|(r, ui)| *r -= c * ui);
        }
    }
}

/// Builds a realizable representation of dimension `d` for `mu`, optionally
/// de-ranked along a random direction orthogonal to its parameter.
/// Returns the representation (normalized to `L = 1`) and its parameter.
fn realizable_rep(
    rng: &mut ChaCha8Rng,
    cfg: &GeneratorConfig,
    id: &str,
    d: usize,
    mu: &[Vec<f64>],
    rho: &[f64],
    make_hls: bool,
    full_contexts: &[bool],
) -> Result<(Representation, Vec<f64>)> {
    let (nx, na) = (cfg.n_contexts, cfg.n_actions);
    let opt = opt_actions(mu);
    for _ in 0..cfg.max_attempts {
        let theta = random_theta(rng, d);
        let last = theta[d - 1];
        if last.abs() < 0.3 * linalg::norm2(&theta) {
            continue;
        }
        let mut features = Vec::with_capacity(nx * na * d);
        for row in mu {
            for &m in row {
                let head = gaussian_vec(rng, d - 1);
                let partial = linalg::dot(&head, &theta[..d - 1]);
                features.extend_from_slice(&head);
                features.push((m - partial) / last);
            }
        }
        if !make_hls {
            let u = orthogonal_unit(rng, &theta);
            project_out(&mut features, d, na, &opt, &u, full_contexts);
        }
        let Some((rep, theta)) = normalize(id, d, nx, na, features, &theta)? else {
            continue;
        };
        if accept_realizable(rep.clone(), &theta, mu, rho, cfg, make_hls)? {
            return Ok((rep, theta));
        }
    }
    Err(EnvError::Generation {
        what: format!("realizable representation {id}"),
        attempts: cfg.max_attempts,
    })
}

/// Rescales features to `L = 1` and the parameter inversely, with
/// `B = ||θ*||`.
fn normalize(
    id: &str,
    d: usize,
    nx: usize,
    na: usize,
    features: Vec<f64>,
    theta: &[f64],
) -> Result<Option<(Representation, Vec<f64>)>> {
    let raw = Representation::new(id, d, nx, na, features, 1.0)?;
    let l = raw.feature_bound();
    let theta: Vec<f64> = theta.iter().map(|t| t * l).collect();
    let b = linalg::norm2(&theta);
    if !(b > 0.0) {
        return Ok(None);
    }
    let rep = Representation::new(
        id,
        d,
        nx,
        na,
        raw.features().iter().map(|v| v / l).collect(),
        b,
    )?;
    Ok(Some((rep, theta)))
}

fn accept_realizable(
    rep: Representation,
    theta: &[f64],
    mu: &[Vec<f64>],
    rho: &[f64],
    cfg: &GeneratorConfig,
    want_hls: bool,
) -> Result<bool> {
    let probe = BanditInstance::new(rho.to_vec(), mu.to_vec(), 0.0, vec![], vec![])?;
    if probe.max_residual(&rep, theta) > 1e-9 {
        return Ok(false);
    }
    if linalg::min_eigenvalue(&probe.full_design(&rep), 1e-14) <= cfg.non_redundancy {
        return Ok(false);
    }
    let lambda_star = linalg::min_eigenvalue(&probe.optimal_design(&rep), 1e-14);
    Ok((lambda_star > SPECTRAL_EPS) == want_hls)
}

/// Random Gaussian features normalized to `L = 1` with `B = 1`.
fn random_misspecified(
    rng: &mut ChaCha8Rng,
    cfg: &GeneratorConfig,
    probe: &BanditInstance,
    id: &str,
    d: usize,
) -> Result<Representation> {
    let (nx, na) = (cfg.n_contexts, cfg.n_actions);
    for _ in 0..cfg.max_attempts {
        let features = gaussian_vec(rng, nx * na * d);
        let raw = Representation::new(id, d, nx, na, features, 1.0)?;
        let rep = raw.scaled(1.0 / raw.feature_bound())?;
        let rep = Representation::new(id, d, nx, na, rep.features().to_vec(), 1.0)?;
        if misspecification(probe, &rep) > MISSPEC_FLOOR {
            return Ok(rep);
        }
    }
    Err(EnvError::Generation {
        what: format!("misspecified representation {id}"),
        attempts: cfg.max_attempts,
    })
}

/// Coordinates of `theta` with the `k` smallest magnitudes, ascending index.
fn weakest_coords(theta: &[f64], k: usize) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..theta.len()).collect();
    idx.sort_by(|&i, &j| theta[i].abs().total_cmp(&theta[j].abs()).then(i.cmp(&j)));
    let mut keep = idx[..k].to_vec();
    keep.sort_unstable();
    keep
}

fn build_family(seed: u64, cfg: &GeneratorConfig) -> Result<Family> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let rho = vec![1.0 / cfg.n_contexts as f64; cfg.n_contexts];
    let none = vec![false; cfg.n_contexts];

    for _ in 0..cfg.max_attempts {
        let (hls_features, hls_theta, mu) = draw_hls_candidate(&mut rng, cfg)?;
        let Some((hls, hls_theta)) = normalize(
            "hls_d6",
            HLS_DIM,
            cfg.n_contexts,
            cfg.n_actions,
            hls_features,
            &hls_theta,
        )?
        else {
            continue;
        };
        if !accept_realizable(hls.clone(), &hls_theta, &mu, &rho, cfg, true)? {
            continue;
        }

        let mut realizable = Vec::with_capacity(REALIZABLE_DIMS.len());
        for (slot, &d) in REALIZABLE_DIMS.iter().enumerate() {
            if slot == HLS_SLOT {
                realizable.push((hls.clone(), hls_theta.clone()));
            } else {
                let id = if slot > HLS_SLOT { format!("real_d{d}b") } else { format!("real_d{d}") };
                realizable.push(realizable_rep(&mut rng, cfg, &id, d, &mu, &rho, false, &none)?);
            }
        }

        // Non-HLS twin of the HLS rep, sharing its parameter.
        let u = orthogonal_unit(&mut rng, &hls_theta);
        let mut feats = hls.features().to_vec();
        project_out(&mut feats, HLS_DIM, cfg.n_actions, &opt_actions(&mu), &u, &none);
        let (deranked, deranked_theta) = normalize(
            "real_d6c",
            HLS_DIM,
            cfg.n_contexts,
            cfg.n_actions,
            feats,
            &hls_theta,
        )?
        .ok_or_else(|| EnvError::Invalid("degenerate de-ranked representation".into()))?;
        if !accept_realizable(deranked.clone(), &deranked_theta, &mu, &rho, cfg, false)? {
            continue;
        }

        let probe = BanditInstance::new(rho.clone(), mu.clone(), 0.0, vec![], vec![])?;
        let mut misspecified = Vec::new();
        let mut ok = true;
        for (id, k) in [("mis_half_d3", HLS_DIM / 2), ("mis_third_d2", HLS_DIM / 3)] {
            let sub = hls.subset(&weakest_coords(&hls_theta, k), id)?;
            let sub = sub.scaled(1.0 / sub.feature_bound())?;
            if misspecification(&probe, &sub) <= MISSPEC_FLOOR {
                ok = false;
                break;
            }
            misspecified.push(sub);
        }
        if !ok {
            continue;
        }
        let suffixes = ["", "", "a", "b", ""];
        for (&d, sfx) in RANDOM_MISSPEC_DIMS.iter().zip(suffixes) {
            let id = format!("mis_rand_d{d}{sfx}");
            misspecified.push(random_misspecified(&mut rng, cfg, &probe, &id, d)?);
        }
        return Ok(Family {
            rho,
            mu,
            realizable,
            deranked,
            misspecified,
        });
    }
    Err(EnvError::Generation {
        what: "varying-dimension family".into(),
        attempts: cfg.max_attempts,
    })
}

fn assemble(
    family: &Family,
    sigma: f64,
    realizable: Vec<Representation>,
    with_misspecified: bool,
) -> Result<BanditInstance> {
    let star_ids = realizable.iter().map(|r| r.id().to_string()).collect();
    let mut reps = realizable;
    if with_misspecified {
        reps.extend(family.misspecified.iter().cloned());
    }
    BanditInstance::new(family.rho.clone(), family.mu.clone(), sigma, reps, star_ids)
}

fn realizable_reps(family: &Family) -> Vec<Representation> {
    family.realizable.iter().map(|(r, _)| r.clone()).collect()
}

/// Six realizable representations (dims 2, 3, 4, 5, 6, 6; exactly one HLS)
/// followed by seven misspecified ones (two feature subsets of the HLS rep
/// and random reps of dims 3, 9, 12, 12, 18).
pub fn make_varying_dimension(seed: u64, sigma: f64, cfg: &GeneratorConfig) -> Result<BanditInstance> {
    let family = build_family(seed, cfg)?;
    assemble(&family, sigma, realizable_reps(&family), true)
}

/// The six realizable representations only.
pub fn make_varying_dimension_realizable_only(
    seed: u64,
    sigma: f64,
    cfg: &GeneratorConfig,
) -> Result<BanditInstance> {
    let family = build_family(seed, cfg)?;
    assemble(&family, sigma, realizable_reps(&family), false)
}

/// The six realizable representations with the HLS one replaced by a
/// de-ranked twin, so no candidate is HLS. Misspecified reps are left out so
/// the no-HLS regime is not masked by the elimination stretch.
pub fn make_varying_dimension_no_hls(
    seed: u64,
    sigma: f64,
    cfg: &GeneratorConfig,
) -> Result<BanditInstance> {
    let family = build_family(seed, cfg)?;
    let mut reps = realizable_reps(&family);
    reps[HLS_SLOT] = family.deranked.clone();
    assemble(&family, sigma, reps, false)
}

/// Varying-dimension instance whose realizable representations gain
/// `WEAK_PAD` constant-one coordinates; parameters are extended with zeros.
pub fn make_weak_hls(seed: u64, sigma: f64, cfg: &GeneratorConfig) -> Result<BanditInstance> {
    let family = build_family(seed, cfg)?;
    let padded = family
        .realizable
        .iter()
        .map(|(r, _)| {
            let id = format!("{}_pad", r.id());
            r.padded(WEAK_PAD, 1.0).map(|p| p.with_id(id))
        })
        .collect::<Result<Vec<_>>>()?;
    assemble(&family, sigma, padded, true)
}

/// One representation of the varying-dimension family on its own: the HLS
/// rep when `hls`, otherwise its de-ranked twin.
pub fn make_single_rep(seed: u64, sigma: f64, hls: bool, cfg: &GeneratorConfig) -> Result<BanditInstance> {
    let family = build_family(seed, cfg)?;
    let rep = if hls {
        family.realizable[HLS_SLOT].0.clone()
    } else {
        family.deranked.clone()
    };
    assemble(&family, sigma, vec![rep], false)
}

/// Number of representations in the mixing benchmark.
pub const MIXING_REPS: usize = 6;

/// Six realizable dim-6 representations, none HLS, whose optimal-arm
/// features cover `R^6` when pooled. Each representation is de-ranked along
/// its own direction and additionally has every arm of its own block of
/// contexts confined to its optimal-arm span, so each context is "well
/// represented" by at least one candidate.
pub fn make_mixing(seed: u64, sigma: f64, cfg: &GeneratorConfig) -> Result<BanditInstance> {
    cfg.validate()?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x6d69_7869_6e67);
    let rho = vec![1.0 / cfg.n_contexts as f64; cfg.n_contexts];
    for _ in 0..cfg.max_attempts {
        let (_, _, mu) = draw_hls_candidate(&mut rng, cfg)?;
        let mut reps = Vec::with_capacity(MIXING_REPS);
        for k in 0..MIXING_REPS {
            let block: Vec<bool> = (0..cfg.n_contexts).map(|x| x % MIXING_REPS == k).collect();
            let id = format!("mix_{k}");
            let (rep, _) = realizable_rep(&mut rng, cfg, &id, HLS_DIM, &mu, &rho, false, &block)?;
            reps.push(rep);
        }
        let probe = BanditInstance::new(rho.clone(), mu.clone(), sigma, vec![], vec![])?;
        if mixture_min_eigenvalue(&probe, &reps) > 1e-6 {
            let star_ids = reps.iter().map(|r| r.id().to_string()).collect();
            return BanditInstance::new(rho, mu, sigma, reps, star_ids);
        }
    }
    Err(EnvError::Generation {
        what: "mixing instance".into(),
        attempts: cfg.max_attempts,
    })
}

/// `λ_min(Σ_x ρ(x) φ_{k(x)}(x, a*) φ_{k(x)}(x, a*)^T)` for the per-context
/// representation assignment `k(x)` found by one greedy coordinate pass.
pub fn mixture_min_eigenvalue(instance: &BanditInstance, reps: &[Representation]) -> f64 {
    if reps.is_empty() {
        return 0.0;
    }
    let d = reps[0].dim();
    if reps.iter().any(|r| r.dim() != d) {
        return 0.0;
    }
    let nx = instance.n_contexts();
    let contribution = |k: usize, x: usize| reps[k].feature(x, instance.opt_action(x));
    let mut assign = vec![0usize; nx];
    let pooled = |assign: &[usize]| {
        let mut m = SymMatrix::zeros(d);
        for x in 0..nx {
            m.add_outer(contribution(assign[x], x), instance.rho()[x]);
        }
        m
    };
    for x in 0..nx {
        let mut best = (f64::NEG_INFINITY, 0);
        for k in 0..reps.len() {
            assign[x] = k;
            let v = linalg::min_eigenvalue(&pooled(&assign), 1e-14);
            if v > best.0 {
                best = (v, k);
            }
        }
        assign[x] = best.1;
    }
    linalg::min_eigenvalue(&pooled(&assign), 1e-14)
}

/// Spectral reports for every candidate of an instance.
pub fn analyze_all(instance: &BanditInstance) -> Vec<super::SpectralReport> {
    instance
        .reps()
        .iter()
        .map(|r| analyze_representation(instance, r))
        .collect()
}
