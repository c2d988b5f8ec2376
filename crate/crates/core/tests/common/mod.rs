//! Independent reference implementations shared by the integration tests.
//!
//! Nothing here calls into the library's numerical routines: eigenvalues come
//! from characteristic-polynomial roots, inverses from Gauss-Jordan
//! elimination, constrained fits from projections and 1-D searches.

#![allow(dead_code)]

use banditsrl::env::Representation;
use banditsrl::linalg::{self, RlsState, SymMatrix};
use banditsrl::srl::glr_statistic;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

pub type Dense = Vec<Vec<f64>>;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn random_symmetric(rng: &mut ChaCha8Rng, d: usize) -> Dense {
    let mut m = vec![vec![0.0; d]; d];
    for i in 0..d {
        for j in i..d {
            let v = rng.random_range(-1.0..1.0);
            m[i][j] = v;
            m[j][i] = v;
        }
    }
    m
}

pub fn random_vec(rng: &mut ChaCha8Rng, d: usize) -> Vec<f64> {
    (0..d).map(|_| rng.random_range(-1.0..1.0)).collect()
}

pub fn to_sym(m: &Dense) -> SymMatrix {
    SymMatrix::from_rows(m).expect("square symmetric input")
}

pub fn mat_vec(m: &Dense, v: &[f64]) -> Vec<f64> {
    m.iter().map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Eigenvalues (ascending) of a symmetric matrix with `d <= 3`, as roots of
/// the characteristic polynomial: closed form for the seed, then Newton
/// polishing on the polynomial itself.
pub fn charpoly_eigenvalues(m: &Dense) -> Vec<f64> {
    match m.len() {
        1 => vec![m[0][0]],
        2 => {
            let (a, b, d) = (m[0][0], m[0][1], m[1][1]);
            let mid = 0.5 * (a + d);
            let rad = (0.25 * (a - d) * (a - d) + b * b).sqrt();
            vec![mid - rad, mid + rad]
        }
        3 => {
            // det(λI - M) = λ³ - c2 λ² + c1 λ - c0.
            let c2 = m[0][0] + m[1][1] + m[2][2];
            let c1 = m[0][0] * m[1][1] + m[0][0] * m[2][2] + m[1][1] * m[2][2]
                - m[0][1] * m[0][1]
                - m[0][2] * m[0][2]
                - m[1][2] * m[1][2];
            let c0 = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[1][2])
                - m[0][1] * (m[0][1] * m[2][2] - m[1][2] * m[0][2])
                + m[0][2] * (m[0][1] * m[1][2] - m[1][1] * m[0][2]);
            let p = |l: f64| ((l - c2) * l + c1) * l - c0;
            let dp = |l: f64| (3.0 * l - 2.0 * c2) * l + c1;
            // Trigonometric roots of the depressed cubic.
            let q = c2 / 3.0;
            let pp = (c2 * c2 - 3.0 * c1) / 9.0;
            let mut roots = if pp <= 0.0 {
                vec![q; 3]
            } else {
                let r = (2.0 * c2.powi(3) - 9.0 * c2 * c1 + 27.0 * c0) / 54.0;
                let s = pp.sqrt();
                let phi = (r / (s * s * s)).clamp(-1.0, 1.0).acos();
                (0..3)
                    .map(|k| q + 2.0 * s * ((phi + 2.0 * std::f64::consts::PI * k as f64) / 3.0).cos())
                    .collect()
            };
            for r in roots.iter_mut() {
                for _ in 0..4 {
                    let g = dp(*r);
                    if g.abs() < 1e-12 {
                        break;
                    }
                    let step = p(*r) / g;
                    if !step.is_finite() {
                        break;
                    }
                    *r -= step;
                }
            }
            roots.sort_by(f64::total_cmp);
            roots
        }
        d => panic!("characteristic-polynomial oracle covers d <= 3, got {d}"),
    }
}

/// Rayleigh quotient of the dominant vector of `s I - M` by power iteration.
pub fn power_min_eigenvalue(m: &Dense, iters: usize) -> f64 {
    let d = m.len();
    let shift: f64 = m.iter().flatten().map(|v| v * v).sum::<f64>().sqrt() + 1.0;
    let mut v: Vec<f64> = (0..d).map(|i| 1.0 + 0.1 * i as f64).collect();
    for _ in 0..iters {
        let mv = mat_vec(m, &v);
        let w: Vec<f64> = v.iter().zip(&mv).map(|(a, b)| shift * a - b).collect();
        let n = dot(&w, &w).sqrt();
        v = w.iter().map(|x| x / n).collect();
    }
    dot(&v, &mat_vec(m, &v)) / dot(&v, &v)
}

/// Gauss-Jordan inverse with partial pivoting.
pub fn gauss_jordan_inverse(m: &Dense) -> Dense {
    let d = m.len();
    let mut a: Dense = m
        .iter()
        .enumerate()
        .map(|(i, row)| {
            let mut r = row.clone();
            r.extend((0..d).map(|j| if i == j { 1.0 } else { 0.0 }));
            r
        })
        .collect();
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))
            .unwrap();
        a.swap(col, pivot);
        let p = a[col][col];
        assert!(p.abs() > 1e-300, "singular matrix");
        a[col].iter_mut().for_each(|v| *v /= p);
        for r in 0..d {
            if r != col {
                let f = a[r][col];
                if f != 0.0 {
                    let pivot_row = a[col].clone();
                    a[r].iter_mut().zip(&pivot_row).for_each(|(v, pv)| *v -= f * pv);
                }
            }
        }
    }
    a.into_iter().map(|row| row[d..].to_vec()).collect()
}

/// `V = λI + Σ φφᵀ` and `b = Σ φ y` from scratch.
pub fn ridge_system(samples: &[(Vec<f64>, f64)], d: usize, lambda: f64) -> (Dense, Vec<f64>) {
    let mut v = vec![vec![0.0; d]; d];
    let mut b = vec![0.0; d];
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = lambda;
    }
    for (phi, y) in samples {
        for i in 0..d {
            b[i] += phi[i] * y;
            for j in 0..d {
                v[i][j] += phi[i] * phi[j];
            }
        }
    }
    (v, b)
}

/// Ridge estimate `V^{-1} b` and `V^{-1}` from scratch.
pub fn ridge_solution(samples: &[(Vec<f64>, f64)], d: usize, lambda: f64) -> (Vec<f64>, Dense) {
    let (v, b) = ridge_system(samples, d, lambda);
    let inv = gauss_jordan_inverse(&v);
    (mat_vec(&inv, &b), inv)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn dense_of(m: &SymMatrix) -> Dense {
    m.rows()
}

pub fn max_abs_diff_dense(a: &Dense, b: &Dense) -> f64 {
    a.iter().zip(b).map(|(r, s)| max_abs_diff(r, s)).fold(0.0, f64::max)
}

/// Empirical MSE of `theta` on `data`.
pub fn mse(data: &[(Vec<f64>, f64)], theta: &[f64]) -> f64 {
    data.iter().map(|(phi, y)| (dot(phi, theta) - y).powi(2)).sum::<f64>() / data.len() as f64
}

/// Golden-section minimization of a unimodal function on `[lo, hi]`.
pub fn golden_min(f: impl Fn(f64) -> f64, mut lo: f64, mut hi: f64) -> f64 {
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = hi - g * (hi - lo);
    let mut d = lo + g * (hi - lo);
    let (mut fc, mut fd) = (f(c), f(d));
    for _ in 0..200 {
        if fc < fd {
            hi = d;
            d = c;
            fd = fc;
            c = hi - g * (hi - lo);
            fc = f(c);
        } else {
            lo = c;
            c = d;
            fc = fd;
            d = lo + g * (hi - lo);
            fd = f(d);
        }
    }
    0.5 * (lo + hi)
}

/// Grid search then golden refinement around the best grid cell.
pub fn grid_min(f: impl Fn(f64) -> f64, lo: f64, hi: f64, cells: usize) -> f64 {
    let h = (hi - lo) / cells as f64;
    let best = (0..=cells)
        .map(|i| lo + h * i as f64)
        .min_by(|a, b| f(*a).total_cmp(&f(*b)))
        .unwrap();
    golden_min(&f, (best - h).max(lo), (best + h).min(hi))
}

/// Ball-constrained least squares in one dimension: clamp the unconstrained
/// solution to `[-B, B]` (projection oracle).
pub fn ball_ls_1d_projection(data: &[(Vec<f64>, f64)], bound: f64) -> f64 {
    let sxx: f64 = data.iter().map(|(p, _)| p[0] * p[0]).sum();
    let sxy: f64 = data.iter().map(|(p, y)| p[0] * y).sum();
    (sxy / sxx).clamp(-bound, bound)
}

/// Ball-constrained least squares in one dimension by grid search.
pub fn ball_ls_1d_grid(data: &[(Vec<f64>, f64)], bound: f64) -> f64 {
    grid_min(|t| mse(data, &[t]), -bound, bound, 4000)
}

/// Ball-constrained least squares in two dimensions: the unconstrained
/// solution when feasible, otherwise a 1-D search over the boundary angle.
pub fn ball_ls_2d_angle(data: &[(Vec<f64>, f64)], bound: f64) -> Vec<f64> {
    let (v, b) = ridge_system(data, 2, 0.0);
    let free = mat_vec(&gauss_jordan_inverse(&v), &b);
    if dot(&free, &free).sqrt() <= bound {
        return free;
    }
    let on_circle = |a: f64| [bound * a.cos(), bound * a.sin()];
    let pi = std::f64::consts::PI;
    let a = grid_min(|a| mse(data, &on_circle(a)), -pi, pi, 20_000);
    on_circle(a).to_vec()
}

/// `min_{a≠â} (φ_â - φ_a)ᵀθ / ||φ_â - φ_a||_{V^{-1}}` evaluated directly, with
/// `θ` and `V^{-1}` recomputed from the raw samples.
pub fn glr_direct(features: &[Vec<f64>], samples: &[(Vec<f64>, f64)], lambda: f64) -> f64 {
    let d = features[0].len();
    let (theta, vinv) = ridge_solution(samples, d, lambda);
    let vals: Vec<f64> = features.iter().map(|f| dot(f, &theta)).collect();
    let mut best = 0;
    for (a, v) in vals.iter().enumerate() {
        if *v > vals[best] {
            best = a;
        }
    }
    let mut glr = f64::INFINITY;
    for a in 0..features.len() {
        if a == best {
            continue;
        }
        let diff: Vec<f64> = features[best].iter().zip(&features[a]).map(|(s, p)| s - p).collect();
        let num = vals[best] - vals[a];
        let den = dot(&diff, &mat_vec(&vinv, &diff)).sqrt();
        glr = glr.min(num / den);
    }
    glr
}

/// Random small GLR state: one context, `na` arms in `d` dims, `n` samples.
pub struct GlrCase {
    pub features: Vec<Vec<f64>>,
    pub samples: Vec<(Vec<f64>, f64)>,
    pub lambda: f64,
}

impl GlrCase {
    pub fn random(rng: &mut ChaCha8Rng) -> Self {
        let d = rng.random_range(1..=4);
        let na = rng.random_range(2..=5);
        let n = rng.random_range(1..=40);
        let features: Vec<Vec<f64>> = (0..na).map(|_| random_vec(rng, d)).collect();
        let theta = random_vec(rng, d);
        let samples = (0..n)
            .map(|_| {
                let a = rng.random_range(0..na);
                let y = dot(&features[a], &theta) + 0.3 * rng.random_range(-1.0..1.0);
                (features[a].clone(), y)
            })
            .collect();
        Self {
            features,
            samples,
            lambda: rng.random_range(0.5..2.0),
        }
    }

    pub fn library_value(&self) -> f64 {
        let d = self.features[0].len();
        let flat: Vec<f64> = self.features.iter().flatten().copied().collect();
        let rep = Representation::new("case", d, 1, self.features.len(), flat, 1.0).unwrap();
        let mut rls = RlsState::new(d, self.lambda).unwrap();
        for (phi, y) in &self.samples {
            rls.update(phi, *y).unwrap();
        }
        glr_statistic(0, &rep, &rls)
    }

    pub fn oracle_value(&self) -> f64 {
        glr_direct(&self.features, &self.samples, self.lambda)
    }
}

/// Worst deviations of the library from each oracle family, as
/// `(name, max error, tolerance)`.
pub fn oracle_suite() -> Vec<(&'static str, f64, f64)> {
    let mut out = Vec::new();

    // Minimum eigenvalue vs characteristic-polynomial roots.
    let mut r = rng(8);
    let mut worst = 0.0f64;
    for i in 0..1000 {
        let d = 1 + i % 3;
        let m = random_symmetric(&mut r, d);
        let oracle = charpoly_eigenvalues(&m)[0];
        let lib = linalg::min_eigenvalue(&to_sym(&m), 1e-14);
        worst = worst.max((lib - oracle).abs());
    }
    out.push(("min eigenvalue vs characteristic roots", worst, 1e-8));

    // Rank-1 maintained inverse vs Gauss-Jordan, across periodic refreshes.
    let mut r = rng(9);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let d = r.random_range(1..=6);
        let mut rls = RlsState::new(d, 1.0).unwrap();
        let mut samples = Vec::new();
        for step in 0..1500 {
            let phi = random_vec(&mut r, d);
            let y = r.random_range(-1.0..1.0);
            rls.update(&phi, y).unwrap();
            samples.push((phi, y));
            if step % 250 == 0 || step == 1499 {
                let (_, inv) = ridge_solution(&samples, d, 1.0);
                let scale = inv.iter().flatten().fold(1.0f64, |m, v| m.max(v.abs()));
                worst = worst.max(max_abs_diff_dense(&dense_of(rls.v_inv()), &inv) / scale);
            }
        }
    }
    out.push(("Sherman-Morrison inverse vs direct inverse", worst, 1e-8));

    // Ball-constrained least squares vs projection / 1-D search oracles.
    let mut r = rng(10);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let n = r.random_range(2..30);
        let bound = r.random_range(0.1..2.0);
        let slope = r.random_range(-3.0..3.0);
        let data1: Vec<(Vec<f64>, f64)> = (0..n)
            .map(|_| {
                let x = r.random_range(-1.0..1.0);
                (vec![x], slope * x + 0.2 * r.random_range(-1.0..1.0))
            })
            .collect();
        let fit = linalg::constrained_ls(&data1, bound, 1e-12, 1e-12).unwrap();
        worst = worst.max((fit.theta[0] - ball_ls_1d_projection(&data1, bound)).abs());
        worst = worst.max((fit.theta[0] - ball_ls_1d_grid(&data1, bound)).abs());

        let target = [r.random_range(-3.0..3.0), r.random_range(-3.0..3.0)];
        let data2: Vec<(Vec<f64>, f64)> = (0..n.max(4))
            .map(|_| {
                let x = random_vec(&mut r, 2);
                let y = dot(&x, &target) + 0.2 * r.random_range(-1.0..1.0);
                (x, y)
            })
            .collect();
        let fit = linalg::constrained_ls(&data2, bound, 1e-12, 1e-12).unwrap();
        worst = worst.max(max_abs_diff(&fit.theta, &ball_ls_2d_angle(&data2, bound)));
    }
    out.push(("constrained least squares vs grid/projection", worst, 1e-6));

    // Warm-started state vs from-scratch recomputation.
    let mut r = rng(11);
    let mut worst = 0.0f64;
    for _ in 0..20 {
        let d = r.random_range(1..=8);
        let n = r.random_range(1..2500);
        let samples: Vec<(Vec<f64>, f64)> =
            (0..n).map(|_| (random_vec(&mut r, d), r.random_range(-1.0..1.0))).collect();
        let mut warm = RlsState::new(d, 1.0).unwrap();
        for (phi, y) in &samples {
            warm.update(phi, *y).unwrap();
        }
        let (theta, _) = ridge_solution(&samples, d, 1.0);
        worst = worst.max(max_abs_diff(warm.theta(), &theta));
    }
    out.push(("warm-started state vs from-scratch", worst, 1e-8));

    // GLR statistic vs direct formula.
    let mut r = rng(12);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let case = GlrCase::random(&mut r);
        let (lib, oracle) = (case.library_value(), case.oracle_value());
        let err = if lib == oracle { 0.0 } else { (lib - oracle).abs() / oracle.abs().max(1.0) };
        worst = worst.max(err);
    }
    out.push(("GLR statistic vs direct formula", worst, 1e-10));

    out
}
