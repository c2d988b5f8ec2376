//! Small dense symmetric linear algebra.
//!
//! Everything here is sized for feature dimensions in the tens: design
//! matrices, their maintained inverses, cyclic Jacobi spectra and the
//! ball-constrained least-squares solve used by the realizability test.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Number of rank-1 inverse updates between full re-inversions of `V`.
pub const REINVERT_EVERY: u64 = 1000;

/// Off-diagonal convergence threshold for Jacobi sweeps, relative to the
/// Frobenius norm of the input.
const JACOBI_REL_THRESHOLD: f64 = 1e-12;
const JACOBI_MAX_SWEEPS: usize = 100;

/// Bisection settings for [`constrained_ls`].
pub const BALL_TOL: f64 = 1e-8;
const BALL_MAX_ITERS: usize = 200;
/// Gram eigenvalues below this fraction of the largest are treated as zero.
const NULL_REL_TOL: f64 = 1e-10;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum LinalgError {
    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },
    #[error("non-finite input: {0}")]
    NonFinite(&'static str),
    #[error("matrix is not symmetric at ({row}, {col})")]
    NotSymmetric { row: usize, col: usize },
    #[error("matrix is singular to working precision")]
    Singular,
    #[error("matrix lost positive definiteness (quadratic form {0:e})")]
    NotPositiveDefinite(f64),
    #[error("ball-constrained bisection did not converge after {0} iterations")]
    NoConvergence(usize),
    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),
}

pub type Result<T> = std::result::Result<T, LinalgError>;

/// Dense symmetric matrix with full row-major storage.
///
/// All mutators write both `(i, j)` and `(j, i)`, so symmetry holds exactly.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SymMatrix {
    dim: usize,
    data: Vec<f64>,
}

impl SymMatrix {
    pub fn zeros(dim: usize) -> Self {
        assert!(dim >= 1, "SymMatrix dimension must be positive");
        Self {
            dim,
            data: vec![0.0; dim * dim],
        }
    }

    pub fn scaled_identity(dim: usize, value: f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            m.data[i * dim + i] = value;
        }
        m
    }

    pub fn identity(dim: usize) -> Self {
        Self::scaled_identity(dim, 1.0)
    }

    /// Builds from explicit rows; rejects anything not exactly symmetric.
    pub fn from_rows(rows: &[Vec<f64>]) -> Result<Self> {
        let dim = rows.len();
        if dim == 0 {
            return Err(LinalgError::InvalidArgument("empty matrix"));
        }
        let mut data = Vec::with_capacity(dim * dim);
        for row in rows {
            if row.len() != dim {
                return Err(LinalgError::DimensionMismatch {
                    expected: dim,
                    actual: row.len(),
                });
            }
            data.extend_from_slice(row);
        }
        for i in 0..dim {
            for j in (i + 1)..dim {
                if data[i * dim + j] != data[j * dim + i] {
                    return Err(LinalgError::NotSymmetric { row: i, col: j });
                }
            }
        }
        Ok(Self { dim, data })
    }

    /// Builds from the upper triangle produced by `f(i, j)` with `i <= j`.
    pub fn from_upper(dim: usize, mut f: impl FnMut(usize, usize) -> f64) -> Self {
        let mut m = Self::zeros(dim);
        for i in 0..dim {
            for j in i..dim {
                m.set(i, j, f(i, j));
            }
        }
        m
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.dim
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.data[i * self.dim + j]
    }

    #[inline]
    pub fn set(&mut self, i: usize, j: usize, value: f64) {
        self.data[i * self.dim + j] = value;
        self.data[j * self.dim + i] = value;
    }

    /// Row-major view of the entries.
    pub fn as_slice(&self) -> &[f64] {
        &self.data
    }

    pub fn rows(&self) -> Vec<Vec<f64>> {
        self.data.chunks(self.dim).map(|r| r.to_vec()).collect()
    }

    pub fn mul_vec(&self, v: &[f64]) -> Vec<f64> {
        debug_assert_eq!(v.len(), self.dim);
        self.data
            .chunks_exact(self.dim)
            .map(|row| dot(row, v))
            .collect()
    }

    /// `v^T M v`.
    pub fn quad_form(&self, v: &[f64]) -> f64 {
        debug_assert_eq!(v.len(), self.dim);
        let mut acc = 0.0;
        for (i, row) in self.data.chunks_exact(self.dim).enumerate() {
            acc += v[i] * dot(row, v);
        }
        acc
    }

    /// `M += scale * v v^T`.
    pub fn add_outer(&mut self, v: &[f64], scale: f64) {
        let d = self.dim;
        for i in 0..d {
            let vi = scale * v[i];
            if vi == 0.0 {
                continue;
            }
            for j in i..d {
                let val = self.data[i * d + j] + vi * v[j];
                self.data[i * d + j] = val;
                self.data[j * d + i] = val;
            }
        }
    }

    /// `M + shift * I`.
    pub fn shifted(&self, shift: f64) -> Self {
        let mut m = self.clone();
        for i in 0..self.dim {
            m.data[i * self.dim + i] += shift;
        }
        m
    }

    pub fn scaled(&self, c: f64) -> Self {
        Self {
            dim: self.dim,
            data: self.data.iter().map(|x| c * x).collect(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.data.iter().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn trace(&self) -> f64 {
        (0..self.dim).map(|i| self.get(i, i)).sum()
    }

    /// Dense product, for diagnostics. The result is generally not symmetric.
    pub fn matmul(&self, other: &SymMatrix) -> Vec<f64> {
        let d = self.dim;
        let mut out = vec![0.0; d * d];
        for i in 0..d {
            for k in 0..d {
                let a = self.data[i * d + k];
                if a == 0.0 {
                    continue;
                }
                for j in 0..d {
                    out[i * d + j] += a * other.data[k * d + j];
                }
            }
        }
        out
    }

    /// Max-abs deviation of `self * other` from the identity.
    pub fn inverse_residual(&self, other: &SymMatrix) -> f64 {
        let d = self.dim;
        self.matmul(other)
            .iter()
            .enumerate()
            .map(|(k, x)| {
                let target = if k / d == k % d { 1.0 } else { 0.0 };
                (x - target).abs()
            })
            .fold(0.0, f64::max)
    }
}

#[inline]
pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    dot(v, v).sqrt()
}

/// Eigen-decomposition `M = U diag(values) U^T`. `vectors` is row-major with
/// eigenvectors stored in columns.
#[derive(Debug, Clone)]
pub struct SymEigen {
    pub values: Vec<f64>,
    pub vectors: Vec<f64>,
    pub dim: usize,
}

impl SymEigen {
    pub fn vector(&self, k: usize) -> Vec<f64> {
        (0..self.dim).map(|i| self.vectors[i * self.dim + k]).collect()
    }

    pub fn min_value(&self) -> f64 {
        self.values.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

fn off_diagonal_norm(a: &[f64], d: usize) -> f64 {
    let mut s = 0.0;
    for i in 0..d {
        for j in (i + 1)..d {
            s += 2.0 * a[i * d + j] * a[i * d + j];
        }
    }
    s.sqrt()
}

/// Cyclic Jacobi eigen-decomposition.
///
/// Sweeps until the off-diagonal Frobenius mass falls below
/// `min(tol, 1e-12 * ||M||_F)` (floored at a few ulps of `||M||_F`).
pub fn symmetric_eigen(m: &SymMatrix, tol: f64) -> SymEigen {
    let d = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut u = vec![0.0; d * d];
    for i in 0..d {
        u[i * d + i] = 1.0;
    }
    let frob = m.frobenius_norm();
    let threshold = tol
        .min(JACOBI_REL_THRESHOLD * frob)
        .max(8.0 * f64::EPSILON * frob);

    for _ in 0..JACOBI_MAX_SWEEPS {
        if off_diagonal_norm(&a, d) <= threshold {
            break;
        }
        for p in 0..d {
            for q in (p + 1)..d {
                let apq = a[p * d + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * d + p];
                let aqq = a[q * d + q];
                let theta = (aqq - app) / (2.0 * apq);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let s = t * c;
                for k in 0..d {
                    let akp = a[k * d + p];
                    let akq = a[k * d + q];
                    a[k * d + p] = c * akp - s * akq;
                    a[k * d + q] = s * akp + c * akq;
                }
                for k in 0..d {
                    let apk = a[p * d + k];
                    let aqk = a[q * d + k];
                    a[p * d + k] = c * apk - s * aqk;
                    a[q * d + k] = s * apk + c * aqk;
                }
                a[p * d + q] = 0.0;
                a[q * d + p] = 0.0;
                for k in 0..d {
                    let ukp = u[k * d + p];
                    let ukq = u[k * d + q];
                    u[k * d + p] = c * ukp - s * ukq;
                    u[k * d + q] = s * ukp + c * ukq;
                }
            }
        }
    }
    SymEigen {
        values: (0..d).map(|i| a[i * d + i]).collect(),
        vectors: u,
        dim: d,
    }
}

/// Smallest eigenvalue of a symmetric matrix, accurate to `tol`.
pub fn min_eigenvalue(m: &SymMatrix, tol: f64) -> f64 {
    symmetric_eigen(m, tol).min_value()
}

/// `sqrt(v^T Minv v)`.
pub fn mahalanobis_norm(v: &[f64], minv: &SymMatrix) -> Result<f64> {
    if v.len() != minv.dim() {
        return Err(LinalgError::DimensionMismatch {
            expected: minv.dim(),
            actual: v.len(),
        });
    }
    let q = minv.quad_form(v);
    if q >= 0.0 {
        return Ok(q.sqrt());
    }
    // Roundoff on a (nearly) null vector is tolerated; anything larger means
    // the metric is no longer positive definite.
    let scale = dot(v, v) * minv.as_slice().iter().fold(0.0f64, |m, x| m.max(x.abs()));
    if q >= -1e-12 * scale {
        Ok(0.0)
    } else {
        Err(LinalgError::NotPositiveDefinite(q))
    }
}

/// Gauss-Jordan inverse with partial pivoting, symmetrised on output.
pub fn invert(m: &SymMatrix) -> Result<SymMatrix> {
    let d = m.dim();
    let mut a = m.as_slice().to_vec();
    let mut inv = vec![0.0; d * d];
    for i in 0..d {
        inv[i * d + i] = 1.0;
    }
    let scale = a.iter().fold(0.0f64, |s, x| s.max(x.abs()));
    for col in 0..d {
        let pivot = (col..d)
            .max_by(|&i, &j| a[i * d + col].abs().total_cmp(&a[j * d + col].abs()))
            .unwrap();
        let pv = a[pivot * d + col];
        if pv.abs() <= f64::EPSILON * scale * d as f64 || pv == 0.0 {
            return Err(LinalgError::Singular);
        }
        if pivot != col {
            for k in 0..d {
                a.swap(pivot * d + k, col * d + k);
                inv.swap(pivot * d + k, col * d + k);
            }
        }
        let r = 1.0 / pv;
        for k in 0..d {
            a[col * d + k] *= r;
            inv[col * d + k] *= r;
        }
        for i in 0..d {
            if i == col {
                continue;
            }
            let f = a[i * d + col];
            if f == 0.0 {
                continue;
            }
            for k in 0..d {
                a[i * d + k] -= f * a[col * d + k];
                inv[i * d + k] -= f * inv[col * d + k];
            }
        }
    }
    Ok(SymMatrix::from_upper(d, |i, j| {
        0.5 * (inv[i * d + j] + inv[j * d + i])
    }))
}

/// Lower-triangular Cholesky factor, row-major. Fails on non-PD input.
#[derive(Debug, Clone)]
pub struct Cholesky {
    dim: usize,
    lower: Vec<f64>,
}

impl Cholesky {
    pub fn new(m: &SymMatrix) -> Result<Self> {
        let d = m.dim();
        let mut l = vec![0.0; d * d];
        for i in 0..d {
            for j in 0..=i {
                let mut s = m.get(i, j);
                for k in 0..j {
                    s -= l[i * d + k] * l[j * d + k];
                }
                if i == j {
                    if !(s > 0.0) {
                        return Err(LinalgError::NotPositiveDefinite(s));
                    }
                    l[i * d + i] = s.sqrt();
                } else {
                    l[i * d + j] = s / l[j * d + j];
                }
            }
        }
        Ok(Self { dim: d, lower: l })
    }

    pub fn log_det(&self) -> f64 {
        (0..self.dim)
            .map(|i| 2.0 * self.lower[i * self.dim + i].ln())
            .sum()
    }

    /// `L z`.
    pub fn mul_lower(&self, z: &[f64]) -> Vec<f64> {
        let d = self.dim;
        (0..d)
            .map(|i| dot(&self.lower[i * d..i * d + i + 1], &z[..=i]))
            .collect()
    }
}

/// Regularized least-squares accumulator with a maintained inverse.
///
/// `V = λI + Σ φφ^T`, `b = Σ φ y`, `θ = V^{-1} b`. The inverse is kept by
/// rank-1 updates and fully recomputed every [`REINVERT_EVERY`] updates.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RlsState {
    dim: usize,
    lambda: f64,
    v: SymMatrix,
    v_inv: SymMatrix,
    b: Vec<f64>,
    theta: Vec<f64>,
    count: u64,
    sum_sq_y: f64,
    log_det: f64,
    since_refresh: u64,
}

impl RlsState {
    pub fn new(dim: usize, lambda: f64) -> Result<Self> {
        if dim == 0 {
            return Err(LinalgError::InvalidArgument("dimension must be positive"));
        }
        if !(lambda > 0.0) || !lambda.is_finite() {
            return Err(LinalgError::InvalidArgument("ridge must be positive"));
        }
        Ok(Self {
            dim,
            lambda,
            v: SymMatrix::scaled_identity(dim, lambda),
            v_inv: SymMatrix::scaled_identity(dim, 1.0 / lambda),
            b: vec![0.0; dim],
            theta: vec![0.0; dim],
            count: 0,
            sum_sq_y: 0.0,
            log_det: dim as f64 * lambda.ln(),
            since_refresh: 0,
        })
    }

    pub fn update(&mut self, phi: &[f64], y: f64) -> Result<()> {
        if phi.len() != self.dim {
            return Err(LinalgError::DimensionMismatch {
                expected: self.dim,
                actual: phi.len(),
            });
        }
        if !y.is_finite() {
            return Err(LinalgError::NonFinite("reward"));
        }
        if phi.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite("feature"));
        }
        self.v.add_outer(phi, 1.0);
        for (bi, pi) in self.b.iter_mut().zip(phi) {
            *bi += pi * y;
        }
        self.count += 1;
        self.sum_sq_y += y * y;
        self.since_refresh += 1;

        if self.since_refresh >= REINVERT_EVERY {
            self.refresh()?;
        } else {
            let u = self.v_inv.mul_vec(phi);
            let denom = 1.0 + dot(phi, &u);
            self.v_inv.add_outer(&u, -1.0 / denom);
            self.log_det += denom.ln();
            self.theta = self.v_inv.mul_vec(&self.b);
        }
        Ok(())
    }

    /// Recomputes `V^{-1}`, `log det V` and `θ` from `V` and `b` directly.
    pub fn refresh(&mut self) -> Result<()> {
        self.v_inv = invert(&self.v)?;
        self.log_det = Cholesky::new(&self.v)?.log_det();
        self.theta = self.v_inv.mul_vec(&self.b);
        self.since_refresh = 0;
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }
    pub fn lambda(&self) -> f64 {
        self.lambda
    }
    pub fn v(&self) -> &SymMatrix {
        &self.v
    }
    pub fn v_inv(&self) -> &SymMatrix {
        &self.v_inv
    }
    pub fn b(&self) -> &[f64] {
        &self.b
    }
    pub fn theta(&self) -> &[f64] {
        &self.theta
    }
    pub fn count(&self) -> u64 {
        self.count
    }
    pub fn sum_sq_y(&self) -> f64 {
        self.sum_sq_y
    }

    /// `log det V`.
    pub fn log_det(&self) -> f64 {
        self.log_det
    }

    /// `V - λI`, the unregularized design matrix.
    pub fn gram(&self) -> SymMatrix {
        self.v.shifted(-self.lambda)
    }

    /// Max-abs deviation of `V * V^{-1}` from the identity.
    pub fn inverse_drift(&self) -> f64 {
        self.v.inverse_residual(&self.v_inv)
    }

    /// Sufficient statistics of the observed samples, for least-squares fits.
    pub fn moments(&self) -> LsMoments {
        LsMoments {
            gram: self.gram(),
            xty: self.b.clone(),
            yty: self.sum_sq_y,
            weight: self.count as f64,
        }
    }
}

/// Second-moment summary of a weighted regression problem:
/// `MSE(θ) = (θ^T G θ - 2 θ^T b + yty) / weight`.
#[derive(Debug, Clone)]
pub struct LsMoments {
    pub gram: SymMatrix,
    pub xty: Vec<f64>,
    pub yty: f64,
    pub weight: f64,
}

impl LsMoments {
    pub fn new(dim: usize) -> Self {
        Self {
            gram: SymMatrix::zeros(dim),
            xty: vec![0.0; dim],
            yty: 0.0,
            weight: 0.0,
        }
    }

    pub fn add(&mut self, phi: &[f64], y: f64, w: f64) {
        self.gram.add_outer(phi, w);
        for (b, p) in self.xty.iter_mut().zip(phi) {
            *b += w * p * y;
        }
        self.yty += w * y * y;
        self.weight += w;
    }

    pub fn from_samples<'a>(data: impl IntoIterator<Item = (&'a [f64], f64)>, dim: usize) -> Self {
        let mut m = Self::new(dim);
        for (phi, y) in data {
            m.add(phi, y, 1.0);
        }
        m
    }

    pub fn mse(&self, theta: &[f64]) -> f64 {
        let v = self.gram.quad_form(theta) - 2.0 * dot(theta, &self.xty) + self.yty;
        (v / self.weight).max(0.0)
    }

    /// Ball-constrained least squares on these moments; see [`constrained_ls`].
    pub fn constrained_fit(&self, bound: f64, ridge: f64, tol: f64) -> Result<ConstrainedFit> {
        if !(bound > 0.0) {
            return Err(LinalgError::InvalidArgument("ball radius must be positive"));
        }
        if !(self.weight > 0.0) {
            return Err(LinalgError::InvalidArgument("no data"));
        }
        let d = self.gram.dim();
        let eig = symmetric_eigen(&self.gram, 1e-12);
        // Coordinates of b in the eigenbasis. Null directions of the gram
        // carry only roundoff of b, which a tiny ridge would amplify; they
        // are dropped, matching the minimum-norm solution.
        let top = eig.values.iter().copied().fold(0.0f64, f64::max);
        let coef: Vec<f64> = (0..d)
            .map(|k| {
                if eig.values[k] <= NULL_REL_TOL * top {
                    0.0
                } else {
                    (0..d).map(|i| eig.vectors[i * d + k] * self.xty[i]).sum()
                }
            })
            .collect();
        let norm_at = |nu: f64| -> f64 {
            coef.iter()
                .zip(&eig.values)
                .map(|(c, g)| {
                    let den = g.max(0.0) + nu;
                    if den > 0.0 {
                        (c / den).powi(2)
                    } else {
                        0.0
                    }
                })
                .sum::<f64>()
                .sqrt()
        };
        let theta_at = |nu: f64| -> Vec<f64> {
            let mut th = vec![0.0; d];
            for k in 0..d {
                let den = eig.values[k].max(0.0) + nu;
                if den <= 0.0 {
                    continue;
                }
                let w = coef[k] / den;
                for i in 0..d {
                    th[i] += w * eig.vectors[i * d + k];
                }
            }
            th
        };

        let mut multiplier = ridge;
        let mut on_boundary = false;
        if norm_at(ridge) > bound {
            on_boundary = true;
            let mut lo = ridge;
            let mut hi = ridge.max(1e-12) * 2.0;
            let mut grow = 0;
            while norm_at(hi) > bound {
                lo = hi;
                hi *= 2.0;
                grow += 1;
                if grow > 2000 {
                    return Err(LinalgError::NoConvergence(grow));
                }
            }
            let mut converged = false;
            for _ in 0..BALL_MAX_ITERS {
                let mid = 0.5 * (lo + hi);
                let n = norm_at(mid);
                if (n - bound).abs() <= tol * bound {
                    multiplier = mid;
                    converged = true;
                    break;
                }
                if n > bound {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            if !converged {
                return Err(LinalgError::NoConvergence(BALL_MAX_ITERS));
            }
        }
        let theta = theta_at(multiplier);
        let mse = self.mse(&theta);
        Ok(ConstrainedFit {
            theta,
            mse,
            multiplier,
            on_boundary,
        })
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConstrainedFit {
    pub theta: Vec<f64>,
    pub mse: f64,
    /// Lagrange multiplier of the ball constraint (equals the ridge when inactive).
    pub multiplier: f64,
    pub on_boundary: bool,
}

/// Minimizes the empirical MSE `(1/n) Σ (φ_s^T θ - y_s)^2` over `||θ||_2 <= bound`.
///
/// Solves the `ridge`-stabilized normal equations; when that solution leaves
/// the ball, bisects on the multiplier until `| ||θ|| - bound | <= tol * bound`.
pub fn constrained_ls(
    data: &[(Vec<f64>, f64)],
    bound: f64,
    ridge: f64,
    tol: f64,
) -> Result<ConstrainedFit> {
    let first = data
        .first()
        .ok_or(LinalgError::InvalidArgument("no data"))?;
    let dim = first.0.len();
    for (phi, y) in data {
        if phi.len() != dim {
            return Err(LinalgError::DimensionMismatch {
                expected: dim,
                actual: phi.len(),
            });
        }
        if !y.is_finite() || phi.iter().any(|x| !x.is_finite()) {
            return Err(LinalgError::NonFinite("sample"));
        }
    }
    LsMoments::from_samples(data.iter().map(|(p, y)| (p.as_slice(), *y)), dim)
        .constrained_fit(bound, ridge, tol)
}
