//! Monte-Carlo estimators for the Bernoulli chaos supremum and Gaussian
//! projection norms, the quasimetric `d` and its property samplers, and
//! greedy packing counts.
//!
//! A subspace `W` of `R^M` is carried as an orthonormal column basis `U`
//! (`M x n`), so `P_W = U U^T`. For `w = U y` with `|y| <= 1`,
//! `sum_i eps_i w(i)^2 = y^T (U^T diag(eps) U) y`, hence the supremum over
//! `W ∩ B^M` of its absolute value is the spectral norm of `U^T diag(eps) U`.

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{sym_eig_extremes, DenseMatrix, OrthoRowMatrix, DEFAULT_EIG_TOL, DEFAULT_ORTHO_TOL};
use crate::rng::{sign_vector, stream_rng, StreamRng};
use crate::stats::mean_and_std;

/// Orthonormal column basis of an `n`-dimensional subspace of `R^M`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubspaceBasis {
    u: DenseMatrix,
    /// `u` transposed, kept for row-contiguous access to basis vectors.
    ut: DenseMatrix,
    ortho_tol: f64,
}

impl SubspaceBasis {
    pub fn new(u: DenseMatrix, ortho_tol: f64) -> Result<Self> {
        if u.cols() == 0 || u.cols() > u.rows() {
            return Err(Error::InvalidDimensions(format!(
                "basis must be M x n with 1 <= n <= M, got {}x{}",
                u.rows(),
                u.cols()
            )));
        }
        let ut = u.transpose();
        let deviation = ut.row_gram().max_abs_identity_gap();
        if deviation > ortho_tol {
            return Err(Error::NotOrthonormal { deviation, tol: ortho_tol });
        }
        Ok(SubspaceBasis { u, ut, ortho_tol })
    }

    /// `W = range(A^T)` with basis `U = A^T`.
    pub fn from_ortho_rows(a: &OrthoRowMatrix) -> Self {
        SubspaceBasis {
            u: a.matrix().transpose(),
            ut: a.matrix().clone(),
            ortho_tol: a.ortho_tol(),
        }
    }

    /// `span(e_1, ..., e_n)` in `R^m`.
    pub fn coordinate(m: usize, n: usize) -> Result<Self> {
        let mut u = DenseMatrix::zeros(m, n);
        for i in 0..n.min(m) {
            u[(i, i)] = 1.0;
        }
        Self::new(u, DEFAULT_ORTHO_TOL)
    }

    /// `span(v)`.
    pub fn from_vector(v: &[f64]) -> Result<Self> {
        let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if norm.is_nan() || norm <= 0.0 {
            return Err(Error::InvalidArgument("cannot span the zero vector".into()));
        }
        let data = v.iter().map(|x| x / norm).collect();
        Self::new(DenseMatrix::new(v.len(), 1, data)?, DEFAULT_ORTHO_TOL)
    }

    pub fn basis(&self) -> &DenseMatrix {
        &self.u
    }

    pub fn dim(&self) -> usize {
        self.u.cols()
    }

    pub fn ambient_dim(&self) -> usize {
        self.u.rows()
    }

    pub fn ortho_tol(&self) -> f64 {
        self.ortho_tol
    }

    /// `P_W x`.
    pub fn project(&self, x: &[f64]) -> Vec<f64> {
        let y: Vec<f64> = (0..self.dim()).map(|k| crate::linalg::dot(self.ut.row(k), x)).collect();
        (0..self.ambient_dim())
            .map(|j| self.u.row(j).iter().zip(&y).map(|(a, b)| a * b).sum())
            .collect()
    }

    /// Maps coefficients `y` to `U y`.
    pub fn embed(&self, y: &[f64]) -> Vec<f64> {
        (0..self.ambient_dim())
            .map(|j| self.u.row(j).iter().zip(y).map(|(a, b)| a * b).sum())
            .collect()
    }
}

/// `||P_W : l_1 -> l_2|| = max_j ||P_W e_j|| = max_j ||row j of U||`.
pub fn proj_l1_l2_norm(w: &SubspaceBasis) -> f64 {
    (0..w.ambient_dim())
        .map(|j| crate::linalg::norm2(w.u.row(j)))
        .fold(0.0, f64::max)
}

/// `sup over w in W ∩ B^M of |sum_i eps_i w(i)^2|` for one sign vector.
pub fn sup_process_sample(w: &SubspaceBasis, signs: &[i8]) -> Result<f64> {
    let m = w.ambient_dim();
    if signs.len() != m {
        return Err(Error::BadSignVector(format!("length {} but M = {m}", signs.len())));
    }
    if let Some(k) = signs.iter().position(|&s| s != 1 && s != -1) {
        return Err(Error::BadSignVector(format!("entry {} is {}", k + 1, signs[k])));
    }
    let n = w.dim();
    let mut s = DenseMatrix::zeros(n, n);
    for p in 0..n {
        let up = w.ut.row(p);
        for q in p..n {
            let uq = w.ut.row(q);
            let v: f64 = signs
                .iter()
                .zip(up.iter().zip(uq))
                .map(|(&e, (a, b))| f64::from(e) * a * b)
                .sum();
            s[(p, q)] = v;
            s[(q, p)] = v;
        }
    }
    let e = sym_eig_extremes(&s, DEFAULT_EIG_TOL)?;
    Ok(e.lambda_min.abs().max(e.lambda_max.abs()))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProcessEstimate {
    pub mean: f64,
    pub std_error: f64,
    pub trials: usize,
    #[serde(rename = "Q")]
    pub q: f64,
    /// `mean / (Q sqrt(ln M))`.
    pub bound_ratio: f64,
    pub seed: u64,
}

/// Signs of trial `k` of an estimator seeded with `seed`.
pub fn trial_signs(seed: u64, trial: usize, m: usize) -> Vec<i8> {
    sign_vector(&mut stream_rng(seed, trial as u64), m)
}

/// Monte-Carlo estimate of `E sup |sum eps_i w(i)^2|`; trial `k` uses [`trial_signs`]`(seed, k, M)`.
pub fn estimate_process(w: &SubspaceBasis, trials: usize, seed: u64) -> Result<ProcessEstimate> {
    if trials < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 trials, got {trials}")));
    }
    let m = w.ambient_dim();
    let values = (0..trials)
        .into_par_iter()
        .map(|k| sup_process_sample(w, &trial_signs(seed, k, m)))
        .collect::<Result<Vec<f64>>>()?;
    let (mean, std) = mean_and_std(&values);
    let q = proj_l1_l2_norm(w);
    Ok(ProcessEstimate {
        mean,
        std_error: std / (trials as f64).sqrt(),
        trials,
        q,
        bound_ratio: mean / (q * (m as f64).ln().sqrt()),
        seed,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GaussianSupEstimate {
    /// Estimate of `E ||P_W g||_inf`.
    pub mean_inf: f64,
    pub std_error_inf: f64,
    /// Estimate of `E ||P_W g||_E` with `||x||_E = (sum x(i)^2 a_i^2)^(1/2)`, when weights are given.
    pub mean_weighted: Option<f64>,
    pub std_error_weighted: Option<f64>,
    pub trials: usize,
    pub seed: u64,
}

fn check_weights(weights: &[f64], m: usize) -> Result<()> {
    if weights.len() != m {
        return Err(Error::BadWeights(format!("length {} but M = {m}", weights.len())));
    }
    if let Some(k) = weights.iter().position(|v| !v.is_finite()) {
        return Err(Error::BadWeights(format!("weight {} is not finite", k + 1)));
    }
    Ok(())
}

/// Monte-Carlo means of `||P_W g||_inf` and, optionally, the weighted norm,
/// for standard Gaussian `g` in `R^M`. Trial `k` draws `g` from stream `k` of `seed`.
pub fn gaussian_sup_estimates(
    w: &SubspaceBasis,
    weights: Option<&[f64]>,
    trials: usize,
    seed: u64,
) -> Result<GaussianSupEstimate> {
    let m = w.ambient_dim();
    if let Some(a) = weights {
        check_weights(a, m)?;
    }
    if trials < 2 {
        return Err(Error::InvalidArgument(format!("need at least 2 trials, got {trials}")));
    }
    let samples: Vec<(f64, f64)> = (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let g: Vec<f64> = (0..m).map(|_| StandardNormal.sample(&mut rng)).collect();
            let p = w.project(&g);
            let inf = p.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let weighted = weights.map_or(0.0, |a| {
                p.iter().zip(a).map(|(x, ai)| x * x * ai * ai).sum::<f64>().sqrt()
            });
            (inf, weighted)
        })
        .collect();
    let root = (trials as f64).sqrt();
    let (mean_inf, sd_inf) = mean_and_std(&samples.iter().map(|s| s.0).collect::<Vec<_>>());
    let weighted = weights.map(|_| mean_and_std(&samples.iter().map(|s| s.1).collect::<Vec<_>>()));
    Ok(GaussianSupEstimate {
        mean_inf,
        std_error_inf: sd_inf / root,
        mean_weighted: weighted.map(|(m, _)| m),
        std_error_weighted: weighted.map(|(_, s)| s / root),
        trials,
        seed,
    })
}

fn same_len(a: &[f64], b: &[f64]) -> Result<()> {
    if a.len() != b.len() {
        return Err(Error::LengthMismatch(a.len(), b.len()));
    }
    Ok(())
}

fn quasi_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y) * (x * x + y * y))
        .sum::<f64>()
        .sqrt()
}

fn tilde_unchecked(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| {
            let t = x * x - y * y;
            t * t
        })
        .sum::<f64>()
        .sqrt()
}

/// `d(w, v) = (sum (w(i) - v(i))^2 (w(i)^2 + v(i)^2))^(1/2)`.
pub fn quasimetric_d(w1: &[f64], w2: &[f64]) -> Result<f64> {
    same_len(w1, w2)?;
    Ok(quasi_unchecked(w1, w2))
}

/// `d~(w, v) = (sum (w(i)^2 - v(i)^2)^2)^(1/2)`, the natural metric of the chaos process.
pub fn quasimetric_tilde(w1: &[f64], w2: &[f64]) -> Result<f64> {
    same_len(w1, w2)?;
    Ok(tilde_unchecked(w1, w2))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct QuasimetricSample {
    pub lhs: f64,
    pub rhs: f64,
    pub ratio: f64,
}

impl QuasimetricSample {
    /// `0/0` is taken as ratio 0.
    pub fn new(lhs: f64, rhs: f64) -> Self {
        let ratio = if rhs > 0.0 {
            lhs / rhs
        } else if lhs == 0.0 {
            0.0
        } else {
            f64::INFINITY
        };
        QuasimetricSample { lhs, rhs, ratio }
    }
}

/// Triangle-type sample `d(w, v) / (d(w, u) + d(u, v))`.
pub fn triangle_sample(w: &[f64], u: &[f64], v: &[f64]) -> Result<QuasimetricSample> {
    same_len(w, u)?;
    same_len(w, v)?;
    Ok(QuasimetricSample::new(
        quasi_unchecked(w, v),
        quasi_unchecked(w, u) + quasi_unchecked(u, v),
    ))
}

/// Outcome of a sampled inequality `ratio <= threshold`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PropertyCheck {
    pub samples: usize,
    pub max_ratio: f64,
    pub threshold: f64,
    pub pass: bool,
}

impl PropertyCheck {
    fn from_ratios(samples: usize, max_ratio: f64, threshold: f64) -> Self {
        PropertyCheck {
            samples,
            max_ratio,
            threshold,
            pass: max_ratio <= threshold,
        }
    }
}

pub const QUASI_TRIANGLE_CONSTANT: f64 = 4.0;
pub const BALL_INFLATION_CONSTANT: f64 = 4.0;

fn gaussian_vec(rng: &mut StreamRng, dim: usize, scale: f64) -> Vec<f64> {
    (0..dim)
        .map(|_| {
            let g: f64 = StandardNormal.sample(rng);
            scale * g
        })
        .collect()
}

fn log_uniform_scale(rng: &mut StreamRng, lo_exp: f64, hi_exp: f64) -> f64 {
    10f64.powf(rng.random_range(lo_exp..hi_exp))
}

/// Gaussian triple with independent random scales and some coordinates zeroed.
fn random_triple(rng: &mut StreamRng, dim: usize) -> [Vec<f64>; 3] {
    let draw = |rng: &mut StreamRng| {
        let s = log_uniform_scale(rng, -2.0, 2.0);
        let mut v = gaussian_vec(rng, dim, s);
        for x in v.iter_mut() {
            if rng.random_bool(0.2) {
                *x = 0.0;
            }
        }
        v
    };
    [draw(rng), draw(rng), draw(rng)]
}

/// Structured triples that push the quasi-triangle ratio up, cycling over families:
/// near-collinear `(w, w + h, w + 2h)` with large `w` and tiny `h`;
/// sign flips `(w, c w, -s w)` through a scaled middle point;
/// coordinatewise opposite pairs with a point in between.
fn adversarial_triple(rng: &mut StreamRng, dim: usize, k: usize) -> [Vec<f64>; 3] {
    match k % 3 {
        0 => {
            let w = gaussian_vec(rng, dim, 1e3);
            let h = gaussian_vec(rng, dim, 1e-6);
            let u: Vec<f64> = w.iter().zip(&h).map(|(a, b)| a + b).collect();
            let v: Vec<f64> = w.iter().zip(&h).map(|(a, b)| a + 2.0 * b).collect();
            [w, u, v]
        }
        1 => {
            let scale = log_uniform_scale(rng, -1.0, 1.0);
            let w = gaussian_vec(rng, dim, scale);
            let c: f64 = rng.random_range(-1.0..1.0);
            let s: f64 = rng.random_range(0.2..5.0);
            let u = w.iter().map(|x| c * x).collect();
            let v = w.iter().map(|x| -s * x).collect();
            [w, u, v]
        }
        _ => {
            let w = gaussian_vec(rng, dim, 1.0);
            let v: Vec<f64> = w
                .iter()
                .map(|x| -x * rng.random_range(0.5..2.0))
                .collect();
            let t: f64 = rng.random_range(0.0..1.0);
            let u = w.iter().zip(&v).map(|(a, b)| (1.0 - t) * a + t * b).collect();
            [w, u, v]
        }
    }
}

/// Max of `d(w, v) / (d(w, u) + d(u, v))` over `samples` random triples plus
/// `max(1, samples / 100)` adversarial ones, against the constant 4.
pub fn check_quasi_triangle(samples: usize, dim: usize, seed: u64) -> Result<PropertyCheck> {
    if samples == 0 || dim == 0 {
        return Err(Error::InvalidArgument("samples and dim must be positive".into()));
    }
    let adversarial = (samples / 100).max(1);
    let mut rng = stream_rng(seed, 0);
    let mut max_ratio = 0.0f64;
    for _ in 0..samples {
        let [w, u, v] = random_triple(&mut rng, dim);
        max_ratio = max_ratio.max(triangle_sample(&w, &u, &v)?.ratio);
    }
    let mut rng = stream_rng(seed, 1);
    for k in 0..adversarial {
        let [w, u, v] = adversarial_triple(&mut rng, dim, k);
        max_ratio = max_ratio.max(triangle_sample(&w, &u, &v)?.ratio);
    }
    Ok(PropertyCheck::from_ratios(
        samples + adversarial,
        max_ratio,
        QUASI_TRIANGLE_CONSTANT,
    ))
}

/// Max of `d~(w, v) / (sqrt(2) d(w, v))` over `samples` random pairs; must not exceed 1.
pub fn check_sandwich(samples: usize, dim: usize, seed: u64) -> Result<PropertyCheck> {
    if samples == 0 || dim == 0 {
        return Err(Error::InvalidArgument("samples and dim must be positive".into()));
    }
    let mut rng = stream_rng(seed, 2);
    let mut max_ratio = 0.0f64;
    for _ in 0..samples {
        let [w, _, v] = random_triple(&mut rng, dim);
        let s = QuasimetricSample::new(tilde_unchecked(&w, &v), std::f64::consts::SQRT_2 * quasi_unchecked(&w, &v));
        max_ratio = max_ratio.max(s.ratio);
    }
    Ok(PropertyCheck::from_ratios(samples, max_ratio, 1.0))
}

/// A point `u` with `d(u, center) <= rho` along direction `dir`, close to the ball boundary.
fn boundary_point(center: &[f64], dir: &[f64], rho: f64) -> Option<Vec<f64>> {
    let at = |s: f64| -> Vec<f64> { center.iter().zip(dir).map(|(c, z)| c + s * z).collect() };
    let dist = |s: f64| quasi_unchecked(&at(s), center);
    let mut lo = 0.0f64;
    let mut hi = rho.sqrt().max(1e-300);
    let mut grown = 0;
    while dist(hi) <= rho {
        lo = hi;
        hi *= 2.0;
        grown += 1;
        if grown > 200 {
            return None;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if dist(mid) <= rho {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let u = at(lo);
    (quasi_unchecked(&u, center) <= rho).then_some(u)
}

/// Samples points of `B_rho(w)` in the quasimetric `d`, forms random convex
/// combinations `v` and returns the max of `d(v, w) / rho` against the constant 4.
///
/// Points are placed on rays from `w` by bisection on `d`, accepted only when
/// `d(u, w) <= rho`, and pulled inwards by a random factor in `[0.5, 1]` half
/// of the time. Centers vary over several orders of magnitude relative to
/// `sqrt(rho)`. Half the combinations are midpoints of two points.
pub fn check_ball_convexity(samples: usize, dim: usize, rho: f64, seed: u64) -> Result<PropertyCheck> {
    if !(rho > 0.0 && rho.is_finite()) {
        return Err(Error::InvalidArgument(format!("rho must be positive, got {rho}")));
    }
    if samples == 0 || dim == 0 {
        return Err(Error::InvalidArgument("samples and dim must be positive".into()));
    }
    let mut rng = stream_rng(seed, 3);
    let mut max_ratio = 0.0f64;
    for _ in 0..samples {
        let scale = rho.sqrt() * log_uniform_scale(&mut rng, -2.0, 1.0);
        let center = gaussian_vec(&mut rng, dim, scale);
        let k = if rng.random_bool(0.5) { 2 } else { rng.random_range(2..=dim + 1) };
        let mut points = Vec::with_capacity(k);
        let mut attempts = 0;
        while points.len() < k {
            attempts += 1;
            if attempts > 100 * k {
                return Err(Error::SamplingFailed(format!(
                    "accepted {} of {k} points after {attempts} proposals",
                    points.len()
                )));
            }
            let dir = gaussian_vec(&mut rng, dim, 1.0);
            if let Some(mut u) = boundary_point(&center, &dir, rho) {
                if rng.random_bool(0.5) {
                    let f: f64 = rng.random_range(0.5..1.0);
                    let shrunk: Vec<f64> = u.iter().zip(&center).map(|(x, c)| c + f * (x - c)).collect();
                    if quasi_unchecked(&shrunk, &center) <= rho {
                        u = shrunk;
                    }
                }
                points.push(u);
            }
        }
        let weights: Vec<f64> = if k == 2 && rng.random_bool(0.5) {
            vec![0.5, 0.5]
        } else {
            let raw: Vec<f64> = (0..k).map(|_| -rng.random_range(f64::MIN_POSITIVE..1.0).ln()).collect();
            let total: f64 = raw.iter().sum();
            raw.iter().map(|x| x / total).collect()
        };
        let mut v = vec![0.0; dim];
        for (p, &lam) in points.iter().zip(&weights) {
            for (vi, pi) in v.iter_mut().zip(p) {
                *vi += lam * pi;
            }
        }
        max_ratio = max_ratio.max(quasi_unchecked(&v, &center) / rho);
    }
    Ok(PropertyCheck::from_ratios(samples, max_ratio, BALL_INFLATION_CONSTANT))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PackingMetric {
    /// The quasimetric `d`.
    Quasi,
    /// `||x - y||_inf`.
    Linf,
    /// `(sum (x(i) - y(i))^2 a_i^2)^(1/2)`.
    Weighted,
}

impl std::str::FromStr for PackingMetric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "d" | "quasi" => Ok(PackingMetric::Quasi),
            "linf" => Ok(PackingMetric::Linf),
            "weighted" => Ok(PackingMetric::Weighted),
            other => Err(Error::InvalidArgument(format!("unknown metric {other:?}"))),
        }
    }
}

/// Size of the greedy packing: points are scanned in order and kept when
/// farther than `radius` from every kept point.
pub fn packing_count(
    points: &[Vec<f64>],
    metric: PackingMetric,
    radius: f64,
    weights: Option<&[f64]>,
) -> Result<usize> {
    let first = points
        .first()
        .ok_or_else(|| Error::InvalidArgument("no points".into()))?;
    if radius.is_nan() || radius <= 0.0 {
        return Err(Error::InvalidArgument(format!("radius must be positive, got {radius}")));
    }
    let dim = first.len();
    if let Some(p) = points.iter().find(|p| p.len() != dim) {
        return Err(Error::LengthMismatch(dim, p.len()));
    }
    let w = match metric {
        PackingMetric::Weighted => {
            let w = weights.ok_or_else(|| Error::BadWeights("weighted metric needs weights".into()))?;
            check_weights(w, dim)?;
            Some(w)
        }
        _ => None,
    };
    let dist = |a: &[f64], b: &[f64]| -> f64 {
        match metric {
            PackingMetric::Quasi => quasi_unchecked(a, b),
            PackingMetric::Linf => a.iter().zip(b).fold(0.0f64, |m, (x, y)| m.max((x - y).abs())),
            PackingMetric::Weighted => a
                .iter()
                .zip(b)
                .zip(w.unwrap())
                .map(|((x, y), c)| (x - y) * (x - y) * c * c)
                .sum::<f64>()
                .sqrt(),
        }
    };
    let mut kept: Vec<&[f64]> = Vec::new();
    for p in points {
        if kept.iter().all(|k| dist(k, p) > radius) {
            kept.push(p);
        }
    }
    Ok(kept.len())
}

/// `count` points uniform in `W ∩ B^M`.
pub fn sample_ball_section(w: &SubspaceBasis, count: usize, seed: u64) -> Vec<Vec<f64>> {
    let n = w.dim();
    let mut rng = stream_rng(seed, 4);
    (0..count)
        .map(|_| {
            let mut y = gaussian_vec(&mut rng, n, 1.0);
            let norm = y.iter().map(|x| x * x).sum::<f64>().sqrt();
            let r = rng.random_range(0.0f64..1.0).powf(1.0 / n as f64);
            for v in y.iter_mut() {
                *v *= r / norm;
            }
            w.embed(&y)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingRow {
    pub radius: f64,
    pub count: usize,
    /// `radius * sqrt(ln count) / scale`.
    pub implied_constant: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PackingFit {
    pub rows: Vec<PackingRow>,
    /// Smallest constant `C` with `radius * sqrt(ln count) <= C * scale` on every row.
    pub fitted_constant: f64,
    /// `Q sqrt(ln M)` for the sup norm, `Q (sum a_i^2)^(1/2)` for the weighted norm.
    pub scale: f64,
}

/// Greedy packing counts over a radius sweep, normalised by the bound's right-hand side
/// without its constant.
pub fn fit_packing_constant(
    w: &SubspaceBasis,
    points: &[Vec<f64>],
    radii: &[f64],
    metric: PackingMetric,
    weights: Option<&[f64]>,
) -> Result<PackingFit> {
    let q = proj_l1_l2_norm(w);
    let scale = match metric {
        PackingMetric::Linf => q * (w.ambient_dim() as f64).ln().sqrt(),
        PackingMetric::Weighted => {
            let a = weights.ok_or_else(|| Error::BadWeights("weighted metric needs weights".into()))?;
            q * a.iter().map(|x| x * x).sum::<f64>().sqrt()
        }
        PackingMetric::Quasi => {
            return Err(Error::InvalidArgument("no packing bound is fitted for the quasimetric".into()))
        }
    };
    let rows = radii
        .iter()
        .map(|&r| {
            let count = packing_count(points, metric, r, weights)?;
            Ok(PackingRow {
                radius: r,
                count,
                implied_constant: r * (count as f64).ln().sqrt() / scale,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let fitted_constant = rows.iter().map(|r| r.implied_constant).fold(0.0, f64::max);
    Ok(PackingFit {
        rows,
        fitted_constant,
        scale,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::gen_walsh;

    #[test]
    fn projection_norm_examples() {
        assert_eq!(proj_l1_l2_norm(&SubspaceBasis::coordinate(8, 3).unwrap()), 1.0);
        let ones = SubspaceBasis::from_vector(&[1.0; 16]).unwrap();
        assert!((proj_l1_l2_norm(&ones) - 0.25).abs() < 1e-15);
    }

    #[test]
    fn sup_sample_examples() {
        let e1 = SubspaceBasis::coordinate(5, 1).unwrap();
        assert_eq!(sup_process_sample(&e1, &[-1, 1, 1, -1, 1]).unwrap(), 1.0);
        let w = SubspaceBasis::from_ortho_rows(&gen_walsh(4, 16).unwrap());
        let v = sup_process_sample(&w, &[1; 16]).unwrap();
        assert!((v - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sup_sample_rejects_bad_signs() {
        let e1 = SubspaceBasis::coordinate(3, 1).unwrap();
        assert!(matches!(sup_process_sample(&e1, &[1, 1]), Err(Error::BadSignVector(_))));
        assert!(matches!(sup_process_sample(&e1, &[1, 0, 1]), Err(Error::BadSignVector(_))));
    }

    #[test]
    fn process_estimate_on_coordinate_axis() {
        let e1 = SubspaceBasis::coordinate(64, 1).unwrap();
        let est = estimate_process(&e1, 50, 3).unwrap();
        assert_eq!(est.mean, 1.0);
        assert_eq!(est.std_error, 0.0);
        assert_eq!(est.q, 1.0);
        assert!(estimate_process(&e1, 1, 3).is_err());
    }

    #[test]
    fn weighted_estimates() {
        let e1 = SubspaceBasis::coordinate(8, 1).unwrap();
        let zero = gaussian_sup_estimates(&e1, Some(&[0.0; 8]), 10, 1).unwrap();
        assert_eq!(zero.mean_weighted, Some(0.0));
        assert!(matches!(gaussian_sup_estimates(&e1, Some(&[1.0; 3]), 10, 1), Err(Error::BadWeights(_))));
        let none = gaussian_sup_estimates(&e1, None, 10, 1).unwrap();
        assert_eq!(none.mean_weighted, None);
        // With weight e_1 the weighted norm of g_1 e_1 is |g_1| = the sup norm.
        let mut a = [0.0; 8];
        a[0] = 1.0;
        let est = gaussian_sup_estimates(&e1, Some(&a), 100, 4).unwrap();
        assert_eq!(est.mean_weighted, Some(est.mean_inf));
    }

    #[test]
    fn quasimetric_examples() {
        assert_eq!(quasimetric_d(&[1.0, 2.0], &[1.0, 2.0]).unwrap(), 0.0);
        assert_eq!(quasimetric_d(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 1.0);
        assert_eq!(quasimetric_d(&[1.0], &[1.0, 0.0]), Err(Error::LengthMismatch(1, 2)));
        // d~((1,0),(0,0)) = 1
        assert_eq!(quasimetric_tilde(&[1.0, 0.0], &[0.0, 0.0]).unwrap(), 1.0);
    }

    #[test]
    fn triangle_degenerate_configurations() {
        let w = [0.3, -1.2, 2.0];
        let v = [1.0, 0.5, -0.7];
        assert_eq!(triangle_sample(&w, &v, &w).unwrap().ratio, 0.0);
        let s = triangle_sample(&w, &w, &v).unwrap();
        assert!((s.ratio - 1.0).abs() < 1e-15);
        assert_eq!(triangle_sample(&w, &w, &w).unwrap().ratio, 0.0);
    }

    #[test]
    fn opposite_points_through_origin() {
        // d(w, -w) = 2 sqrt(2) |w|_4^2 and d(w, 0) = |w|_4^2.
        let w = [1.0, -2.0, 0.5];
        let s = triangle_sample(&w, &[0.0; 3], &[-1.0, 2.0, -0.5]).unwrap();
        assert!((s.ratio - std::f64::consts::SQRT_2).abs() < 1e-12);
    }

    #[test]
    fn ball_midpoint_of_symmetric_pair_is_center() {
        let u = [0.2, -0.1, 0.3];
        assert!(quasimetric_d(&u, &[0.0; 3]).unwrap() <= 0.3);
        let mid: Vec<f64> = u.iter().zip(u.iter().map(|x| -x)).map(|(a, b)| 0.5 * (a + b)).collect();
        assert_eq!(quasimetric_d(&mid, &[0.0; 3]).unwrap() / 0.3, 0.0);
    }

    #[test]
    fn boundary_points_lie_in_ball() {
        let mut rng = stream_rng(1, 1);
        for _ in 0..200 {
            let c = gaussian_vec(&mut rng, 4, 0.5);
            let z = gaussian_vec(&mut rng, 4, 1.0);
            let u = boundary_point(&c, &z, 0.3).unwrap();
            let d = quasi_unchecked(&u, &c);
            assert!(d <= 0.3 && d > 0.3 * (1.0 - 1e-9));
        }
    }

    #[test]
    fn small_property_runs() {
        let t = check_quasi_triangle(2000, 4, 1).unwrap();
        assert!(t.pass && t.samples == 2020);
        assert!(check_sandwich(2000, 4, 1).unwrap().pass);
        let b = check_ball_convexity(500, 3, 0.3, 1).unwrap();
        assert!(b.pass, "{b:?}");
        assert!(b.max_ratio > 0.5);
        assert!(check_ball_convexity(10, 3, 0.0, 1).is_err());
    }

    #[test]
    fn packing_examples() {
        let same = vec![vec![1.0, 2.0]; 5];
        assert_eq!(packing_count(&same, PackingMetric::Linf, 0.1, None).unwrap(), 1);
        let distinct: Vec<Vec<f64>> = (0..7).map(|k| vec![k as f64, 0.0]).collect();
        for metric in [PackingMetric::Linf, PackingMetric::Quasi] {
            assert_eq!(packing_count(&distinct, metric, 1e-9, None).unwrap(), 7);
        }
        assert_eq!(
            packing_count(&distinct, PackingMetric::Weighted, 1e-9, Some(&[1.0, 1.0])).unwrap(),
            7
        );
        assert_eq!(packing_count(&distinct, PackingMetric::Linf, 1.5, None).unwrap(), 4);
        assert!(matches!(
            packing_count(&distinct, PackingMetric::Weighted, 1.0, None),
            Err(Error::BadWeights(_))
        ));
        assert!(packing_count(&[], PackingMetric::Linf, 1.0, None).is_err());
        assert!(packing_count(&distinct, PackingMetric::Linf, 0.0, None).is_err());
    }

    #[test]
    fn ball_section_points_are_in_w_and_unit_ball() {
        let w = SubspaceBasis::from_ortho_rows(&gen_walsh(2, 8).unwrap());
        for p in sample_ball_section(&w, 100, 5) {
            let norm: f64 = p.iter().map(|x| x * x).sum::<f64>().sqrt();
            assert!(norm <= 1.0 + 1e-12);
            let proj = w.project(&p);
            assert!(proj.iter().zip(&p).all(|(a, b)| (a - b).abs() < 1e-12));
        }
    }
}
