//! Test-matrix families and the coherence parameter.

use rand_distr::{Distribution, StandardNormal};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::linalg::{orthonormalize_rows, DenseMatrix, OrthoRowMatrix, DEFAULT_ORTHO_TOL};
use crate::rng::stream_rng;

fn check_dims(n: usize, m: usize) -> Result<()> {
    if n == 0 || n > m {
        return Err(Error::InvalidDimensions(format!(
            "need 1 <= n <= M, got n = {n}, M = {m}"
        )));
    }
    Ok(())
}

/// First `n` rows of the Sylvester-Hadamard matrix of order `m`, scaled by `1/sqrt(m)`.
///
/// Entry `(i, j)` is `(-1)^popcount(i & j) / sqrt(m)`.
pub fn gen_walsh(n: usize, m: usize) -> Result<OrthoRowMatrix> {
    if !m.is_power_of_two() {
        return Err(Error::NotPowerOfTwo(m));
    }
    check_dims(n, m)?;
    let v = (1.0 / m as f64).sqrt();
    let data = (0..n)
        .flat_map(|i| (0..m).map(move |j| if (i & j).count_ones() % 2 == 0 { v } else { -v }))
        .collect();
    OrthoRowMatrix::with_default_tol(DenseMatrix::new(n, m, data)?)
}

/// Real trigonometric rows sampled at `j = 0..m`: the constant row, then
/// `cos(2 pi k j / m)` and `sin(2 pi k j / m)` for `k = 1, 2, ...`, skipping the
/// identically zero sine at `k = m/2`; orthonormalized numerically.
pub fn gen_trig(n: usize, m: usize) -> Result<OrthoRowMatrix> {
    check_dims(n, m)?;
    let mut rows: Vec<Vec<f64>> = vec![vec![1.0; m]];
    let mut k = 1usize;
    while rows.len() < n {
        let phase = |j: usize| 2.0 * std::f64::consts::PI * ((k * j) % m) as f64 / m as f64;
        rows.push((0..m).map(|j| phase(j).cos()).collect());
        if rows.len() < n && 2 * k != m {
            rows.push((0..m).map(|j| phase(j).sin()).collect());
        }
        k += 1;
    }
    orthonormalize_rows(&DenseMatrix::from_rows(&rows)?, DEFAULT_ORTHO_TOL)
}

/// Orthonormal basis of the row space of an `n x m` standard Gaussian sample.
///
/// The sample is drawn row-major from stream 0 of `seed`.
pub fn gen_random_ortho(n: usize, m: usize, seed: u64) -> Result<OrthoRowMatrix> {
    check_dims(n, m)?;
    let mut rng = stream_rng(seed, 0);
    let data: Vec<f64> = (0..n * m).map(|_| StandardNormal.sample(&mut rng)).collect();
    orthonormalize_rows(&DenseMatrix::new(n, m, data)?, DEFAULT_ORTHO_TOL)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum GeneratorKind {
    Walsh,
    Trig,
    Random,
}

impl GeneratorKind {
    pub fn generate(self, n: usize, m: usize, seed: u64) -> Result<OrthoRowMatrix> {
        match self {
            GeneratorKind::Walsh => gen_walsh(n, m),
            GeneratorKind::Trig => gen_trig(n, m),
            GeneratorKind::Random => gen_random_ortho(n, m, seed),
        }
    }

    pub fn name(self) -> &'static str {
        match self {
            GeneratorKind::Walsh => "walsh",
            GeneratorKind::Trig => "trig",
            GeneratorKind::Random => "random",
        }
    }
}

impl std::str::FromStr for GeneratorKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "walsh" => Ok(GeneratorKind::Walsh),
            "trig" => Ok(GeneratorKind::Trig),
            "random" => Ok(GeneratorKind::Random),
            other => Err(Error::InvalidArgument(format!("unknown generator {other:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct CoherenceReport {
    /// `sqrt(M/n) * max_j |column j|`.
    pub t: f64,
    pub per_column_norms: Vec<f64>,
    /// 0-based column attaining the maximum (first one on ties).
    pub argmax_column: usize,
}

pub fn coherence(a: &OrthoRowMatrix) -> CoherenceReport {
    let squares: Vec<f64> = (0..a.m())
        .map(|j| a.matrix().column(j).iter().map(|x| x * x).sum())
        .collect();
    let (argmax, max_sq) = squares
        .iter()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |(bi, bv), (i, &v)| if v > bv { (i, v) } else { (bi, bv) });
    CoherenceReport {
        t: (a.m() as f64 * max_sq / a.n() as f64).sqrt(),
        per_column_norms: squares.iter().map(|s| s.sqrt()).collect(),
        argmax_column: argmax,
    }
}
