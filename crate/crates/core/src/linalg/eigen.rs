//! Cyclic Jacobi diagonalization of small dense symmetric matrices.

use super::matrix::DenseMatrix;
use crate::error::{Error, Result};

/// Absolute symmetry tolerance (scaled by `max(1, max |s_ij|)`).
pub const SYMMETRY_TOL: f64 = 1e-12;

/// Default off-diagonal Frobenius target for [`sym_eig_extremes`].
pub const DEFAULT_EIG_TOL: f64 = 1e-13;

const MAX_SWEEPS: usize = 100;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SymEigExtremes {
    pub lambda_min: f64,
    pub lambda_max: f64,
    /// Jacobi sweeps performed.
    pub iterations: usize,
    /// Off-diagonal Frobenius norm at termination; bounds every eigenvalue error.
    pub residual: f64,
}

/// Full spectrum of a symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct SymEigenvalues {
    /// Eigenvalues, ascending.
    pub values: Vec<f64>,
    pub iterations: usize,
    pub residual: f64,
}

/// Checks symmetry and returns `(S + S^T) / 2`.
pub fn symmetrized(s: &DenseMatrix) -> Result<DenseMatrix> {
    if !s.is_square() || s.rows() == 0 {
        return Err(Error::Shape(format!(
            "expected a nonempty square matrix, got {}x{}",
            s.rows(),
            s.cols()
        )));
    }
    let k = s.rows();
    let tol = SYMMETRY_TOL * s.max_abs().max(1.0);
    let mut out = s.clone();
    for i in 0..k {
        for j in (i + 1)..k {
            let gap = (s[(i, j)] - s[(j, i)]).abs();
            if gap > tol {
                return Err(Error::NotSymmetric {
                    row: i + 1,
                    col: j + 1,
                    gap,
                });
            }
            let avg = 0.5 * (s[(i, j)] + s[(j, i)]);
            out[(i, j)] = avg;
            out[(j, i)] = avg;
        }
    }
    Ok(out)
}

fn off_diagonal_norm(a: &[f64], k: usize) -> f64 {
    let mut sum = 0.0;
    for i in 0..k {
        for &v in &a[i * k + i + 1..(i + 1) * k] {
            sum += 2.0 * v * v;
        }
    }
    sum.sqrt()
}

/// Diagonalizes `s` by cyclic Jacobi rotations until the off-diagonal
/// Frobenius norm is at most `tol`.
pub fn sym_eigenvalues(s: &DenseMatrix, tol: f64) -> Result<SymEigenvalues> {
    let mut sym = symmetrized(s)?;
    let k = sym.rows();
    let a = sym.as_mut_slice();
    let mut sweeps = 0;
    loop {
        let off = off_diagonal_norm(a, k);
        if off <= tol {
            let mut values: Vec<f64> = (0..k).map(|i| a[i * k + i]).collect();
            values.sort_by(|x, y| x.total_cmp(y));
            return Ok(SymEigenvalues {
                values,
                iterations: sweeps,
                residual: off,
            });
        }
        if sweeps == MAX_SWEEPS {
            return Err(Error::NoConvergence {
                sweeps,
                residual: off,
            });
        }
        sweeps += 1;
        let mut rotated = false;
        for p in 0..k {
            for q in (p + 1)..k {
                let apq = a[p * k + q];
                if apq == 0.0 {
                    continue;
                }
                let app = a[p * k + p];
                let aqq = a[q * k + q];
                // Negligible against both diagonal entries: drop it.
                let g = 100.0 * apq.abs();
                if sweeps > 3 && app.abs() + g == app.abs() && aqq.abs() + g == aqq.abs() {
                    a[p * k + q] = 0.0;
                    a[q * k + p] = 0.0;
                    continue;
                }
                rotated = true;
                let theta = (aqq - app) / (2.0 * apq);
                let t = if theta.is_finite() {
                    theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt())
                } else {
                    0.5 / theta
                };
                let c = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * c;
                let tau = sn / (1.0 + c);
                a[p * k + p] = app - t * apq;
                a[q * k + q] = aqq + t * apq;
                a[p * k + q] = 0.0;
                a[q * k + p] = 0.0;
                // Rows p and q are updated in place; columns are mirrored afterwards.
                let (head, tail) = a.split_at_mut(q * k);
                let row_p = &mut head[p * k..(p + 1) * k];
                let row_q = &mut tail[..k];
                for r in 0..k {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = row_p[r];
                    let arq = row_q[r];
                    row_p[r] = arp - sn * (arq + tau * arp);
                    row_q[r] = arq + sn * (arp - tau * arq);
                }
                for r in 0..k {
                    if r == p || r == q {
                        continue;
                    }
                    a[r * k + p] = a[p * k + r];
                    a[r * k + q] = a[q * k + r];
                }
            }
        }
        if !rotated {
            let residual = off_diagonal_norm(a, k);
            if residual > tol {
                return Err(Error::NoConvergence { sweeps, residual });
            }
        }
    }
}

/// Smallest and largest eigenvalue of a symmetric matrix via full Jacobi diagonalization.
pub fn sym_eig_extremes(s: &DenseMatrix, tol: f64) -> Result<SymEigExtremes> {
    let eig = sym_eigenvalues(s, tol)?;
    Ok(SymEigExtremes {
        lambda_min: eig.values[0],
        lambda_max: *eig.values.last().unwrap(),
        iterations: eig.iterations,
        residual: eig.residual,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn diagonal() {
        let mut d = DenseMatrix::zeros(3, 3);
        d[(0, 0)] = 1.0;
        d[(1, 1)] = 2.0;
        d[(2, 2)] = 3.0;
        let e = sym_eig_extremes(&d, DEFAULT_EIG_TOL).unwrap();
        assert_eq!((e.lambda_min, e.lambda_max), (1.0, 3.0));
        assert_eq!(e.iterations, 0);
    }

    #[test]
    fn swap_matrix() {
        let s = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0, 0.0]]).unwrap();
        let e = sym_eig_extremes(&s, DEFAULT_EIG_TOL).unwrap();
        assert!((e.lambda_min + 1.0).abs() < 1e-15);
        assert!((e.lambda_max - 1.0).abs() < 1e-15);
        assert!(e.residual <= DEFAULT_EIG_TOL);
    }

    #[test]
    fn one_by_one() {
        let s = DenseMatrix::from_rows(&[vec![-2.5]]).unwrap();
        let e = sym_eig_extremes(&s, DEFAULT_EIG_TOL).unwrap();
        assert_eq!((e.lambda_min, e.lambda_max), (-2.5, -2.5));
    }

    #[test]
    fn rejects_asymmetric_and_nonsquare() {
        let s = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0 + 1e-9, 0.0]]).unwrap();
        assert!(matches!(sym_eig_extremes(&s, 1e-12), Err(Error::NotSymmetric { row: 1, col: 2, .. })));
        assert!(matches!(sym_eig_extremes(&DenseMatrix::zeros(2, 3), 1e-12), Err(Error::Shape(_))));
    }

    #[test]
    fn tiny_asymmetry_is_symmetrized() {
        let s = DenseMatrix::from_rows(&[vec![0.0, 1.0], vec![1.0 + 1e-14, 0.0]]).unwrap();
        let e = sym_eig_extremes(&s, 1e-13).unwrap();
        assert!((e.lambda_max - (1.0 + 0.5e-14)).abs() < 1e-15);
    }

    #[test]
    fn trace_is_preserved() {
        let s = DenseMatrix::from_rows(&[
            vec![4.0, 1.0, -2.0, 2.0],
            vec![1.0, 2.0, 0.0, 1.0],
            vec![-2.0, 0.0, 3.0, -2.0],
            vec![2.0, 1.0, -2.0, -1.0],
        ])
        .unwrap();
        let e = sym_eigenvalues(&s, 1e-13).unwrap();
        let tr: f64 = e.values.iter().sum();
        assert!((tr - 8.0).abs() < 1e-12);
        let fro: f64 = e.values.iter().map(|v| v * v).sum();
        let fro_in: f64 = s.as_slice().iter().map(|v| v * v).sum();
        assert!((fro - fro_in).abs() < 1e-11);
    }
}
