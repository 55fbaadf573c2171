use super::matrix::{dot, norm2, DenseMatrix};
use crate::error::{Error, Result};

/// Default bound on `max |AA^T - I|` accepted for an orthonormal-row matrix.
pub const DEFAULT_ORTHO_TOL: f64 = 1e-10;

/// An `n x M` matrix with `n <= M` whose rows are orthonormal.
///
/// Construction verifies `max |AA^T - I| <= ortho_tol`; inputs that fail are
/// rejected, never silently repaired.
#[derive(Debug, Clone, PartialEq)]
pub struct OrthoRowMatrix {
    mat: DenseMatrix,
    ortho_tol: f64,
}

impl OrthoRowMatrix {
    pub fn new(mat: DenseMatrix, ortho_tol: f64) -> Result<Self> {
        if mat.rows() == 0 {
            return Err(Error::InvalidDimensions("matrix has no rows".into()));
        }
        if mat.rows() > mat.cols() {
            return Err(Error::InvalidDimensions(format!(
                "n = {} exceeds M = {}",
                mat.rows(),
                mat.cols()
            )));
        }
        let deviation = mat.row_gram().max_abs_identity_gap();
        if deviation > ortho_tol {
            return Err(Error::NotOrthonormal {
                deviation,
                tol: ortho_tol,
            });
        }
        Ok(OrthoRowMatrix { mat, ortho_tol })
    }

    pub fn with_default_tol(mat: DenseMatrix) -> Result<Self> {
        Self::new(mat, DEFAULT_ORTHO_TOL)
    }

    /// Number of rows.
    pub fn n(&self) -> usize {
        self.mat.rows()
    }

    /// Number of columns.
    pub fn m(&self) -> usize {
        self.mat.cols()
    }

    pub fn matrix(&self) -> &DenseMatrix {
        &self.mat
    }

    pub fn into_matrix(self) -> DenseMatrix {
        self.mat
    }

    pub fn ortho_tol(&self) -> f64 {
        self.ortho_tol
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.mat[(i, j)]
    }

    /// `max |AA^T - I|`.
    pub fn orthogonality_gap(&self) -> f64 {
        self.mat.row_gram().max_abs_identity_gap()
    }

    /// Reorders columns: column `j` of the result is column `perm[j]` of `self`.
    pub fn permute_columns(&self, perm: &[usize]) -> Result<OrthoRowMatrix> {
        let m = self.m();
        let mut seen = vec![false; m];
        if perm.len() != m || perm.iter().any(|&p| p >= m || std::mem::replace(&mut seen[p], true)) {
            return Err(Error::InvalidArgument("not a permutation of the columns".into()));
        }
        let mut out = DenseMatrix::zeros(self.n(), m);
        for i in 0..self.n() {
            let src = self.mat.row(i);
            for (o, &p) in out.row_mut(i).iter_mut().zip(perm) {
                *o = src[p];
            }
        }
        Ok(OrthoRowMatrix {
            mat: out,
            ortho_tol: self.ortho_tol,
        })
    }
}

/// Orthonormalizes the rows of `m` by modified Gram-Schmidt with one full
/// re-orthogonalization pass per row.
///
/// A row whose residual after both passes has norm `<= tol * |original row|`
/// is reported as `RankDeficient`.
pub fn orthonormalize_rows(m: &DenseMatrix, tol: f64) -> Result<OrthoRowMatrix> {
    let (n, cols) = (m.rows(), m.cols());
    if n == 0 || n > cols {
        return Err(Error::InvalidDimensions(format!(
            "need 1 <= n <= M, got n = {n}, M = {cols}"
        )));
    }
    let mut q = DenseMatrix::zeros(n, cols);
    let mut v = vec![0.0; cols];
    for i in 0..n {
        v.copy_from_slice(m.row(i));
        let original = norm2(&v);
        for _pass in 0..2 {
            for k in 0..i {
                let qk = q.row(k);
                let c = dot(qk, &v);
                for (x, &y) in v.iter_mut().zip(qk) {
                    *x -= c * y;
                }
            }
        }
        let residual = norm2(&v);
        if residual <= tol * original || residual == 0.0 {
            return Err(Error::RankDeficient {
                row: i + 1,
                residual,
            });
        }
        for (o, x) in q.row_mut(i).iter_mut().zip(&v) {
            *o = x / residual;
        }
    }
    OrthoRowMatrix::new(q, tol)
}
