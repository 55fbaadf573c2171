//! Dense linear algebra: orthonormal-row matrices, compressed Gram matrices,
//! symmetric extreme eigenvalues and the isometry deviation.

mod eigen;
mod gram;
mod io;
mod matrix;
mod ortho;

pub use eigen::{
    sym_eig_extremes, sym_eigenvalues, symmetrized, SymEigExtremes, SymEigenvalues, DEFAULT_EIG_TOL,
    SYMMETRY_TOL,
};
pub use gram::{compressed_gram, deviation, deviation_within, epsilon_from_extremes, isometry_extremes};
pub use io::{format_f64, read_matrix_text, write_matrix_text};
pub use matrix::DenseMatrix;
pub use ortho::{orthonormalize_rows, OrthoRowMatrix, DEFAULT_ORTHO_TOL};

pub(crate) use matrix::{dot, norm2};
