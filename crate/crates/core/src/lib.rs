//! Selection of small column subsets `I` of an orthonormal-row matrix `A`
//! (`n x M`) such that `sqrt(M/|I|) A_I^T` is a `(1 ± eps)`-isometry, by
//! repeated random halving with exact spectral certification, plus
//! Monte-Carlo harnesses for the chaos-process and covering estimates that
//! control the subset size.
//!
//! Randomness is fully seeded; see [`rng`] for the stream-splitting rule.

pub mod error;
pub mod generators;
pub mod linalg;
pub mod processes;
pub mod report;
pub mod rng;
pub mod selection;
pub mod stats;
pub mod subset;

pub use error::{Error, Result};
pub use generators::{coherence, gen_random_ortho, gen_trig, gen_walsh, CoherenceReport, GeneratorKind};
pub use linalg::{
    compressed_gram, deviation, orthonormalize_rows, sym_eig_extremes, DenseMatrix, OrthoRowMatrix,
    SymEigExtremes,
};
pub use processes::{
    check_ball_convexity, check_quasi_triangle, estimate_process, gaussian_sup_estimates, packing_count,
    proj_l1_l2_norm, quasimetric_d, sup_process_sample, PackingMetric, ProcessEstimate, PropertyCheck,
    QuasimetricSample, SubspaceBasis,
};
pub use selection::{
    certify, halve_step, select_subset, uniform_baseline, HalvingStep, IsometryCertificate, SelectConfig,
    SelectionTrace,
};
pub use subset::SubsetIndex;
