use super::eigen::{sym_eig_extremes, SymEigExtremes, DEFAULT_EIG_TOL};
use super::matrix::DenseMatrix;
use super::ortho::OrthoRowMatrix;
use crate::error::{Error, Result};
use crate::subset::SubsetIndex;

fn check_subset(a: &OrthoRowMatrix, subset: &SubsetIndex) -> Result<()> {
    if subset.is_empty() {
        return Err(Error::EmptySubset);
    }
    if subset.m() != a.m() {
        return Err(Error::Shape(format!(
            "subset is over {} columns, matrix has {}",
            subset.m(),
            a.m()
        )));
    }
    if let Some(&last) = subset.as_slice().last() {
        if last >= a.m() {
            return Err(Error::IndexOutOfRange {
                index: last + 1,
                m: a.m(),
            });
        }
    }
    Ok(())
}

/// `A_I A_I^T`: the `n x n` Gram matrix of the columns in `subset`.
///
/// Sums run over `subset` in increasing column order; the result is exactly symmetric.
pub fn compressed_gram(a: &OrthoRowMatrix, subset: &SubsetIndex) -> Result<DenseMatrix> {
    check_subset(a, subset)?;
    let n = a.n();
    let cols = subset.as_slice();
    let rows: Vec<Vec<f64>> = (0..n)
        .map(|i| {
            let r = a.matrix().row(i);
            cols.iter().map(|&j| r[j]).collect()
        })
        .collect();
    let mut g = DenseMatrix::zeros(n, n);
    for p in 0..n {
        for q in p..n {
            let v: f64 = rows[p].iter().zip(&rows[q]).map(|(x, y)| x * y).sum();
            g[(p, q)] = v;
            g[(q, p)] = v;
        }
    }
    Ok(g)
}

fn scaled_gram(a: &OrthoRowMatrix, subset: &SubsetIndex) -> Result<DenseMatrix> {
    let mut g = compressed_gram(a, subset)?;
    let scale = subset.scale();
    let n = g.rows();
    for p in 0..n {
        for q in 0..n {
            g[(p, q)] *= scale;
        }
    }
    Ok(g)
}

/// Extreme eigenvalues of `(M/|I|) A_I A_I^T`.
pub fn isometry_extremes(a: &OrthoRowMatrix, subset: &SubsetIndex) -> Result<SymEigExtremes> {
    sym_eig_extremes(&scaled_gram(a, subset)?, DEFAULT_EIG_TOL)
}

/// Rayleigh-quotient lower bound on the deviation from a short power iteration.
fn deviation_lower_bound(b: &DenseMatrix) -> f64 {
    let n = b.rows();
    let mut best = (0..n).map(|i| b[(i, i)].abs()).fold(0.0, f64::max);
    let mut x: Vec<f64> = (0..n).map(|i| 1.0 + 0.1 * ((i * 7919) % 13) as f64).collect();
    for _ in 0..30 {
        let norm = super::norm2(&x);
        if norm.is_nan() || norm <= 0.0 {
            break;
        }
        x.iter_mut().for_each(|v| *v /= norm);
        let y: Vec<f64> = (0..n).map(|i| super::dot(b.row(i), &x)).collect();
        best = best.max(super::dot(&x, &y).abs());
        x = y;
    }
    best
}

/// Certified deviation of `subset` if it is at most `budget`, `None` otherwise.
///
/// When the result is `Some`, it is bit-identical to [`deviation`]. A cheap
/// Rayleigh-quotient bound rejects clear misses before the full eigensolve.
pub fn deviation_within(a: &OrthoRowMatrix, subset: &SubsetIndex, budget: f64) -> Result<Option<f64>> {
    let g = scaled_gram(a, subset)?;
    let mut b = g.clone();
    for i in 0..b.rows() {
        b[(i, i)] -= 1.0;
    }
    if deviation_lower_bound(&b) > budget + 1e-12 {
        return Ok(None);
    }
    let dev = epsilon_from_extremes(&sym_eig_extremes(&g, DEFAULT_EIG_TOL)?);
    Ok((dev <= budget).then_some(dev))
}

/// `max(lambda_max - 1, 1 - lambda_min)`, the distance of `[lambda_min, lambda_max]` from 1.
pub fn epsilon_from_extremes(e: &SymEigExtremes) -> f64 {
    (e.lambda_max - 1.0).max(1.0 - e.lambda_min)
}

/// `|| (M/|I|) A_I A_I^T - I ||_2`, i.e. `sup_{|x| <= 1} |(M/|I|) |R_I A^T x|^2 - |x|^2|`.
pub fn deviation(a: &OrthoRowMatrix, subset: &SubsetIndex) -> Result<f64> {
    Ok(epsilon_from_extremes(&isometry_extremes(a, subset)?))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn flat_pair() -> OrthoRowMatrix {
        let h = std::f64::consts::FRAC_1_SQRT_2;
        OrthoRowMatrix::with_default_tol(DenseMatrix::from_rows(&[vec![h, h]]).unwrap()).unwrap()
    }

    fn skewed_pair() -> OrthoRowMatrix {
        let m = DenseMatrix::from_rows(&[vec![0.8f64.sqrt(), 0.2f64.sqrt()]]).unwrap();
        OrthoRowMatrix::with_default_tol(m).unwrap()
    }

    #[test]
    fn gram_one_by_one() {
        let a = skewed_pair();
        let g = compressed_gram(&a, &SubsetIndex::from_one_based(&[1], 2).unwrap()).unwrap();
        assert!((g[(0, 0)] - 0.8).abs() < 1e-15);
    }

    #[test]
    fn gram_of_full_set_is_identity() {
        let a = skewed_pair();
        let g = compressed_gram(&a, &SubsetIndex::full(2)).unwrap();
        assert!(g.max_abs_identity_gap() <= a.ortho_tol());
    }

    #[test]
    fn deviation_examples() {
        let full = SubsetIndex::full(2);
        let first = SubsetIndex::from_one_based(&[1], 2).unwrap();
        assert!(deviation(&flat_pair(), &full).unwrap() <= 1e-10);
        assert!(deviation(&flat_pair(), &first).unwrap().abs() < 1e-15);
        assert!((deviation(&skewed_pair(), &first).unwrap() - 0.6).abs() < 1e-15);
    }

    #[test]
    fn quick_rejection_agrees_with_exact() {
        let a = crate::generators::gen_random_ortho(5, 40, 3).unwrap();
        let mut rng = crate::rng::stream_rng(9, 0);
        for k in 0..200 {
            let size = 5 + k % 30;
            let picked = rand::seq::index::sample(&mut rng, 40, size).into_vec();
            let s = SubsetIndex::from_zero_based(picked, 40).unwrap();
            let exact = deviation(&a, &s).unwrap();
            for budget in [0.3, 0.6, 0.9, exact] {
                let quick = deviation_within(&a, &s, budget).unwrap();
                assert_eq!(quick, (exact <= budget).then_some(exact));
            }
        }
    }

    #[test]
    fn subset_errors() {
        let a = flat_pair();
        let empty = SubsetIndex::from_zero_based(vec![], 2).unwrap();
        assert_eq!(compressed_gram(&a, &empty), Err(Error::EmptySubset));
        let wrong = SubsetIndex::from_one_based(&[3], 3).unwrap();
        assert!(matches!(compressed_gram(&a, &wrong), Err(Error::Shape(_))));
    }
}
