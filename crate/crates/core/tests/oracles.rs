//! Numerical answers checked against independent computations.

use nalgebra::DMatrix;
use rand::Rng;
use rand_distr::StandardNormal;
use approx::assert_abs_diff_eq;

use ortho_subselect::linalg::{sym_eigenvalues, DenseMatrix, DEFAULT_EIG_TOL};
use ortho_subselect::processes::trial_signs;
use ortho_subselect::rng::stream_rng;
use ortho_subselect::{
    certify, estimate_process, gaussian_sup_estimates, gen_random_ortho, gen_walsh, sup_process_sample,
    SubsetIndex, SubspaceBasis,
};

fn unit_vector(rng: &mut impl Rng, n: usize) -> Vec<f64> {
    let v: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    let norm = v.iter().map(|x| x * x).sum::<f64>().sqrt();
    v.into_iter().map(|x| x / norm).collect()
}

#[test]
fn full_spectrum_matches_nalgebra() {
    let mut rng = stream_rng(11, 0);
    for n in [1, 2, 5, 10, 17, 32] {
        let mut s = DenseMatrix::zeros(n, n);
        for i in 0..n {
            for j in i..n {
                let v: f64 = rng.sample(StandardNormal);
                s[(i, j)] = v;
                s[(j, i)] = v;
            }
        }
        let ours = sym_eigenvalues(&s, DEFAULT_EIG_TOL).unwrap();
        let theirs = DMatrix::from_row_slice(n, n, s.as_slice()).symmetric_eigen();
        let mut expected: Vec<f64> = theirs.eigenvalues.iter().copied().collect();
        expected.sort_by(f64::total_cmp);
        for (a, b) in ours.values.iter().zip(&expected) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }
}

#[test]
fn certificate_brackets_sampled_quadratic_form() {
    let a = gen_walsh(8, 64).unwrap();
    let subset = SubsetIndex::from_zero_based((0..64).filter(|j| j % 3 != 1).collect(), 64).unwrap();
    let cert = certify(&a, &subset).unwrap();
    let mut rng = stream_rng(5, 0);
    let (mut lo, mut hi) = (f64::INFINITY, f64::NEG_INFINITY);
    for _ in 0..100_000 {
        let x = unit_vector(&mut rng, 8);
        let q: f64 = subset
            .iter()
            .map(|j| (0..8).map(|i| a.get(i, j) * x[i]).sum::<f64>().powi(2))
            .sum::<f64>()
            * subset.scale();
        lo = lo.min(q);
        hi = hi.max(q);
    }
    assert!(lo >= cert.lambda_min - 1e-12 && hi <= cert.lambda_max + 1e-12);
    let spread = cert.lambda_max - cert.lambda_min;
    assert!(hi - lo >= 0.5 * spread, "sampled range {} vs {}", hi - lo, spread);
}

#[test]
fn chaos_sample_matches_random_search() {
    let a = gen_random_ortho(3, 16, 21).unwrap();
    let w = SubspaceBasis::from_ortho_rows(&a);
    let signs = trial_signs(21, 0, 16);
    let exact = sup_process_sample(&w, &signs).unwrap();
    let mut rng = stream_rng(21, 1);
    let mut best = 0.0_f64;
    for _ in 0..1_000_000 {
        let y = unit_vector(&mut rng, 3);
        let v = w.embed(&y);
        let s: f64 = v.iter().zip(&signs).map(|(x, &e)| e as f64 * x * x).sum();
        best = best.max(s.abs());
    }
    assert!(best <= exact + 1e-12);
    assert!(exact - best <= 1e-3, "exact {exact}, search {best}");
}

#[test]
fn flat_line_process_is_a_scaled_rademacher_sum() {
    let m = 32;
    let w = SubspaceBasis::from_vector(&vec![1.0; m]).unwrap();
    let trials = 500;
    let est = estimate_process(&w, trials, 99).unwrap();
    let direct: Vec<f64> = (0..trials)
        .map(|k| trial_signs(99, k, m).iter().map(|&e| e as f64).sum::<f64>().abs() / m as f64)
        .collect();
    let mean = direct.iter().sum::<f64>() / trials as f64;
    assert_abs_diff_eq!(est.mean, mean, epsilon = 1e-14);
    assert_abs_diff_eq!(est.q, (1.0 / m as f64).sqrt(), epsilon = 1e-15);
}

#[test]
fn coordinate_axis_gaussian_width_is_half_normal() {
    let w = SubspaceBasis::coordinate(16, 1).unwrap();
    let est = gaussian_sup_estimates(&w, None, 20_000, 3).unwrap();
    let target = (2.0 / std::f64::consts::PI).sqrt();
    assert!((est.mean_inf - target).abs() <= 4.0 * est.std_error_inf);
}
