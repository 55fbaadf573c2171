//! Bernoulli halving selection, exact certification and the uniform baseline.
//!
//! Each halving step keeps the columns of the current set whose independent
//! sign came up `+1`. A draw is accepted only when the child size lies in the
//! window `|I|/2 * (1 - 1/sqrt|I|) <= |child| <= |I|/2` and the certified
//! deviation of the child is within the budget; otherwise a fresh draw is
//! taken. Since every accepted set is certified directly, the final subset
//! always satisfies the requested bound.

use rand::seq::index;
use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::generators::coherence;
use crate::linalg::{deviation_within, epsilon_from_extremes, isometry_extremes, OrthoRowMatrix};
use crate::rng::{derive_seed, rng_from_seed, sign_vector, stream_rng};
use crate::subset::SubsetIndex;

pub const DEFAULT_MAX_RETRIES: usize = 64;

/// Suggested constant for the optional `kappa * (t/eps)^2 * n ln n` size floor.
pub const DEFAULT_KAPPA: f64 = 4.0;

#[derive(Debug, Clone, PartialEq)]
pub struct HalvingStep {
    pub parent_size: usize,
    pub child_size: usize,
    pub deviation_after: f64,
    /// Rejected draws before the accepted one.
    pub retries_used: usize,
    /// Seed of the accepted draw; `sign_vector(rng_from_seed(seed), parent_size)` replays it.
    pub seed: u64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SelectionTrace {
    pub steps: Vec<HalvingStep>,
    pub initial_m: usize,
    pub final_subset: SubsetIndex,
    pub epsilon_target: f64,
}

impl SelectionTrace {
    pub fn total_retries(&self) -> usize {
        self.steps.iter().map(|s| s.retries_used).sum()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct IsometryCertificate {
    pub subset: SubsetIndex,
    pub n: usize,
    pub lambda_min: f64,
    pub lambda_max: f64,
    pub epsilon_achieved: f64,
    pub coherence_t: f64,
    /// `M / |I|`.
    pub scale: f64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SelectConfig {
    pub epsilon: f64,
    pub seed: u64,
    pub max_retries: usize,
    pub min_size: usize,
    /// Enables the analytic size floor when set.
    pub kappa: Option<f64>,
}

impl SelectConfig {
    pub fn new(epsilon: f64, seed: u64) -> Self {
        SelectConfig {
            epsilon,
            seed,
            max_retries: DEFAULT_MAX_RETRIES,
            min_size: 1,
            kappa: None,
        }
    }
}

/// Size window a child of a parent with `parent` columns must fall in.
pub fn cardinality_window(parent: usize) -> (f64, f64) {
    let half = parent as f64 / 2.0;
    (half * (1.0 - 1.0 / (parent as f64).sqrt()), half)
}

pub fn in_window(parent: usize, child: usize) -> bool {
    let (lo, hi) = cardinality_window(parent);
    let c = child as f64;
    child > 0 && child < parent && lo <= c && c <= hi
}

/// `ceil(kappa * t^2 / eps^2 * n * ln n)`.
pub fn target_size(n: usize, epsilon: f64, t: f64, kappa: f64) -> f64 {
    let n = n as f64;
    (kappa * t * t / (epsilon * epsilon) * n * n.ln()).ceil()
}

pub fn certify(a: &OrthoRowMatrix, subset: &SubsetIndex) -> Result<IsometryCertificate> {
    certify_with_coherence(a, subset, coherence(a).t)
}

fn certify_with_coherence(a: &OrthoRowMatrix, subset: &SubsetIndex, t: f64) -> Result<IsometryCertificate> {
    let e = isometry_extremes(a, subset)?;
    Ok(IsometryCertificate {
        subset: subset.clone(),
        n: a.n(),
        lambda_min: e.lambda_min,
        lambda_max: e.lambda_max,
        epsilon_achieved: epsilon_from_extremes(&e),
        coherence_t: t,
        scale: subset.scale(),
    })
}

/// One halving step with up to `max_retries` Bernoulli draws.
///
/// Draw `r` uses seed `derive_seed(seed, r)`.
pub fn halve_step(
    a: &OrthoRowMatrix,
    parent: &SubsetIndex,
    epsilon_budget: f64,
    seed: u64,
    max_retries: usize,
) -> Result<(SubsetIndex, HalvingStep)> {
    if parent.len() < 2 {
        return Err(Error::ParentTooSmall(parent.len()));
    }
    if epsilon_budget.is_nan() || epsilon_budget < 0.0 {
        return Err(Error::InvalidArgument(format!("epsilon budget {epsilon_budget} is negative")));
    }
    if parent.m() != a.m() {
        return Err(Error::Shape(format!(
            "subset is over {} columns, matrix has {}",
            parent.m(),
            a.m()
        )));
    }
    for retry in 0..max_retries {
        let draw_seed = derive_seed(seed, retry as u64);
        let signs = sign_vector(&mut rng_from_seed(draw_seed), parent.len());
        let kept: Vec<usize> = parent
            .iter()
            .zip(&signs)
            .filter_map(|(j, &s)| (s == 1).then_some(j))
            .collect();
        if !in_window(parent.len(), kept.len()) {
            continue;
        }
        let child = SubsetIndex::from_sorted_unchecked(kept, parent.m());
        if let Some(dev) = deviation_within(a, &child, epsilon_budget)? {
            let step = HalvingStep {
                parent_size: parent.len(),
                child_size: child.len(),
                deviation_after: dev,
                retries_used: retry,
                seed: draw_seed,
            };
            return Ok((child, step));
        }
    }
    Err(Error::RetriesExhausted { retries: max_retries })
}

/// Repeated halving from the full index set.
///
/// Stops when a step exhausts its retries, when `|I| <= min_size` (or `|I| < 2`),
/// or, with `kappa` set, when `|I|/2` would drop below [`target_size`].
/// Step `k` is seeded with `derive_seed(config.seed, k)`.
pub fn select_subset(a: &OrthoRowMatrix, config: &SelectConfig) -> Result<(IsometryCertificate, SelectionTrace)> {
    let eps = config.epsilon;
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::InvalidEpsilon(eps));
    }
    if config.min_size == 0 {
        return Err(Error::InvalidArgument("min_size must be at least 1".into()));
    }
    if let Some(k) = config.kappa {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidArgument(format!("kappa must be positive, got {k}")));
        }
    }
    let t = coherence(a).t;
    let floor = config.kappa.map(|k| target_size(a.n(), eps, t, k));

    let mut current = SubsetIndex::full(a.m());
    let mut steps = Vec::new();
    loop {
        if current.len() <= config.min_size || current.len() < 2 {
            break;
        }
        if floor.is_some_and(|f| (current.len() as f64) / 2.0 < f) {
            break;
        }
        let step_seed = derive_seed(config.seed, steps.len() as u64);
        match halve_step(a, &current, eps, step_seed, config.max_retries) {
            Ok((child, step)) => {
                steps.push(step);
                current = child;
            }
            Err(Error::RetriesExhausted { .. }) => break,
            Err(e) => return Err(e),
        }
    }

    let cert = certify_with_coherence(a, &current, t)?;
    if cert.epsilon_achieved > eps {
        // Only reachable when no step was accepted and the full set itself misses the budget.
        return Err(Error::Uncertifiable {
            epsilon: eps,
            achieved: cert.epsilon_achieved,
        });
    }
    let trace = SelectionTrace {
        steps,
        initial_m: a.m(),
        final_subset: current,
        epsilon_target: eps,
    };
    Ok((cert, trace))
}

/// Certificates of `trials` uniformly random subsets of the given size.
///
/// Trial `k` samples without replacement from stream `k` of `seed`.
pub fn uniform_baseline(a: &OrthoRowMatrix, size: usize, seed: u64, trials: usize) -> Result<Vec<IsometryCertificate>> {
    if size == 0 || size > a.m() {
        return Err(Error::SizeOutOfRange { size, m: a.m() });
    }
    let t = coherence(a).t;
    (0..trials)
        .into_par_iter()
        .map(|k| {
            let mut rng = stream_rng(seed, k as u64);
            let picked = index::sample(&mut rng, a.m(), size).into_vec();
            let subset = SubsetIndex::from_zero_based(picked, a.m())?;
            certify_with_coherence(a, &subset, t)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{gen_random_ortho, gen_walsh};
    use crate::linalg::{deviation, DenseMatrix};

    fn skewed_pair() -> OrthoRowMatrix {
        let m = DenseMatrix::from_rows(&[vec![0.8f64.sqrt(), 0.2f64.sqrt()]]).unwrap();
        OrthoRowMatrix::with_default_tol(m).unwrap()
    }

    #[test]
    fn window_arithmetic() {
        assert_eq!(cardinality_window(16), (6.0, 8.0));
        assert!(in_window(2, 1));
        assert!(in_window(3, 1));
        assert!(!in_window(4, 0));
        assert!(!in_window(4, 3));
        assert!(in_window(256, 120) && in_window(256, 128) && !in_window(256, 119));
    }

    #[test]
    fn flat_pair_halves_exactly() {
        let a = gen_walsh(1, 2).unwrap();
        let (child, step) = halve_step(&a, &SubsetIndex::full(2), 0.1, 5, 64).unwrap();
        assert_eq!(child.len(), 1);
        assert!(step.deviation_after < 1e-15);
        assert_eq!((step.parent_size, step.child_size), (2, 1));
    }

    #[test]
    fn walsh_step_size_window() {
        let a = gen_walsh(4, 16).unwrap();
        let (child, step) = halve_step(&a, &SubsetIndex::full(16), 1.0, 1, 64).unwrap();
        assert!((6..=8).contains(&child.len()));
        assert!(step.deviation_after <= 1.0);
    }

    #[test]
    fn accepted_draw_replays_from_seed() {
        let a = gen_random_ortho(3, 40, 2).unwrap();
        let parent = SubsetIndex::full(40);
        let (child, step) = halve_step(&a, &parent, 0.99, 77, 64).unwrap();
        let signs = sign_vector(&mut rng_from_seed(step.seed), parent.len());
        let replay: Vec<usize> = parent.iter().zip(&signs).filter(|(_, &s)| s == 1).map(|(j, _)| j).collect();
        assert_eq!(child.as_slice(), replay.as_slice());
        assert_eq!(step.seed, derive_seed(77, step.retries_used as u64));
    }

    #[test]
    fn zero_budget_exhausts() {
        let a = gen_random_ortho(3, 32, 9).unwrap();
        assert_eq!(
            halve_step(&a, &SubsetIndex::full(32), 0.0, 1, 64),
            Err(Error::RetriesExhausted { retries: 64 })
        );
    }

    #[test]
    fn halve_step_errors() {
        let a = gen_walsh(1, 2).unwrap();
        let single = SubsetIndex::from_one_based(&[1], 2).unwrap();
        assert_eq!(halve_step(&a, &single, 0.5, 0, 8), Err(Error::ParentTooSmall(1)));
        assert!(halve_step(&a, &SubsetIndex::full(2), -1.0, 0, 8).is_err());
    }

    #[test]
    fn select_on_flat_pair() {
        let a = gen_walsh(1, 2).unwrap();
        let (cert, trace) = select_subset(&a, &SelectConfig::new(0.99, 3)).unwrap();
        assert_eq!(cert.subset.len(), 1);
        assert!(cert.epsilon_achieved < 1e-15);
        assert_eq!(trace.steps.len(), 1);
    }

    #[test]
    fn select_with_min_size_m_keeps_everything() {
        let a = gen_walsh(4, 32).unwrap();
        let cfg = SelectConfig {
            min_size: 32,
            ..SelectConfig::new(0.5, 1)
        };
        let (cert, trace) = select_subset(&a, &cfg).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(cert.subset, SubsetIndex::full(32));
        assert!(cert.epsilon_achieved <= 1e-10);
    }

    #[test]
    fn select_walsh_16_256() {
        let a = gen_walsh(16, 256).unwrap();
        let (cert, trace) = select_subset(&a, &SelectConfig::new(0.5, 42)).unwrap();
        assert!(cert.subset.len() < 256);
        assert!(cert.lambda_min >= 0.5 && cert.lambda_max <= 1.5);
        assert_eq!(deviation(&a, &cert.subset).unwrap(), cert.epsilon_achieved);
        for w in trace.steps.windows(2) {
            assert_eq!(w[0].child_size, w[1].parent_size);
        }
        assert_eq!(cert.scale * cert.subset.len() as f64, 256.0);
    }

    #[test]
    fn size_floor_stops_early() {
        let a = gen_walsh(16, 256).unwrap();
        let t = coherence(&a).t;
        // Floor ceil(4 * 4 * 16 ln 16) = 710 exceeds M, so nothing is halved.
        assert_eq!(target_size(16, 0.5, t, DEFAULT_KAPPA), 710.0);
        let cfg = SelectConfig {
            kappa: Some(DEFAULT_KAPPA),
            ..SelectConfig::new(0.5, 42)
        };
        let (cert, trace) = select_subset(&a, &cfg).unwrap();
        assert!(trace.steps.is_empty());
        assert_eq!(cert.subset.len(), 256);
    }

    #[test]
    fn select_rejects_bad_config() {
        let a = gen_walsh(1, 2).unwrap();
        assert_eq!(select_subset(&a, &SelectConfig::new(0.0, 0)).unwrap_err(), Error::InvalidEpsilon(0.0));
        assert_eq!(select_subset(&a, &SelectConfig::new(1.0, 0)).unwrap_err(), Error::InvalidEpsilon(1.0));
        let cfg = SelectConfig {
            min_size: 0,
            ..SelectConfig::new(0.5, 0)
        };
        assert!(select_subset(&a, &cfg).is_err());
    }

    #[test]
    fn certify_examples() {
        let a = skewed_pair();
        let c = certify(&a, &SubsetIndex::from_one_based(&[2], 2).unwrap()).unwrap();
        assert!((c.lambda_min - 0.4).abs() < 1e-15);
        assert!((c.epsilon_achieved - 0.6).abs() < 1e-15);
        assert_eq!(c.scale, 2.0);
        let full = certify(&a, &SubsetIndex::full(2)).unwrap();
        assert!(full.epsilon_achieved <= 1e-10);
        assert!(matches!(
            certify(&a, &SubsetIndex::from_zero_based(vec![], 2).unwrap()),
            Err(Error::EmptySubset)
        ));
    }

    #[test]
    fn baseline_examples() {
        let a = gen_walsh(4, 16).unwrap();
        for c in uniform_baseline(&a, 16, 1, 3).unwrap() {
            assert!(c.epsilon_achieved <= 1e-10);
        }
        let flat = gen_walsh(1, 8).unwrap();
        for c in uniform_baseline(&flat, 1, 1, 5).unwrap() {
            assert!(c.epsilon_achieved.abs() < 1e-15);
        }
        assert_eq!(
            uniform_baseline(&a, 0, 1, 1).unwrap_err(),
            Error::SizeOutOfRange { size: 0, m: 16 }
        );
        assert!(uniform_baseline(&a, 17, 1, 1).is_err());
        let r1 = uniform_baseline(&a, 8, 5, 4).unwrap();
        let r2 = uniform_baseline(&a, 8, 5, 4).unwrap();
        assert_eq!(r1, r2);
    }
}
