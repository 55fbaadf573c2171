//! Verification suites for the chaos-process, dual Sudakov and quasimetric estimates.
//!
//! Hard checks are mathematical inequalities that must hold on every sample.
//! Soft checks compare Monte-Carlo statistics against closed forms or fitted
//! constants within fixed factors.

use serde::Serialize;
use serde_json::{json, Value};

use ortho_subselect::processes::{
    check_sandwich, fit_packing_constant, sample_ball_section, GaussianSupEstimate,
};
use ortho_subselect::rng::derive_seed;
use ortho_subselect::{
    check_ball_convexity, check_quasi_triangle, coherence, estimate_process, gaussian_sup_estimates, gen_random_ortho,
    gen_walsh, proj_l1_l2_norm, PackingMetric, SubspaceBasis,
};

/// Walsh grid for the chaos-process bound ratio.
pub const PROCESS_GRID: [(usize, usize); 3] = [(8, 128), (16, 256), (32, 512)];
/// Allowed max/min spread of the bound ratio across [`PROCESS_GRID`].
pub const PROCESS_SPREAD_FACTOR: f64 = 2.0;
/// Allowed distance of a Monte-Carlo mean from its closed form, in standard errors.
pub const STD_ERROR_FACTOR: f64 = 3.0;
/// Dimensions sampled by the quasimetric suite.
pub const QUASI_DIMS: [usize; 3] = [2, 8, 32];
pub const BALL_RADIUS: f64 = 0.3;
/// Ceiling on the fitted constant `C` in `r sqrt(ln N(r)) <= C Q sqrt(ln M)`.
pub const PACKING_CONSTANT_CEILING: f64 = 4.0;

/// `E|g| = sqrt(2/pi)` for a standard normal `g`.
pub fn half_normal_mean() -> f64 {
    (2.0 / std::f64::consts::PI).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Suite {
    Process,
    Sudakov,
    Quasimetric,
    All,
}

impl std::str::FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "process" => Ok(Suite::Process),
            "sudakov" => Ok(Suite::Sudakov),
            "quasimetric" => Ok(Suite::Quasimetric),
            "all" => Ok(Suite::All),
            other => Err(format!("unknown suite {other:?}")),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CheckResult {
    pub name: String,
    pub hard: bool,
    pub pass: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SuiteReport {
    pub seed: u64,
    pub checks: Vec<CheckResult>,
    pub pass: bool,
}

fn check(name: &str, hard: bool, pass: bool, detail: Value) -> CheckResult {
    CheckResult {
        name: name.to_string(),
        hard,
        pass,
        detail,
    }
}

type SuiteResult = Result<Vec<CheckResult>, ortho_subselect::Error>;

pub fn process_suite(trials: usize, seed: u64) -> SuiteResult {
    let mut out = Vec::new();
    let axis = SubspaceBasis::coordinate(64, 1)?;
    let est = estimate_process(&axis, trials, derive_seed(seed, 0))?;
    out.push(check("process.coordinate_axis_mean_is_one", true, est.mean == 1.0, json!(est)));

    let mut ratios = Vec::new();
    let mut grid = Vec::new();
    let mut q_ok = true;
    for (k, &(n, m)) in PROCESS_GRID.iter().enumerate() {
        let a = gen_walsh(n, m)?;
        let t = coherence(&a).t;
        let w = SubspaceBasis::from_ortho_rows(&a);
        let q = proj_l1_l2_norm(&w);
        q_ok &= q <= t * (n as f64 / m as f64).sqrt() + 1e-12;
        let est = estimate_process(&w, trials, derive_seed(seed, 1 + k as u64))?;
        ratios.push(est.bound_ratio);
        grid.push(json!({"n": n, "M": m, "t": t, "estimate": est}));
    }
    out.push(check(
        "process.projection_norm_below_coherence_bound",
        true,
        q_ok,
        json!({"grid": PROCESS_GRID.iter().map(|&(n, m)| json!({"n": n, "M": m})).collect::<Vec<_>>()}),
    ));
    let spread = ratios.iter().cloned().fold(f64::NEG_INFINITY, f64::max)
        / ratios.iter().cloned().fold(f64::INFINITY, f64::min);
    out.push(check(
        "process.bound_ratio_stability",
        false,
        spread < PROCESS_SPREAD_FACTOR,
        json!({"grid": grid, "spread": spread, "factor": PROCESS_SPREAD_FACTOR}),
    ));
    Ok(out)
}

fn within_std_errors(mean: f64, se: f64, target: f64) -> bool {
    (mean - target).abs() <= STD_ERROR_FACTOR * se
}

pub fn sudakov_suite(trials: usize, seed: u64) -> SuiteResult {
    let mut out = Vec::new();
    let m = 64;
    let axis = SubspaceBasis::coordinate(m, 1)?;
    let mut e1 = vec![0.0; m];
    e1[0] = 1.0;
    let est: GaussianSupEstimate = gaussian_sup_estimates(&axis, Some(&e1), trials, derive_seed(seed, 10))?;
    let target = half_normal_mean();
    out.push(check(
        "sudakov.coordinate_axis_sup_norm",
        false,
        within_std_errors(est.mean_inf, est.std_error_inf, target),
        json!({"estimate": est, "target": target, "std_errors": STD_ERROR_FACTOR}),
    ));
    let (wm, ws) = (est.mean_weighted.unwrap(), est.std_error_weighted.unwrap());
    out.push(check(
        "sudakov.coordinate_axis_weighted_norm",
        false,
        within_std_errors(wm, ws, target),
        json!({"mean": wm, "std_error": ws, "target": target}),
    ));

    // Union bound: E max_j |<P_W g, e_j>| <= Q sqrt(2 ln 2M).
    let a = gen_walsh(8, 128)?;
    let w = SubspaceBasis::from_ortho_rows(&a);
    let q = proj_l1_l2_norm(&w);
    let weights: Vec<f64> = (0..a.m()).map(|j| 1.0 + (j % 3) as f64).collect();
    let est = gaussian_sup_estimates(&w, Some(&weights), trials, derive_seed(seed, 11))?;
    let inf_bound = q * (2.0 * (2.0 * a.m() as f64).ln()).sqrt();
    // Weighted norm: (E ||P_W g||_E^2)^(1/2) <= Q (sum a_i^2)^(1/2).
    let weighted_bound = q * weights.iter().map(|x| x * x).sum::<f64>().sqrt();
    out.push(check(
        "sudakov.gaussian_width_bounds",
        false,
        est.mean_inf <= inf_bound && est.mean_weighted.unwrap() <= weighted_bound,
        json!({"estimate": est, "Q": q, "sup_norm_bound": inf_bound, "weighted_bound": weighted_bound}),
    ));

    let small = gen_random_ortho(2, 8, derive_seed(seed, 12))?;
    let w = SubspaceBasis::from_ortho_rows(&small);
    let points = sample_ball_section(&w, 512, derive_seed(seed, 13));
    let radii = [0.05, 0.1, 0.2, 0.3, 0.4, 0.6, 0.8];
    let fit = fit_packing_constant(&w, &points, &radii, PackingMetric::Linf, None)?;
    out.push(check(
        "sudakov.packing_constant_fit",
        false,
        fit.fitted_constant <= PACKING_CONSTANT_CEILING,
        json!({"fit": fit, "ceiling": PACKING_CONSTANT_CEILING}),
    ));
    Ok(out)
}

pub fn quasimetric_suite(trials: usize, seed: u64) -> SuiteResult {
    let mut out = Vec::new();
    for (k, &dim) in QUASI_DIMS.iter().enumerate() {
        let s = derive_seed(seed, 20 + k as u64);
        let tri = check_quasi_triangle(trials, dim, s)?;
        out.push(check(&format!("quasimetric.triangle_dim{dim}"), true, tri.pass, json!(tri)));
        let sand = check_sandwich(trials, dim, s)?;
        out.push(check(&format!("quasimetric.sandwich_dim{dim}"), true, sand.pass, json!(sand)));
        let ball = check_ball_convexity((trials / 10).max(1), dim, BALL_RADIUS, s)?;
        out.push(check(&format!("quasimetric.ball_convexity_dim{dim}"), true, ball.pass, json!(ball)));
    }
    Ok(out)
}

pub fn default_trials(suite: Suite) -> usize {
    match suite {
        Suite::Process => 200,
        Suite::Sudakov => 10_000,
        Suite::Quasimetric | Suite::All => 100_000,
    }
}

/// Runs the selected suites. `trials = None` uses each suite's default.
pub fn run_suite(suite: Suite, trials: Option<usize>, seed: u64) -> Result<SuiteReport, ortho_subselect::Error> {
    let pick = |s: Suite| trials.unwrap_or_else(|| default_trials(s));
    let mut checks = Vec::new();
    if matches!(suite, Suite::Process | Suite::All) {
        checks.extend(process_suite(pick(Suite::Process), seed)?);
    }
    if matches!(suite, Suite::Sudakov | Suite::All) {
        checks.extend(sudakov_suite(pick(Suite::Sudakov), seed)?);
    }
    if matches!(suite, Suite::Quasimetric | Suite::All) {
        checks.extend(quasimetric_suite(pick(Suite::Quasimetric), seed)?);
    }
    let pass = checks.iter().all(|c| c.pass);
    Ok(SuiteReport { seed, checks, pass })
}
