//! Empirical size-scaling study over a family of generated matrices.

use rayon::prelude::*;
use serde::Serialize;

use ortho_subselect::linalg::format_f64;
use ortho_subselect::rng::derive_seed_path;
use ortho_subselect::selection::DEFAULT_MAX_RETRIES;
use ortho_subselect::stats::median;
use ortho_subselect::{select_subset, GeneratorKind, SelectConfig};

#[derive(Debug, Clone, PartialEq)]
pub struct StudyConfig {
    pub kind: GeneratorKind,
    /// Ascending, every entry at least 2.
    pub n_list: Vec<usize>,
    /// `M = m_factor * n`.
    pub m_factor: usize,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub kappa: Option<f64>,
    pub max_retries: usize,
}

impl StudyConfig {
    pub fn new(kind: GeneratorKind, n_list: Vec<usize>, m_factor: usize, epsilon: f64, trials: usize, seed: u64) -> Self {
        StudyConfig {
            kind,
            n_list,
            m_factor,
            epsilon,
            trials,
            seed,
            kappa: None,
            max_retries: DEFAULT_MAX_RETRIES,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.n_list.is_empty() {
            return Err("n list is empty".into());
        }
        if self.n_list.windows(2).any(|w| w[0] >= w[1]) {
            return Err("n list must be strictly ascending".into());
        }
        if self.n_list[0] < 2 {
            return Err("every n must be at least 2 (the ratio divides by n ln n)".into());
        }
        if self.m_factor == 0 {
            return Err("M factor must be positive".into());
        }
        if self.trials == 0 {
            return Err("trials must be at least 1".into());
        }
        if !(self.epsilon > 0.0 && self.epsilon < 1.0) {
            return Err(format!("epsilon must lie in (0, 1), got {}", self.epsilon));
        }
        Ok(())
    }

    /// Seed of the selection run for `(n, trial)`.
    pub fn selection_seed(&self, n: usize, trial: usize) -> u64 {
        derive_seed_path(self.seed, &[n as u64, trial as u64])
    }

    /// Seed of the generated matrix for `n` (used by the random family only).
    pub fn matrix_seed(&self, n: usize) -> u64 {
        derive_seed_path(self.seed, &[n as u64, u64::MAX])
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct StudyRow {
    pub n: usize,
    pub m: usize,
    pub trial: usize,
    pub final_size: usize,
    pub epsilon_achieved: f64,
    pub steps: usize,
    pub total_retries: usize,
    /// `final_size / (n ln n)`.
    pub ratio: f64,
}

pub const CSV_HEADER: &str = "n,M,trial,final_size,epsilon_achieved,steps,total_retries,ratio";

impl StudyRow {
    pub fn to_csv_line(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.n,
            self.m,
            self.trial,
            self.final_size,
            format_f64(self.epsilon_achieved),
            self.steps,
            self.total_retries,
            format_f64(self.ratio)
        )
    }
}

pub fn size_ratio(final_size: usize, n: usize) -> f64 {
    final_size as f64 / (n as f64 * (n as f64).ln())
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PerN {
    pub n: usize,
    #[serde(rename = "M")]
    pub m: usize,
    pub median_final_size: f64,
    pub median_ratio: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudySummary {
    pub kind: &'static str,
    pub epsilon: f64,
    pub trials: usize,
    pub seed: u64,
    pub per_n: Vec<PerN>,
    /// max / min of the per-n median ratios.
    pub ratio_spread: f64,
    /// Rows whose certificate missed epsilon; always zero for a sound selector.
    pub violations: usize,
}

#[derive(Debug)]
pub enum StudyError {
    Config(String),
    Library(ortho_subselect::Error),
}

impl std::fmt::Display for StudyError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StudyError::Config(m) => write!(f, "{m}"),
            StudyError::Library(e) => write!(f, "{e}"),
        }
    }
}

impl std::error::Error for StudyError {}

/// Runs every `(n, trial)` selection; rows come back in `(n, trial)` order
/// regardless of scheduling.
pub fn run_study(config: &StudyConfig) -> Result<(Vec<StudyRow>, StudySummary), StudyError> {
    config.validate().map_err(StudyError::Config)?;
    let matrices = config
        .n_list
        .iter()
        .map(|&n| config.kind.generate(n, config.m_factor * n, config.matrix_seed(n)))
        .collect::<Result<Vec<_>, _>>()
        .map_err(StudyError::Library)?;
    let jobs: Vec<(usize, usize)> = (0..config.n_list.len())
        .flat_map(|k| (0..config.trials).map(move |t| (k, t)))
        .collect();
    let rows = jobs
        .par_iter()
        .map(|&(k, trial)| {
            let a = &matrices[k];
            let n = config.n_list[k];
            let select = SelectConfig {
                epsilon: config.epsilon,
                seed: config.selection_seed(n, trial),
                max_retries: config.max_retries,
                min_size: 1,
                kappa: config.kappa,
            };
            let (cert, trace) = select_subset(a, &select)?;
            Ok(StudyRow {
                n,
                m: a.m(),
                trial,
                final_size: cert.subset.len(),
                epsilon_achieved: cert.epsilon_achieved,
                steps: trace.steps.len(),
                total_retries: trace.total_retries(),
                ratio: size_ratio(cert.subset.len(), n),
            })
        })
        .collect::<Result<Vec<_>, ortho_subselect::Error>>()
        .map_err(StudyError::Library)?;

    let per_n: Vec<PerN> = config
        .n_list
        .iter()
        .map(|&n| {
            let of_n: Vec<&StudyRow> = rows.iter().filter(|r| r.n == n).collect();
            PerN {
                n,
                m: config.m_factor * n,
                median_final_size: median(&of_n.iter().map(|r| r.final_size as f64).collect::<Vec<_>>()),
                median_ratio: median(&of_n.iter().map(|r| r.ratio).collect::<Vec<_>>()),
            }
        })
        .collect();
    let hi = per_n.iter().map(|p| p.median_ratio).fold(f64::NEG_INFINITY, f64::max);
    let lo = per_n.iter().map(|p| p.median_ratio).fold(f64::INFINITY, f64::min);
    let violations = rows.iter().filter(|r| r.epsilon_achieved > config.epsilon).count();
    let summary = StudySummary {
        kind: config.kind.name(),
        epsilon: config.epsilon,
        trials: config.trials,
        seed: config.seed,
        per_n,
        ratio_spread: hi / lo,
        violations,
    };
    Ok((rows, summary))
}

pub fn rows_to_csv(rows: &[StudyRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        out.push_str(&r.to_csv_line());
        out.push('\n');
    }
    out
}

/// Parses `M = f n` in the spellings `M=16n`, `M = 16*n`, `M = 16·n`, `16n` or `16`.
pub fn parse_m_rule(s: &str) -> Result<usize, String> {
    let compact: String = s.chars().filter(|c| !c.is_whitespace()).collect();
    let body = compact.strip_prefix("M=").unwrap_or(&compact);
    let body = body
        .strip_suffix("*n")
        .or_else(|| body.strip_suffix("·n"))
        .or_else(|| body.strip_suffix('n'))
        .unwrap_or(body);
    match body.parse::<usize>() {
        Ok(f) if f > 0 => Ok(f),
        _ => Err(format!("cannot read {s:?} as `M = f*n` with a positive integer f")),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn m_rule_spellings() {
        for s in ["M=16n", "M = 16*n", "M = 16·n", "16n", "16"] {
            assert_eq!(parse_m_rule(s), Ok(16), "{s}");
        }
        assert!(parse_m_rule("M=0n").is_err());
        assert!(parse_m_rule("M=n+1").is_err());
    }

    #[test]
    fn config_validation() {
        let ok = StudyConfig::new(GeneratorKind::Walsh, vec![8, 16], 16, 0.5, 1, 0);
        assert!(ok.validate().is_ok());
        let mut bad = ok.clone();
        bad.n_list = vec![16, 8];
        assert!(bad.validate().is_err());
        bad.n_list = vec![];
        assert!(bad.validate().is_err());
        bad = ok.clone();
        bad.epsilon = 1.0;
        assert!(bad.validate().is_err());
        bad = ok;
        bad.trials = 0;
        assert!(bad.validate().is_err());
    }

    #[test]
    fn single_row_study() {
        let cfg = StudyConfig::new(GeneratorKind::Walsh, vec![8], 16, 0.5, 1, 3);
        let (rows, summary) = run_study(&cfg).unwrap();
        assert_eq!(rows.len(), 1);
        assert!(rows[0].ratio > 0.0);
        assert_eq!(rows[0].ratio, size_ratio(rows[0].final_size, 8));
        assert_eq!(summary.ratio_spread, 1.0);
        assert_eq!(summary.violations, 0);
        let csv = rows_to_csv(&rows);
        assert!(csv.starts_with(CSV_HEADER));
        assert_eq!(csv.lines().count(), 2);
    }
}
