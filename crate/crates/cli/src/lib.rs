//! Command-line front end.
//!
//! Exit codes: 0 success, 1 domain failure (bad matrix, failed certificate,
//! failed check), 2 usage error.

pub mod study;
pub mod verify;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use anyhow::{bail, Context};
use clap::{Args, Parser, Subcommand};

use ortho_subselect::linalg::{read_matrix_text, write_matrix_text, DEFAULT_ORTHO_TOL};
use ortho_subselect::report::{parse_certificate, to_json_string, CertificateJson, CoherenceJson, TraceJson};
use ortho_subselect::selection::DEFAULT_MAX_RETRIES;
use ortho_subselect::{certify, coherence, select_subset, GeneratorKind, OrthoRowMatrix, SelectConfig, SubsetIndex};

use study::{parse_m_rule, rows_to_csv, run_study, StudyConfig};
use verify::{run_suite, Suite};

/// Caps the worker pool; unset or 0 means one worker per core.
pub const THREADS_ENV: &str = "ORTHO_SUBSELECT_THREADS";

#[derive(Debug, Parser)]
#[command(name = "ortho-subselect", version, about = "Almost-isometric column subsets of orthonormal-row matrices")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a test matrix and print its coherence report
    Gen(GenArgs),
    /// Run the halving selection and write a certificate
    Select(SelectArgs),
    /// Recompute the certificate of a given subset
    Certify(CertifyArgs),
    /// Size-scaling study across n
    Study(StudyArgs),
    /// Monte-Carlo and property verification suites
    Verify(VerifyArgs),
}

fn parse_epsilon(s: &str) -> Result<f64, String> {
    let e: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if e > 0.0 && e < 1.0 {
        Ok(e)
    } else {
        Err(format!("epsilon must lie in (0, 1), got {e}"))
    }
}

fn parse_positive(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("{s:?} is not a number"))?;
    if v > 0.0 && v.is_finite() {
        Ok(v)
    } else {
        Err(format!("expected a positive number, got {v}"))
    }
}

fn parse_n_list(s: &str) -> Result<Vec<usize>, String> {
    s.split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().map_err(|_| format!("bad entry {t:?} in n list")))
        .collect()
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long, value_parser = ["walsh", "trig", "random"])]
    pub kind: String,
    #[arg(long)]
    pub n: usize,
    #[arg(long = "M")]
    pub m: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct SelectArgs {
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_parser = parse_epsilon)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = DEFAULT_MAX_RETRIES)]
    pub max_retries: usize,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_size: u64,
    /// Enable the `kappa (t/eps)^2 n ln n` size floor (suggested value 4)
    #[arg(long, value_parser = parse_positive)]
    pub kappa: Option<f64>,
    #[arg(long)]
    pub output: PathBuf,
    #[arg(long)]
    pub trace: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CertifyArgs {
    #[arg(long)]
    pub input: PathBuf,
    /// Certificate JSON file, or 1-based column indices separated by commas
    #[arg(long)]
    pub subset: String,
    #[arg(long, value_parser = parse_positive)]
    pub epsilon: f64,
}

#[derive(Debug, Args)]
pub struct StudyArgs {
    #[arg(long, default_value = "walsh", value_parser = ["walsh", "trig", "random"])]
    pub kind: String,
    /// Comma-separated ascending list of n
    #[arg(long, value_parser = parse_n_list)]
    pub n_list: ::std::vec::Vec<usize>,
    /// Column rule `M = f*n`
    #[arg(long, default_value = "M=16n", value_parser = parse_m_rule)]
    pub m_rule: usize,
    #[arg(long, value_parser = parse_epsilon)]
    pub epsilon: f64,
    #[arg(long, default_value_t = 10)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, value_parser = parse_positive)]
    pub kappa: Option<f64>,
    #[arg(long, default_value_t = DEFAULT_MAX_RETRIES)]
    pub max_retries: usize,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, value_parser = ["process", "sudakov", "quasimetric", "all"])]
    pub suite: String,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

enum Outcome {
    Pass,
    Fail,
}

fn read_ortho(path: &Path) -> anyhow::Result<OrthoRowMatrix> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let m = read_matrix_text(&text).with_context(|| format!("parsing {}", path.display()))?;
    OrthoRowMatrix::new(m, DEFAULT_ORTHO_TOL).with_context(|| format!("validating {}", path.display()))
}

fn emit(line: &str) {
    let mut out = std::io::stdout().lock();
    let _ = writeln!(out, "{line}");
}

fn write_file(path: &Path, contents: &str) -> anyhow::Result<()> {
    fs::write(path, contents).with_context(|| format!("writing {}", path.display()))
}

fn cmd_gen(args: &GenArgs) -> anyhow::Result<Outcome> {
    let kind: GeneratorKind = args.kind.parse()?;
    let a = kind.generate(args.n, args.m, args.seed)?;
    write_file(&args.output, &write_matrix_text(a.matrix()))?;
    emit(&to_json_string(&CoherenceJson::new(a.n(), a.m(), &coherence(&a))));
    Ok(Outcome::Pass)
}

fn cmd_select(args: &SelectArgs) -> anyhow::Result<Outcome> {
    let a = read_ortho(&args.input)?;
    let config = SelectConfig {
        epsilon: args.epsilon,
        seed: args.seed,
        max_retries: args.max_retries,
        min_size: args.min_size as usize,
        kappa: args.kappa,
    };
    let (cert, trace) = select_subset(&a, &config)?;
    write_file(&args.output, &to_json_string(&CertificateJson::from(&cert)))?;
    if let Some(path) = &args.trace {
        write_file(path, &to_json_string(&TraceJson::from(&trace)))?;
    }
    emit(&format!("|I|={} eps={:.16e}", cert.subset.len(), cert.epsilon_achieved));
    Ok(if cert.epsilon_achieved <= args.epsilon {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn read_subset(arg: &str, m: usize) -> anyhow::Result<SubsetIndex> {
    let path = Path::new(arg);
    if path.is_file() {
        let text = fs::read_to_string(path).with_context(|| format!("reading {arg}"))?;
        let cert = parse_certificate(&text).with_context(|| format!("parsing {arg}"))?;
        if cert.m != m {
            bail!("certificate is for M = {}, matrix has M = {m}", cert.m);
        }
        return Ok(cert.subset_index()?);
    }
    let indices = arg
        .split(|c: char| c == ',' || c.is_whitespace())
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<usize>().with_context(|| format!("bad index {t:?}")))
        .collect::<anyhow::Result<Vec<_>>>()?;
    Ok(SubsetIndex::from_one_based(&indices, m)?)
}

fn cmd_certify(args: &CertifyArgs) -> anyhow::Result<Outcome> {
    let a = read_ortho(&args.input)?;
    let subset = read_subset(&args.subset, a.m())?;
    let cert = certify(&a, &subset)?;
    emit(&to_json_string(&CertificateJson::from(&cert)));
    Ok(if cert.epsilon_achieved <= args.epsilon {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn cmd_study(args: &StudyArgs) -> anyhow::Result<Outcome> {
    let config = StudyConfig {
        kind: args.kind.parse()?,
        n_list: args.n_list.clone(),
        m_factor: args.m_rule,
        epsilon: args.epsilon,
        trials: args.trials,
        seed: args.seed,
        kappa: args.kappa,
        max_retries: args.max_retries,
    };
    let (rows, summary) = run_study(&config)?;
    write_file(&args.output, &rows_to_csv(&rows))?;
    emit(&to_json_string(&summary));
    Ok(if summary.violations == 0 {
        Outcome::Pass
    } else {
        Outcome::Fail
    })
}

fn cmd_verify(args: &VerifyArgs) -> anyhow::Result<Outcome> {
    let suite: Suite = args.suite.parse().map_err(anyhow::Error::msg)?;
    let report = run_suite(suite, args.trials, args.seed)?;
    emit(&to_json_string(&report));
    Ok(if report.pass { Outcome::Pass } else { Outcome::Fail })
}

/// Sizes the global worker pool from [`THREADS_ENV`]. Later calls are no-ops.
pub fn configure_threads() {
    let threads = std::env::var(THREADS_ENV)
        .ok()
        .and_then(|v| v.trim().parse::<usize>().ok())
        .unwrap_or(0);
    let _ = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global();
}

/// Parses `args` (including the program name) and runs the command; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return e.exit_code();
        }
    };
    configure_threads();
    let result = match &cli.command {
        Command::Gen(a) => cmd_gen(a),
        Command::Select(a) => cmd_select(a),
        Command::Certify(a) => cmd_certify(a),
        Command::Study(a) => cmd_study(a),
        Command::Verify(a) => cmd_verify(a),
    };
    match result {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::Fail) => 1,
        Err(e) => {
            eprintln!("error: {e:#}");
            1
        }
    }
}
