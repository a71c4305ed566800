//! `hardy-lab`: verify Hardy-type inequalities and reverse Hölder
//! higher integrability from the command line.
//!
//! Reports go to stdout (or `--out`), diagnostics to stderr. Exit codes:
//! 0 every check passed, 1 some check failed or diverged, 2 usage or input
//! error.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use hardy_lab::continuous::{self, TheoremParams};
use hardy_lab::discrete::{self, WeightedSeq};
use hardy_lab::gen::DEFAULT_SEED;
use hardy_lab::rearrange::{rearrange_nonincreasing, theorem_c_check, RearrangeReport};
use hardy_lab::rhi::{self, Family, RhiQuery};
use hardy_lab::{parse_real, sharpness, suites, IneqReport, LabError, QuadSpec, StepWeight, Weight};
use serde::Serialize;
use thiserror::Error;

const PASS: u8 = 0;
const FAIL: u8 = 1;
const USAGE: u8 = 2;

#[derive(Debug, Error)]
enum CliError {
    #[error(transparent)]
    Lab(#[from] LabError),
    #[error("cannot read {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error("cannot write {path}: {source}")]
    Write { path: PathBuf, source: std::io::Error },
    #[error("{0}")]
    Usage(String),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            // The input was fine; the numerics could not settle the check.
            CliError::Lab(LabError::Accuracy { .. } | LabError::MultipleRoots(_)) => FAIL,
            _ => USAGE,
        }
    }
}

type CliResult<T> = Result<T, CliError>;

fn real(text: &str) -> Result<f64, String> {
    parse_real(text).map_err(|e| e.to_string())
}

#[derive(Debug, Parser)]
#[command(name = "hardy-lab", version, about = "Hardy-type inequalities and reverse Hölder weights")]
struct Cli {
    /// Master seed for randomized reports.
    #[arg(long, global = true, env = "HARDY_LAB_SEED", default_value_t = DEFAULT_SEED)]
    seed: u64,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum FamilyArg {
    Prefix,
    Suffix,
    All,
}

impl From<FamilyArg> for Family {
    fn from(f: FamilyArg) -> Self {
        match f {
            FamilyArg::Prefix => Family::Prefix,
            FamilyArg::Suffix => Family::Suffix,
            FamilyArg::All => Family::All,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Check {
    Theorem1,
    Theorem2,
    Corollary1,
    Lemma1,
    Interpolation,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Reverse Hölder constant, sharp exponent p0 and the verified range table.
    Analyze {
        #[arg(long)]
        weight: PathBuf,
        #[arg(long, value_parser = real)]
        q: f64,
        #[arg(long, value_enum, default_value = "prefix")]
        family: FamilyArg,
        #[arg(long, default_value_t = RhiQuery::MIN_GRID)]
        grid: usize,
        /// Number of exponents in the table.
        #[arg(long, default_value_t = 16)]
        p_grid: usize,
        /// Relative tolerance of the quadrature.
        #[arg(long, value_parser = real)]
        tol: Option<f64>,
    },
    /// One report per parameter combination of a named check.
    Verify {
        #[arg(value_enum)]
        check: Check,
        #[arg(long)]
        weight: Option<PathBuf>,
        /// CSV with header `lambda,a`.
        #[arg(long)]
        sequence: Option<PathBuf>,
        #[arg(long, value_parser = real, required = true)]
        p: Vec<f64>,
        #[arg(long, value_parser = real)]
        q: Vec<f64>,
        #[arg(long, value_parser = real)]
        delta: Vec<f64>,
        /// Margin tolerance (theorem2) or quadrature relative tolerance.
        #[arg(long, value_parser = real)]
        tol: Option<f64>,
    },
    /// CSV limit scan over the extremal family a = 1/p − 10^(−k).
    Extremal {
        #[arg(long, value_parser = real)]
        p: f64,
        #[arg(long, value_parser = real)]
        q: f64,
        #[arg(long, value_parser = real, default_value = "1")]
        f: f64,
        #[arg(long, default_value_t = 1, allow_negative_numbers = true)]
        k_min: i32,
        #[arg(long, default_value_t = 4, allow_negative_numbers = true)]
        k_max: i32,
    },
    /// Rearrange a step weight and compare all-interval constants.
    Rearrange {
        #[arg(long)]
        weight: PathBuf,
        #[arg(long, value_parser = real)]
        q: f64,
        #[arg(long, default_value_t = RhiQuery::MIN_GRID)]
        grid: usize,
    },
    /// Run the seeded property suites.
    Selftest {
        /// Comma-separated subset of suites.
        #[arg(long, value_delimiter = ',')]
        suites: Vec<String>,
    },
}

struct Output {
    path: Option<PathBuf>,
    text: String,
}

impl Output {
    fn new(path: Option<PathBuf>) -> Self {
        Output { path, text: String::new() }
    }

    fn json<T: Serialize>(&mut self, value: &T) {
        let line = serde_json::to_string(value).expect("reports always serialize");
        self.text.push_str(&line);
        self.text.push('\n');
    }

    fn flush(self) -> CliResult<()> {
        match self.path {
            Some(path) => fs::write(&path, self.text).map_err(|source| CliError::Write { path, source }),
            None => {
                let mut stdout = std::io::stdout().lock();
                stdout
                    .write_all(self.text.as_bytes())
                    .and_then(|_| stdout.flush())
                    .map_err(|source| CliError::Write { path: "<stdout>".into(), source })
            }
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|source| CliError::Read { path: path.to_path_buf(), source })
}

fn load_weight(path: &Path) -> CliResult<Weight> {
    Ok(Weight::from_json(&read(path)?)?)
}

fn quad_spec(tol: Option<f64>) -> CliResult<QuadSpec> {
    let mut spec = QuadSpec::default();
    if let Some(tol) = tol {
        spec.rel_tol = tol;
    }
    spec.validate()?;
    Ok(spec)
}

fn verdict(pass: bool) -> u8 {
    if pass {
        PASS
    } else {
        FAIL
    }
}

fn analyze(
    out: &mut Output,
    weight: &Path,
    q: f64,
    family: Family,
    grid: usize,
    p_grid: usize,
    tol: Option<f64>,
) -> CliResult<u8> {
    if p_grid == 0 {
        return Err(CliError::Usage("--p-grid must be positive".into()));
    }
    let w = load_weight(weight)?;
    let range = rhi::rhi_range(&w, RhiQuery::new(q, family, grid)?, p_grid, &quad_spec(tol)?)?;
    out.json(&range);
    Ok(verdict(range.all_verified()))
}

struct VerifyArgs<'a> {
    weight: Option<&'a Path>,
    sequence: Option<&'a Path>,
    ps: &'a [f64],
    qs: &'a [f64],
    deltas: &'a [f64],
    tol: Option<f64>,
}

fn verify(out: &mut Output, check: Check, args: VerifyArgs<'_>) -> CliResult<u8> {
    let reports = match check {
        Check::Theorem2 => {
            let path = args.sequence.ok_or_else(|| CliError::Usage("theorem2 needs --sequence".into()))?;
            if args.weight.is_some() {
                return Err(CliError::Usage("theorem2 takes --sequence, not --weight".into()));
            }
            let seq = WeightedSeq::from_csv_reader(read(path)?.as_bytes())?;
            let tol = args.tol.unwrap_or(discrete::DEFAULT_TOL);
            args.ps
                .iter()
                .map(|&p| discrete::theorem2_sides(&seq, p, tol))
                .collect::<Result<Vec<_>, _>>()?
        }
        _ => {
            let path = args.weight.ok_or_else(|| CliError::Usage("continuous checks need --weight".into()))?;
            if args.sequence.is_some() {
                return Err(CliError::Usage("continuous checks take --weight, not --sequence".into()));
            }
            let w = load_weight(path)?;
            let quad = quad_spec(args.tol)?;
            continuous_reports(check, &w, &args, &quad)?
        }
    };
    let mut pass = true;
    for r in &reports {
        pass &= r.passed();
        out.json(r);
    }
    Ok(verdict(pass))
}

fn require_qs(qs: &[f64], check: &str) -> CliResult<()> {
    if qs.is_empty() {
        Err(CliError::Usage(format!("{check} needs --q")))
    } else {
        Ok(())
    }
}

fn continuous_reports(check: Check, w: &Weight, args: &VerifyArgs<'_>, quad: &QuadSpec) -> CliResult<Vec<IneqReport>> {
    let mut reports = Vec::new();
    for &p in args.ps {
        match check {
            Check::Theorem1 => {
                require_qs(args.qs, "theorem1")?;
                for &q in args.qs {
                    reports.push(continuous::theorem1_sides(w, TheoremParams::new(w, p, q)?, quad)?);
                }
            }
            Check::Corollary1 => reports.push(continuous::corollary1_sides(w, p, quad)?),
            Check::Lemma1 => {
                let deltas: &[f64] = if args.deltas.is_empty() { &[1.0] } else { args.deltas };
                for &d in deltas {
                    reports.push(continuous::lemma1_residual(w, p, d, quad)?);
                }
            }
            Check::Interpolation => {
                require_qs(args.qs, "interpolation")?;
                for &q in args.qs {
                    reports.push(continuous::holder_interpolation_gap(w, p, q, quad)?);
                }
            }
            Check::Theorem2 => unreachable!("handled by the discrete branch"),
        }
    }
    Ok(reports)
}

fn extremal(out: &mut Output, p: f64, q: f64, f: f64, k_min: i32, k_max: i32) -> CliResult<u8> {
    if k_min > k_max {
        return Err(CliError::Usage(format!("--k-min {k_min} exceeds --k-max {k_max}")));
    }
    let ks: Vec<i32> = (k_min..=k_max).collect();
    let scan = sharpness::limit_scan(p, q, f, &ks)?;
    out.text.push_str(&scan.to_csv());
    Ok(verdict(scan.holds()))
}

#[derive(Serialize)]
struct RearrangeOutput {
    #[serde(flatten)]
    report: RearrangeReport,
    rearranged: Weight,
}

fn rearrange(out: &mut Output, weight: &Path, q: f64, grid: usize) -> CliResult<u8> {
    let step = StepWeight::try_from(load_weight(weight)?)?;
    RhiQuery::new(q, Family::All, grid)?;
    let report = theorem_c_check(&step, q, grid)?;
    let pass = report.status.is_pass();
    out.json(&RearrangeOutput { report, rearranged: rearrange_nonincreasing(&step).into_weight() });
    Ok(verdict(pass))
}

fn selftest(out: &mut Output, seed: u64, names: &[String]) -> CliResult<u8> {
    let report = suites::run(seed, names)?;
    for c in &report.checks {
        log::info!("{}/{}: {}/{} passed, worst margin {:e}", c.suite, c.check, c.passed, c.cases, c.worst_margin);
    }
    out.json(&report);
    Ok(verdict(report.passed))
}

fn run(cli: Cli) -> CliResult<u8> {
    let mut out = Output::new(cli.out);
    let code = match cli.command {
        Command::Analyze { weight, q, family, grid, p_grid, tol } => {
            analyze(&mut out, &weight, q, family.into(), grid, p_grid, tol)?
        }
        Command::Verify { check, weight, sequence, p, q, delta, tol } => verify(
            &mut out,
            check,
            VerifyArgs {
                weight: weight.as_deref(),
                sequence: sequence.as_deref(),
                ps: &p,
                qs: &q,
                deltas: &delta,
                tol,
            },
        )?,
        Command::Extremal { p, q, f, k_min, k_max } => extremal(&mut out, p, q, f, k_min, k_max)?,
        Command::Rearrange { weight, q, grid } => rearrange(&mut out, &weight, q, grid)?,
        Command::Selftest { suites } => selftest(&mut out, cli.seed, &suites)?,
    };
    out.flush()?;
    Ok(code)
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn"))
        .target(env_logger::Target::Stderr)
        .init();
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { USAGE } else { PASS });
        }
    };
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("hardy-lab: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
