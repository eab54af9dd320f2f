//! Command-line driver for the `spinseq` library.
//!
//! Every command writes a table to standard output as CSV (default) or JSON
//! and diagnostics to standard error. Exit codes: 0 success, 1 selftest
//! failure, 2 malformed input, 3 constraint violation.

use std::io::Write;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;
use spinseq::num_rational::BigRational;
use spinseq::{
    allowed_m_pairs, cg_squared, check_triangle, convergence_scan, probability_table, to_decimal,
    Error, HalfInt, Priors, ScanRow,
};

pub mod selftest;

pub const EXIT_OK: i32 = 0;
pub const EXIT_SELFTEST: i32 = 1;
pub const EXIT_INPUT: i32 = 2;
pub const EXIT_CONSTRAINT: i32 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "spinseq",
    version,
    about = "Path-counting probabilities for correlated binary sequences"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Probability of each (m1, m2) outcome given n, j1, j2, J and M.
    Prob(ProbArgs),
    /// Squared Clebsch-Gordan coefficients for each (m1, m2).
    Cg(CgArgs),
    /// |P - CG^2| over a range of sequence lengths.
    Converge(ConvergeArgs),
    /// Runs the exhaustive and randomized consistency checks.
    Selftest(selftest::SelftestArgs),
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, ValueEnum)]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Args)]
pub struct Coupling {
    #[arg(long, allow_hyphen_values = true)]
    pub j1: HalfInt,
    #[arg(long, allow_hyphen_values = true)]
    pub j2: HalfInt,
    #[arg(long = "J", allow_hyphen_values = true)]
    pub total_j: HalfInt,
    #[arg(long = "M", allow_hyphen_values = true)]
    pub total_m: HalfInt,
}

#[derive(Debug, Args)]
pub struct Output {
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Digits after the decimal point in the *_decimal columns.
    #[arg(long, default_value_t = spinseq::DEFAULT_DIGITS)]
    pub digits: usize,
}

#[derive(Debug, Args)]
pub struct ProbArgs {
    #[arg(long)]
    pub n: usize,
    #[command(flatten)]
    pub coupling: Coupling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct CgArgs {
    #[command(flatten)]
    pub coupling: Coupling,
    #[command(flatten)]
    pub output: Output,
}

#[derive(Debug, Args)]
pub struct ConvergeArgs {
    #[command(flatten)]
    pub coupling: Coupling,
    #[arg(long)]
    pub n_start: usize,
    #[arg(long)]
    pub n_max: usize,
    /// Double n at each step.
    #[arg(long, conflicts_with = "step")]
    pub geometric: bool,
    /// Add this to n at each step.
    #[arg(long, default_value_t = 1)]
    pub step: usize,
    #[command(flatten)]
    pub output: Output,
}

/// A failure to report on standard error, with its exit code.
#[derive(Debug)]
pub struct Failure {
    pub code: i32,
    pub message: String,
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        let code = match e {
            Error::Constraint(_) | Error::DegeneratePriors(_) | Error::BudgetExceeded { .. } => {
                EXIT_CONSTRAINT
            }
            _ => EXIT_INPUT,
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: format!("write failed: {e}"),
        }
    }
}

impl From<csv::Error> for Failure {
    fn from(e: csv::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: format!("write failed: {e}"),
        }
    }
}

impl From<serde_json::Error> for Failure {
    fn from(e: serde_json::Error) -> Self {
        Failure {
            code: EXIT_INPUT,
            message: format!("write failed: {e}"),
        }
    }
}

/// Runs one parsed invocation and returns its exit code.
pub fn run(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> i32 {
    let result = match cli.command {
        Command::Prob(args) => prob(&args, out),
        Command::Cg(args) => cg(&args, out),
        Command::Converge(args) => converge(&args, out, err),
        Command::Selftest(args) => selftest::run(&args, out),
    };
    match result {
        Ok(code) => code,
        Err(failure) => {
            let _ = writeln!(err, "error: {}", failure.message);
            failure.code
        }
    }
}

#[derive(Debug, Serialize)]
struct Envelope<'a, T> {
    command: &'a str,
    digits: usize,
    rows: &'a [T],
}

fn emit<T: Serialize>(
    command: &str,
    output: &Output,
    rows: &[T],
    out: &mut dyn Write,
) -> Result<(), Failure> {
    match output.format {
        Format::Csv => {
            let mut w = csv::Writer::from_writer(out);
            for row in rows {
                w.serialize(row)?;
            }
            w.flush()?;
        }
        Format::Json => {
            let envelope = Envelope {
                command,
                digits: output.digits,
                rows,
            };
            serde_json::to_writer_pretty(&mut *out, &envelope)?;
            writeln!(out)?;
        }
    }
    Ok(())
}

/// Numerator, denominator and rounded decimal of an exact value.
fn parts(x: &BigRational, digits: usize) -> (String, String, String) {
    (
        x.numer().to_string(),
        x.denom().to_string(),
        to_decimal(x, digits),
    )
}

#[derive(Debug, Serialize)]
struct ProbRow {
    n: usize,
    j1: String,
    j2: String,
    #[serde(rename = "J")]
    total_j: String,
    #[serde(rename = "M")]
    total_m: String,
    m1: String,
    m2: String,
    p_num: String,
    p_den: String,
    p_decimal: String,
}

fn prob(args: &ProbArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let c = &args.coupling;
    let priors = Priors::new(args.n, c.j1, c.j2, c.total_j, c.total_m)?;
    let table = probability_table(&priors)?;
    let rows: Vec<ProbRow> = table
        .rows
        .iter()
        .map(|row| {
            let (p_num, p_den, p_decimal) = parts(&row.probability, args.output.digits);
            ProbRow {
                n: args.n,
                j1: c.j1.to_string(),
                j2: c.j2.to_string(),
                total_j: c.total_j.to_string(),
                total_m: c.total_m.to_string(),
                m1: row.m10.to_string(),
                m2: row.m02.to_string(),
                p_num,
                p_den,
                p_decimal,
            }
        })
        .collect();
    emit("prob", &args.output, &rows, out)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct CgRow {
    j1: String,
    j2: String,
    #[serde(rename = "J")]
    total_j: String,
    #[serde(rename = "M")]
    total_m: String,
    m1: String,
    m2: String,
    cg2_num: String,
    cg2_den: String,
    cg2_decimal: String,
}

fn cg(args: &CgArgs, out: &mut dyn Write) -> Result<i32, Failure> {
    let c = &args.coupling;
    if !check_triangle(c.j1, c.j2, c.total_j) {
        return Err(Failure {
            code: EXIT_INPUT,
            message: format!(
                "triangle rule violated: J={} is not in |j1-j2|..j1+j2 for j1={}, j2={}",
                c.total_j, c.j1, c.j2
            ),
        });
    }
    let rows = allowed_m_pairs(c.j1, c.j2, c.total_m)
        .into_iter()
        .map(|(m1, m2)| {
            let value = cg_squared(c.j1, c.j2, m1, m2, c.total_j, c.total_m)?;
            let (cg2_num, cg2_den, cg2_decimal) = parts(&value, args.output.digits);
            Ok(CgRow {
                j1: c.j1.to_string(),
                j2: c.j2.to_string(),
                total_j: c.total_j.to_string(),
                total_m: c.total_m.to_string(),
                m1: m1.to_string(),
                m2: m2.to_string(),
                cg2_num,
                cg2_den,
                cg2_decimal,
            })
        })
        .collect::<Result<Vec<_>, Error>>()?;
    // an M outside -J..J is caught by cg_squared only when some pair exists
    if rows.is_empty() {
        cg_squared(c.j1, c.j2, c.j1, c.j2, c.total_j, c.total_m)?;
    }
    emit("cg", &args.output, &rows, out)?;
    Ok(EXIT_OK)
}

#[derive(Debug, Serialize)]
struct ConvergeRow {
    n: usize,
    j1: String,
    j2: String,
    #[serde(rename = "J")]
    total_j: String,
    #[serde(rename = "M")]
    total_m: String,
    m1: Option<String>,
    m2: Option<String>,
    p_num: Option<String>,
    p_den: Option<String>,
    p_decimal: Option<String>,
    cg2_num: Option<String>,
    cg2_den: Option<String>,
    cg2_decimal: Option<String>,
    delta_num: Option<String>,
    delta_den: Option<String>,
    delta_decimal: Option<String>,
    status: String,
}

/// Lengths visited by `converge`, ascending.
pub fn lengths(
    n_start: usize,
    n_max: usize,
    geometric: bool,
    step: usize,
) -> Result<Vec<usize>, Failure> {
    let bad = |message: String| Failure {
        code: EXIT_INPUT,
        message,
    };
    if n_start == 0 || n_start > n_max {
        return Err(bad(format!(
            "need 1 <= n-start <= n-max, got {n_start} and {n_max}"
        )));
    }
    if !geometric && step == 0 {
        return Err(bad("step must be positive".to_string()));
    }
    let mut out = Vec::new();
    let mut n = n_start;
    while n <= n_max {
        out.push(n);
        n = if geometric { n * 2 } else { n + step };
    }
    Ok(out)
}

fn converge(args: &ConvergeArgs, out: &mut dyn Write, err: &mut dyn Write) -> Result<i32, Failure> {
    let c = &args.coupling;
    let ns = lengths(args.n_start, args.n_max, args.geometric, args.step)?;
    let scan = convergence_scan(c.j1, c.j2, c.total_j, c.total_m, &ns)?;
    let digits = args.output.digits;
    let base = |n: usize| ConvergeRow {
        n,
        j1: c.j1.to_string(),
        j2: c.j2.to_string(),
        total_j: c.total_j.to_string(),
        total_m: c.total_m.to_string(),
        m1: None,
        m2: None,
        p_num: None,
        p_den: None,
        p_decimal: None,
        cg2_num: None,
        cg2_den: None,
        cg2_decimal: None,
        delta_num: None,
        delta_den: None,
        delta_decimal: None,
        status: "ok".to_string(),
    };
    let mut valid = 0;
    let rows: Vec<ConvergeRow> = scan
        .into_iter()
        .map(|entry| match entry {
            ScanRow::Value { n, row } => {
                valid += 1;
                let (p_num, p_den, p_decimal) = parts(&row.probability, digits);
                let (cg2_num, cg2_den, cg2_decimal) = parts(&row.cg_squared, digits);
                let (delta_num, delta_den, delta_decimal) = parts(&row.delta, digits);
                ConvergeRow {
                    m1: Some(row.m10.to_string()),
                    m2: Some(row.m02.to_string()),
                    p_num: Some(p_num),
                    p_den: Some(p_den),
                    p_decimal: Some(p_decimal),
                    cg2_num: Some(cg2_num),
                    cg2_den: Some(cg2_den),
                    cg2_decimal: Some(cg2_decimal),
                    delta_num: Some(delta_num),
                    delta_den: Some(delta_den),
                    delta_decimal: Some(delta_decimal),
                    ..base(n)
                }
            }
            ScanRow::Skipped { n, reason } => {
                let _ = writeln!(err, "warning: skipping n={n}: {reason}");
                ConvergeRow {
                    status: format!("skipped: {reason}"),
                    ..base(n)
                }
            }
        })
        .collect();
    emit("converge", &args.output, &rows, out)?;
    if valid == 0 {
        let _ = writeln!(
            err,
            "error: no length in {}..={} can host the couplings",
            args.n_start, args.n_max
        );
        return Ok(EXIT_CONSTRAINT);
    }
    Ok(EXIT_OK)
}
