//! Command-line surface over the library: single-prime queries, range
//! scans, criterion evaluation and threshold solving, and the full case
//! analysis. Output goes to stdout (or a file) in the line-delimited
//! record format, optionally converted to CSV; timing goes to stderr so
//! reports stay byte-identical across runs.
//!
//! Exit codes are never conflated: 0 means everything asked for was
//! certified or no violation exists, 1 means a mathematical failure or
//! violation was found, 2 means the request itself was unusable (bad
//! arguments, missing resources).

use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand, ValueEnum};
use num::{BigRational, BigUint};

use sfpr_core::bounds::{self, BoundsError};
use sfpr_core::counting::{self, CountingError};
use sfpr_core::nt::sieve;
use sfpr_core::proof::{self, ProofError, ProofParams};
use sfpr_core::report::{self, Record, Value};
use sfpr_core::scan::{self, ScanError, ScanKind, ScanParams};
use sfpr_core::{FactoredInt, NtError, PrimeContext, Rf, Round};

#[derive(Parser)]
#[command(
    name = "sfpr",
    version,
    about = "Square-free primitive roots: queries, scans, bounds, and the full case analysis"
)]
struct Cli {
    #[command(subcommand)]
    command: Cmd,
}

#[derive(Subcommand)]
enum Cmd {
    /// Least square-free primitive root of a prime (g = 1 for p = 2)
    Gsf {
        /// Prime modulus
        p: u64,
    },
    /// Least square-full primitive root of a prime, or "none below p"
    Gsfull {
        /// Prime modulus
        p: u64,
    },
    /// Exact counts below a cutoff, with certified main term and error bound
    Count(CountArgs),
    /// Scan a prime range for violations or a census
    Scan(ScanArgs),
    /// Evaluate a criterion or solve for its positivity threshold
    #[command(subcommand)]
    Bounds(BoundsCmd),
    /// Run the complete case analysis for one exponent
    Proof(ProofArgs),
}

#[derive(Args)]
struct CountArgs {
    /// Prime modulus
    #[arg(long)]
    p: u64,
    /// Inclusive cutoff, 1 <= x < p
    #[arg(long)]
    x: u64,
    /// What to count
    #[arg(long, value_enum)]
    kind: CountKindArg,
    /// Divisor of p - 1, required for e-free counts
    #[arg(long)]
    e: Option<u64>,
}

#[derive(Clone, Copy, ValueEnum)]
enum CountKindArg {
    /// Square-free primitive roots up to the cutoff
    SquarefreePrimroot,
    /// Square-free e-free integers up to the cutoff
    EfreeSquarefree,
    /// Square-full primitive roots up to the cutoff
    SquarefullPrimroot,
}

#[derive(Clone, Copy, ValueEnum)]
enum ScanKindArg {
    /// g(p) < sqrt(p) - 2 for every prime past 409
    SquarefreeConjecture,
    /// Census of primes with no square-full primitive root below p
    SquarefullDudek,
    /// g(p)^b < p^a for alpha = a/b, checked exactly
    TheoremDirect,
}

impl From<ScanKindArg> for ScanKind {
    fn from(k: ScanKindArg) -> ScanKind {
        match k {
            ScanKindArg::SquarefreeConjecture => ScanKind::SquarefreeConjecture,
            ScanKindArg::SquarefullDudek => ScanKind::SquarefullDudek,
            ScanKindArg::TheoremDirect => ScanKind::TheoremDirect,
        }
    }
}

#[derive(Args)]
struct ScanArgs {
    #[arg(long, value_enum)]
    kind: ScanKindArg,
    /// First prime candidate, inclusive
    #[arg(long)]
    from: u64,
    /// Last prime candidate, inclusive
    #[arg(long)]
    to: u64,
    /// Exponent as a fraction or decimal (theorem-direct scans only)
    #[arg(long)]
    alpha: Option<String>,
    /// Worker threads; the report is byte-identical for any value
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Resumable progress file; a finished run replays to the same report
    #[arg(long)]
    checkpoint: Option<PathBuf>,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Lines)]
    format: Format,
}

#[derive(Subcommand)]
enum BoundsCmd {
    /// Directed value and verdict of the criterion at a point
    Eval(BoundsEvalArgs),
    /// Least certified point from which the criterion stays positive
    Threshold(BoundsThresholdArgs),
}

#[derive(Args)]
struct BoundsEvalArgs {
    /// Exponent as a fraction or decimal, e.g. 24/25 or 0.96
    #[arg(long)]
    alpha: String,
    /// Number of distinct primes of p - 1
    #[arg(long)]
    omega: u32,
    /// Sieve size; omit for the plain criterion
    #[arg(long)]
    s: Option<u32>,
    /// Primes barred from the worst-case sieving set
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<u64>,
    /// Evaluation point: a positive integer, or "primorial" for
    /// primorial(omega) + 1, the least prime of the class
    #[arg(long)]
    p: String,
}

#[derive(Args)]
struct BoundsThresholdArgs {
    #[arg(long)]
    alpha: String,
    #[arg(long)]
    omega: u32,
    /// Sieve size; omit for the plain criterion
    #[arg(long)]
    s: Option<u32>,
    /// Primes barred from the worst-case sieving set
    #[arg(long, value_delimiter = ',')]
    exclude: Vec<u64>,
    /// Give up once the search passes 10^CEILING
    #[arg(long, default_value_t = 60)]
    ceiling_exp10: u32,
}

#[derive(Args)]
struct ProofArgs {
    /// Exponent as a fraction or decimal
    #[arg(long)]
    alpha: String,
    /// Accept the Lloyd table beyond the re-verified prefix; pass false to
    /// weaken every table-dependent conclusion to a residual floor
    #[arg(long, default_value_t = true, action = clap::ArgAction::Set)]
    trust_lloyd: bool,
    /// Check every prime up to here individually (must exceed 2791)
    #[arg(long, default_value_t = 10_000_000)]
    direct_scan_limit: u64,
    /// Requested top of the explicit omega range
    #[arg(long, default_value_t = 500)]
    omega_max: u32,
    /// Worker threads for the enumeration window
    #[arg(long, default_value_t = 1)]
    jobs: usize,
    /// Write the report here instead of stdout
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Lines)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    /// One record per line, stable key order
    Lines,
    /// Long-form CSV: record index, kind, key, value
    Csv,
}

/// A failure carrying the exit code discipline: 1 = mathematical failure,
/// 2 = usage or resource error.
struct Fail {
    code: u8,
    message: String,
}

fn usage(msg: impl ToString) -> Fail {
    Fail {
        code: 2,
        message: msg.to_string(),
    }
}

fn math(msg: impl ToString) -> Fail {
    Fail {
        code: 1,
        message: msg.to_string(),
    }
}

fn from_bounds_err(e: BoundsError) -> Fail {
    match e {
        BoundsError::BadAlpha { .. }
        | BoundsError::BadP { .. }
        | BoundsError::XBelowOne { .. }
        | BoundsError::XOutOfRange { .. }
        | BoundsError::BadS { .. }
        | BoundsError::DeltaNotPositive { .. } => usage(e),
        BoundsError::NoThreshold { .. } | BoundsError::Nt(_) => math(e),
    }
}

fn from_scan_err(e: ScanError) -> Fail {
    match e {
        ScanError::EmptyRange { .. }
        | ScanError::CeilingExceeded { .. }
        | ScanError::MissingAlpha
        | ScanError::AlphaDenominatorTooLarge { .. }
        | ScanError::Checkpoint { .. }
        | ScanError::Io(_) => usage(e),
        ScanError::Parallel(_) | ScanError::Report(_) | ScanError::Nt(_) => math(e),
        ScanError::Bounds(b) => from_bounds_err(b),
    }
}

fn from_proof_err(e: ProofError) -> Fail {
    match e {
        ProofError::AlphaOutOfRange { .. }
        | ProofError::ScanLimitTooLow { .. }
        | ProofError::BadOmega { .. } => usage(e),
        ProofError::Bounds(b) => from_bounds_err(b),
        ProofError::Certification(_)
        | ProofError::PipelineMismatch(_)
        | ProofError::Parallel(_)
        | ProofError::Nt(_) => math(e),
    }
}

fn from_counting_err(e: CountingError) -> Fail {
    match e {
        CountingError::XOutOfRange { .. } => usage(e),
        CountingError::Nt(NtError::BadExponentDivisor { .. }) => usage(e),
        CountingError::Nt(other) => math(other),
    }
}

fn parse_alpha_arg(s: &str) -> Result<BigRational, Fail> {
    bounds::parse_alpha(s).map_err(usage)
}

fn prime_context(p: u64) -> Result<PrimeContext, Fail> {
    PrimeContext::new(p).map_err(usage)
}

fn factorization_text(f: &FactoredInt) -> String {
    if f.factors().is_empty() {
        return "1".to_string();
    }
    f.factors()
        .iter()
        .map(|&(q, k)| {
            if k == 1 {
                q.to_string()
            } else {
                format!("{q}^{k}")
            }
        })
        .collect::<Vec<_>>()
        .join(" * ")
}

fn real_value(v: &Rf, dir: Round) -> Value {
    Value::Real {
        dec: v.to_decimal_string(24, dir),
        prec: 96,
        dir,
    }
}

fn emit(records: &[Record], out: Option<&Path>, format: Format) -> Result<(), Fail> {
    let text = match format {
        Format::Lines => report::serialize_lines(records),
        Format::Csv => report::to_csv(records),
    };
    match out {
        Some(path) => std::fs::write(path, text)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn cmd_gsf(p: u64) -> Result<u8, Fail> {
    let ctx = prime_context(p)?;
    let g = ctx
        .least_squarefree_primitive_root(p)
        .map_err(|e| math(format!("p = {p}: {e}")))?;
    let rec = Record::new("gsf")
        .push("p", Value::int(p))
        .push("g", Value::int(g))
        .push("omega", Value::int(ctx.pm1().omega() as u64))
        .push(
            "pm1-factorization",
            Value::text(factorization_text(ctx.pm1())),
        );
    emit(&[rec], None, Format::Lines)?;
    Ok(0)
}

fn cmd_gsfull(p: u64) -> Result<u8, Fail> {
    let ctx = prime_context(p)?;
    let mut rec = Record::new("gsfull")
        .push("p", Value::int(p))
        .push("omega", Value::int(ctx.pm1().omega() as u64))
        .push(
            "pm1-factorization",
            Value::text(factorization_text(ctx.pm1())),
        );
    rec = match counting::least_squarefull_primroot(&ctx) {
        Some(g) => rec.push("g", Value::int(g)),
        None => rec.push("result", Value::text("none below p")),
    };
    emit(&[rec], None, Format::Lines)?;
    Ok(0)
}

fn cmd_count(args: &CountArgs) -> Result<u8, Fail> {
    let ctx = prime_context(args.p)?;
    let result = match args.kind {
        CountKindArg::SquarefreePrimroot => {
            counting::count_squarefree_primroots(&ctx, args.x).map_err(from_counting_err)?
        }
        CountKindArg::EfreeSquarefree => {
            let e = args
                .e
                .ok_or_else(|| usage("--e is required for e-free counts"))?;
            counting::count_efree_squarefree(&ctx, e, args.x).map_err(from_counting_err)?
        }
        CountKindArg::SquarefullPrimroot => {
            counting::count_squarefull_primroots(&ctx, args.x).map_err(from_counting_err)?
        }
    };
    let mut rec = Record::new("count")
        .push("p", Value::int(result.p))
        .push("x", Value::int(result.x))
        .push("omega", Value::int(ctx.pm1().omega() as u64))
        .push(
            "pm1-factorization",
            Value::text(factorization_text(ctx.pm1())),
        );
    if let Some(e) = result.e {
        rec = rec.push("e", Value::int(e));
    }
    rec = rec.push("count", Value::int(result.count));
    if let Some(main) = &result.main_term {
        rec = rec
            .push("main-lo", real_value(&main.lo, Round::Down))
            .push("main-hi", real_value(&main.hi, Round::Up));
    }
    if let Some(err) = &result.error_bound {
        rec = rec.push("error-hi", real_value(&err.hi, Round::Up));
    }
    let mut code = 0;
    if let Some(holds) = result.explicit_error_holds() {
        rec = rec.push("explicit-error-holds", Value::Bool(holds));
        if !holds {
            code = 1;
        }
    }
    emit(&[rec], None, Format::Lines)?;
    Ok(code)
}

fn cmd_scan(args: &ScanArgs) -> Result<u8, Fail> {
    let kind: ScanKind = args.kind.into();
    let mut params = ScanParams::new(kind, args.from, args.to);
    params.jobs = args.jobs;
    if let Some(a) = &args.alpha {
        params.alpha = Some(parse_alpha_arg(a)?);
    }
    if let Ok(raw) = std::env::var("SFPR_SCAN_CEILING") {
        params.ceiling = u64::from_str(raw.trim())
            .map_err(|e| usage(format!("SFPR_SCAN_CEILING = {raw:?}: {e}")))?;
    }
    let started = Instant::now();
    let report = match &args.checkpoint {
        Some(path) => scan::run_scan_with_checkpoint(&params, Some(path)),
        None => scan::run_scan(&params),
    }
    .map_err(from_scan_err)?;
    eprintln!(
        "scanned {} primes in {:.3}s",
        report.primes_scanned,
        started.elapsed().as_secs_f64()
    );
    emit(&report.to_records(), args.out.as_deref(), args.format)?;
    // A census records absences as data; the other kinds report genuine
    // violations of a theorem or conjecture.
    let code = match kind {
        ScanKind::SquarefullDudek => 0,
        _ => u8::from(!report.violations.is_empty()),
    };
    Ok(code)
}

fn cmd_bounds_eval(args: &BoundsEvalArgs) -> Result<u8, Fail> {
    let alpha = parse_alpha_arg(&args.alpha)?;
    let (point, point_value) = if args.p.trim() == "primorial" {
        let n = sieve::primorial(args.omega as usize) + 1u32;
        (
            Rf::from_biguint(n.clone()),
            Value::Int(num::BigInt::from(n)),
        )
    } else {
        let n = BigUint::from_str(args.p.trim())
            .map_err(|e| usage(format!("--p {:?}: {e}", args.p)))?;
        (
            Rf::from_biguint(n.clone()),
            Value::Int(num::BigInt::from(n)),
        )
    };
    let mut rec = Record::new("bounds-eval")
        .push("alpha", Value::Rat(alpha.clone()))
        .push("omega", Value::int(args.omega))
        .push("s", Value::int(args.s.unwrap_or(0)))
        .push("p", point_value);
    let evaluation = match args.s {
        None | Some(0) => bounds::eval_g(&point, &alpha, args.omega).map_err(from_bounds_err)?,
        Some(s) => {
            let delta =
                bounds::worst_case_delta(args.omega, s, &args.exclude).map_err(from_bounds_err)?;
            rec = rec.push("delta", Value::Rat(delta.clone()));
            if !args.exclude.is_empty() {
                rec = rec.push(
                    "excluded",
                    Value::text(
                        args.exclude
                            .iter()
                            .map(u64::to_string)
                            .collect::<Vec<_>>()
                            .join(","),
                    ),
                );
            }
            bounds::eval_gs(&point, &alpha, args.omega - s, &delta, s).map_err(from_bounds_err)?
        }
    };
    rec = rec
        .push("value", real_value(&evaluation.value, Round::Down))
        .push("verdict", Value::Bool(evaluation.verdict));
    emit(&[rec], None, Format::Lines)?;
    Ok(u8::from(!evaluation.verdict))
}

fn cmd_bounds_threshold(args: &BoundsThresholdArgs) -> Result<u8, Fail> {
    let alpha = parse_alpha_arg(&args.alpha)?;
    let result = bounds::threshold_p_with_ceiling(
        &alpha,
        args.omega,
        args.s.unwrap_or(0),
        &args.exclude,
        args.ceiling_exp10,
    )
    .map_err(from_bounds_err)?;
    let mut rec = Record::new("bounds-threshold")
        .push("alpha", Value::Rat(alpha))
        .push("omega", Value::int(args.omega))
        .push("s", Value::int(args.s.unwrap_or(0)));
    if !args.exclude.is_empty() {
        rec = rec.push(
            "excluded",
            Value::text(
                args.exclude
                    .iter()
                    .map(u64::to_string)
                    .collect::<Vec<_>>()
                    .join(","),
            ),
        );
    }
    rec = rec
        .push("p-star", real_value(&result.p_star, Round::Up))
        .push("bracket-lo", real_value(&result.bracket.lo, Round::Down))
        .push("bracket-hi", real_value(&result.bracket.hi, Round::Up))
        .push("mono-certified", Value::Bool(result.mono_certified))
        .push("spot-checks", Value::Bool(result.spot_checks));
    emit(&[rec], None, Format::Lines)?;
    Ok(0)
}

fn cmd_proof(args: &ProofArgs) -> Result<u8, Fail> {
    let alpha = parse_alpha_arg(&args.alpha)?;
    let mut params = ProofParams::new(alpha);
    params.trust_lloyd = args.trust_lloyd;
    params.direct_scan_limit = args.direct_scan_limit;
    params.omega_max = args.omega_max;
    params.jobs = args.jobs;
    let started = Instant::now();
    let report = proof::full_proof(&params).map_err(from_proof_err)?;
    eprintln!(
        "case analysis assembled in {:.3}s",
        started.elapsed().as_secs_f64()
    );
    emit(&report.to_records(), args.out.as_deref(), args.format)?;
    for failure in &report.failures {
        eprintln!("failure: {failure}");
    }
    Ok(u8::from(!report.failures.is_empty()))
}

fn run(cli: Cli) -> Result<u8, Fail> {
    match &cli.command {
        Cmd::Gsf { p } => cmd_gsf(*p),
        Cmd::Gsfull { p } => cmd_gsfull(*p),
        Cmd::Count(args) => cmd_count(args),
        Cmd::Scan(args) => cmd_scan(args),
        Cmd::Bounds(BoundsCmd::Eval(args)) => cmd_bounds_eval(args),
        Cmd::Bounds(BoundsCmd::Threshold(args)) => cmd_bounds_threshold(args),
        Cmd::Proof(args) => cmd_proof(args),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(fail) => {
            eprintln!("error: {}", fail.message);
            ExitCode::from(fail.code)
        }
    }
}
