//! `qseries` — evaluate q-series, verify the identity catalog against
//! sampled parameters, run the coefficient-convolution oracle, and list the
//! registry.
//!
//! Exit codes are scriptable: 0 converged/all-pass, 1 identity failure,
//! 2 non-convergence or inconclusive verdicts, 3 domain violation or pole,
//! 64 usage error.

mod config;
mod render;

use std::fs;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand};
use num_rational::Rational64;
use qseries::catalog::{registry, run_suite_with, SuiteOptions};
use qseries::multisection::{coefficient_oracle, multisum_b1, multisum_u1, window_for_ratio_slots};
use qseries::pochhammer::{poch_finite, poch_infinite};
use qseries::series::{eval_1psi1, eval_2phi1, eval_A, eval_B, eval_F};
use qseries::{HpComplex, HpReal, QError, SeriesValue};

use config::{ConfigFlags, OutputFormat, RunConfig};
use render::{OracleOutcome, OracleRow};

const EXIT_OK: u8 = 0;
const EXIT_FAIL: u8 = 1;
const EXIT_INCONCLUSIVE: u8 = 2;
const EXIT_DOMAIN: u8 = 3;
const EXIT_USAGE: u8 = 64;

/// A terminal failure: message for stderr plus the scriptable exit code.
#[derive(Debug)]
pub(crate) struct Failure {
    pub code: u8,
    pub message: String,
}

pub(crate) fn usage(message: impl Into<String>) -> Failure {
    Failure {
        code: EXIT_USAGE,
        message: message.into(),
    }
}

impl From<QError> for Failure {
    fn from(e: QError) -> Self {
        let code = match &e {
            QError::Domain { .. } | QError::Pole { .. } => EXIT_DOMAIN,
            QError::NonConvergence { .. } => EXIT_INCONCLUSIVE,
            QError::Context { .. } | QError::UnknownIdentity { .. } | QError::Param { .. } => {
                EXIT_USAGE
            }
        };
        Failure {
            code,
            message: e.to_string(),
        }
    }
}

#[derive(Parser, Debug)]
#[command(
    name = "qseries",
    version,
    about = "Evaluate q-series, verify identities, run the coefficient oracle"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    flags: ConfigFlags,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate one series at explicit parameters
    Eval(EvalArgs),
    /// Check identities at sampled parameters and write a report
    Verify(VerifyArgs),
    /// Compare r-fold filtered-product coefficients with their claims
    Oracle(OracleArgs),
    /// Print the identity registry
    List,
}

#[derive(Args, Debug)]
struct EvalArgs {
    /// One of: A, B, F, 2phi1, 1psi1, poch, poch-inf, multisum-u1, multisum-b1
    #[arg(value_name = "SERIES")]
    series: String,

    /// Theta-weight exponent (integer or p/q rational), for A and B
    #[arg(long, allow_hyphen_values = true, value_name = "RAT")]
    alpha: Option<String>,

    /// Parameter a ("re" or "re+imi")
    #[arg(long, allow_hyphen_values = true, value_name = "Z")]
    a: Option<String>,

    /// Parameter b ("re" or "re+imi")
    #[arg(long, allow_hyphen_values = true, value_name = "Z")]
    b: Option<String>,

    /// Parameter c ("re" or "re+imi")
    #[arg(long, allow_hyphen_values = true, value_name = "Z")]
    c: Option<String>,

    /// Nome q ("re" or "re+imi")
    #[arg(long, allow_hyphen_values = true, value_name = "Z")]
    q: Option<String>,

    /// Argument t ("re" or "re+imi")
    #[arg(long, allow_hyphen_values = true, value_name = "Z")]
    t: Option<String>,

    /// Argument x ("re" or "re+imi")
    #[arg(long, allow_hyphen_values = true, value_name = "Z")]
    x: Option<String>,

    /// Argument z ("re" or "re+imi")
    #[arg(long, allow_hyphen_values = true, value_name = "Z")]
    z: Option<String>,

    /// Integer index n
    #[arg(long, allow_hyphen_values = true, value_name = "INT")]
    n: Option<i64>,

    /// Fold count r
    #[arg(long, value_name = "INT")]
    r: Option<u32>,
}

#[derive(Args, Debug)]
struct VerifyArgs {
    /// Comma-separated identity ids, or "all"
    #[arg(long, value_name = "IDS")]
    ids: String,

    /// Sampled parameter sets per identity
    #[arg(long, default_value_t = 4, value_name = "N")]
    samples: usize,

    /// Perturb every right side additively by 10^(5−tolerance)·max(1,|rhs|);
    /// a sound harness then reports fail on every case
    #[arg(long)]
    mutation: bool,
}

#[derive(Args, Debug)]
struct OracleArgs {
    /// Fold count (2..=4)
    #[arg(long, value_name = "INT")]
    r: u32,

    /// Largest coefficient index (≤ 64)
    #[arg(long = "N", value_name = "INT")]
    n_max: usize,

    /// Parameter a ("re" or "re+imi")
    #[arg(long, allow_hyphen_values = true, value_name = "Z")]
    a: String,

    /// Nome q ("re" or "re+imi")
    #[arg(long, allow_hyphen_values = true, value_name = "Z")]
    q: String,

    /// Not supported: the oracle covers the unilateral product only
    #[arg(long, allow_hyphen_values = true, value_name = "Z")]
    b: Option<String>,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = match e.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => EXIT_OK,
                _ => EXIT_USAGE,
            };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match dispatch(cli) {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}

fn dispatch(cli: Cli) -> Result<u8, Failure> {
    let cfg = RunConfig::resolve(&cli.flags)?;
    match cli.command {
        Command::Eval(args) => cmd_eval(&args, &cfg),
        Command::Verify(args) => cmd_verify(&args, &cfg),
        Command::Oracle(args) => cmd_oracle(&args, &cfg),
        Command::List => cmd_list(&cfg),
    }
}

fn write_output(cfg: &RunConfig, rendered: &str) -> Result<(), Failure> {
    match &cfg.out {
        Some(path) => fs::write(path, rendered)
            .map_err(|e| usage(format!("cannot write {}: {e}", path.display()))),
        None => {
            print!("{rendered}");
            Ok(())
        }
    }
}

// ---------------------------------------------------------------- eval ----

/// Splits "re" or "re±imi" into the two decimal component strings. Signs
/// directly after an exponent marker do not split, so "1e-3+2e-4i" parses.
fn split_complex(s: &str) -> Option<(String, String)> {
    if s.is_empty() {
        return None;
    }
    match s.strip_suffix('i') {
        Some(body) => {
            if body.is_empty() {
                return None;
            }
            let bytes = body.as_bytes();
            let mut split = None;
            for (i, &ch) in bytes.iter().enumerate().skip(1) {
                if (ch == b'+' || ch == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
                    split = Some(i);
                }
            }
            match split {
                Some(i) => {
                    let re = body[..i].to_string();
                    let im = if bytes[i] == b'-' {
                        format!("-{}", &body[i + 1..])
                    } else {
                        body[i + 1..].to_string()
                    };
                    Some((re, im))
                }
                None => Some(("0".to_string(), body.to_string())),
            }
        }
        None => Some((s.to_string(), "0".to_string())),
    }
}

fn parse_complex(text: &str, name: &str, bits: usize) -> Result<HpComplex, Failure> {
    let s = text.trim();
    let (re, im) = split_complex(s).ok_or_else(|| {
        usage(format!(
            "bad parameter `{name}`: `{s}` is not \"re\" or \"re+imi\""
        ))
    })?;
    HpComplex::from_decimal(&re, &im, bits).map_err(|_| {
        usage(format!(
            "bad parameter `{name}`: `{s}` is not a decimal number"
        ))
    })
}

fn parse_alpha(text: &str) -> Result<Rational64, Failure> {
    text.trim().parse::<Rational64>().map_err(|_| {
        usage(format!(
            "bad parameter `alpha`: `{text}` is not an integer or p/q rational"
        ))
    })
}

const SERIES_NAMES: &[&str] = &[
    "A",
    "B",
    "F",
    "2phi1",
    "1psi1",
    "poch",
    "poch-inf",
    "multisum-u1",
    "multisum-b1",
];

fn provided_params(args: &EvalArgs) -> Vec<&'static str> {
    let mut names = Vec::new();
    let flags: [(&'static str, bool); 10] = [
        ("alpha", args.alpha.is_some()),
        ("a", args.a.is_some()),
        ("b", args.b.is_some()),
        ("c", args.c.is_some()),
        ("q", args.q.is_some()),
        ("t", args.t.is_some()),
        ("x", args.x.is_some()),
        ("z", args.z.is_some()),
        ("n", args.n.is_some()),
        ("r", args.r.is_some()),
    ];
    for (name, given) in flags {
        if given {
            names.push(name);
        }
    }
    names
}

fn check_param_set(args: &EvalArgs, expected: &[&str]) -> Result<(), Failure> {
    for name in provided_params(args) {
        if !expected.contains(&name) {
            return Err(usage(format!(
                "`--{name}` is not a parameter of series {}; it takes --{}",
                args.series,
                expected.join(" --")
            )));
        }
    }
    Ok(())
}

fn required<'s>(value: &'s Option<String>, series: &str, name: &str) -> Result<&'s str, Failure> {
    value
        .as_deref()
        .ok_or_else(|| usage(format!("series {series} requires --{name}")))
}

fn required_int<T: Copy>(value: &Option<T>, series: &str, name: &str) -> Result<T, Failure> {
    value.ok_or_else(|| usage(format!("series {series} requires --{name}")))
}

fn compositions_count(r: u32, n: i64) -> usize {
    if n < 0 {
        return 0;
    }
    let mut count: i128 = 1;
    for i in 1..r as i64 {
        count = count * (n + i) as i128 / i as i128;
    }
    count as usize
}

fn cmd_eval(args: &EvalArgs, cfg: &RunConfig) -> Result<u8, Failure> {
    let ctx = cfg.context()?;
    let bits = ctx.precision_bits;
    let series = args.series.as_str();
    let complex = |value: &Option<String>, name: &str| -> Result<HpComplex, Failure> {
        parse_complex(required(value, series, name)?, name, bits)
    };

    let result: SeriesValue = match series {
        "A" => {
            check_param_set(args, &["alpha", "a", "q", "t"])?;
            let alpha = parse_alpha(required(&args.alpha, series, "alpha")?)?;
            eval_A(
                alpha,
                &complex(&args.a, "a")?,
                &complex(&args.q, "q")?,
                &complex(&args.t, "t")?,
                &ctx,
            )?
        }
        "B" => {
            check_param_set(args, &["alpha", "a", "b", "q", "x"])?;
            let alpha = parse_alpha(required(&args.alpha, series, "alpha")?)?;
            eval_B(
                alpha,
                &complex(&args.a, "a")?,
                &complex(&args.b, "b")?,
                &complex(&args.q, "q")?,
                &complex(&args.x, "x")?,
                &ctx,
            )?
        }
        "F" => {
            check_param_set(args, &["a", "c", "q", "z"])?;
            eval_F(
                &complex(&args.a, "a")?,
                &complex(&args.c, "c")?,
                &complex(&args.q, "q")?,
                &complex(&args.z, "z")?,
                &ctx,
            )?
        }
        "2phi1" => {
            check_param_set(args, &["a", "b", "c", "q", "z"])?;
            eval_2phi1(
                &complex(&args.a, "a")?,
                &complex(&args.b, "b")?,
                &complex(&args.c, "c")?,
                &complex(&args.q, "q")?,
                &complex(&args.z, "z")?,
                &ctx,
            )?
        }
        "1psi1" => {
            check_param_set(args, &["a", "b", "q", "z"])?;
            eval_1psi1(
                &complex(&args.a, "a")?,
                &complex(&args.b, "b")?,
                &complex(&args.q, "q")?,
                &complex(&args.z, "z")?,
                &ctx,
            )?
        }
        "poch" => {
            check_param_set(args, &["a", "n", "q"])?;
            let n = required_int(&args.n, series, "n")?;
            let value = poch_finite(&complex(&args.a, "a")?, &complex(&args.q, "q")?, n, &ctx)?;
            SeriesValue {
                value,
                abs_error_estimate: HpReal::zero(bits),
                terms_used: n.unsigned_abs() as usize,
                converged: true,
            }
        }
        "poch-inf" => {
            check_param_set(args, &["a", "q"])?;
            poch_infinite(&complex(&args.a, "a")?, &complex(&args.q, "q")?, &ctx)?
        }
        "multisum-u1" => {
            check_param_set(args, &["a", "n", "q", "r"])?;
            let r = required_int(&args.r, series, "r")?;
            let n = required_int(&args.n, series, "n")?;
            let value = multisum_u1(&complex(&args.a, "a")?, &complex(&args.q, "q")?, r, n, &ctx)?;
            SeriesValue {
                value,
                abs_error_estimate: HpReal::zero(bits),
                terms_used: compositions_count(r, n),
                converged: true,
            }
        }
        "multisum-b1" => {
            check_param_set(args, &["a", "b", "n", "q", "r"])?;
            let r = required_int(&args.r, series, "r")?;
            let n = required_int(&args.n, series, "n")?;
            let a = complex(&args.a, "a")?;
            let b = complex(&args.b, "b")?;
            let q = complex(&args.q, "q")?;
            let window = window_for_ratio_slots(&a, &b, &q, r, n, &ctx)?;
            multisum_b1(&a, &b, &q, r, n, window, &ctx)?
        }
        other => {
            return Err(usage(format!(
                "unknown series `{other}`; expected one of {}",
                SERIES_NAMES.join(", ")
            )))
        }
    };

    write_output(
        cfg,
        &render::render_eval(&result, cfg.format_or(OutputFormat::Text)),
    )?;
    Ok(if result.converged {
        EXIT_OK
    } else {
        EXIT_INCONCLUSIVE
    })
}

// -------------------------------------------------------------- verify ----

fn configure_jobs(cfg: &RunConfig) -> Result<(), Failure> {
    if let Some(jobs) = cfg.jobs {
        if jobs == 0 {
            return Err(usage("--jobs must be at least 1"));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| usage(format!("--jobs: {e}")))?;
    }
    Ok(())
}

fn cmd_verify(args: &VerifyArgs, cfg: &RunConfig) -> Result<u8, Failure> {
    let ctx = cfg.context()?;
    configure_jobs(cfg)?;

    let all: Vec<&str>;
    let listed: Vec<&str>;
    let ids: &[&str] = if args.ids.trim() == "all" {
        all = registry().iter().map(|spec| spec.id).collect();
        &all
    } else {
        listed = args.ids.split(',').map(str::trim).collect();
        if listed.iter().any(|id| id.is_empty()) {
            return Err(usage("--ids contains an empty id"));
        }
        &listed
    };

    let opts = SuiteOptions {
        mutation: args.mutation,
        e2_phase: cfg.e2_phase.to_phase(),
    };
    let report = run_suite_with(ids, args.samples, cfg.seed, &ctx, &opts)?;
    write_output(
        cfg,
        &render::render_report(&report, cfg.format_or(OutputFormat::Json)),
    )?;

    Ok(if report.summary.fail > 0 {
        EXIT_FAIL
    } else if report.summary.inconclusive > 0 {
        EXIT_INCONCLUSIVE
    } else {
        EXIT_OK
    })
}

// -------------------------------------------------------------- oracle ----

fn cmd_oracle(args: &OracleArgs, cfg: &RunConfig) -> Result<u8, Failure> {
    let ctx = cfg.context()?;
    if !(2..=4).contains(&args.r) {
        return Err(usage(format!(
            "--r must be between 2 and 4, got {}",
            args.r
        )));
    }
    if args.n_max > 64 {
        return Err(usage(format!("--N is capped at 64, got {}", args.n_max)));
    }
    let bits = ctx.precision_bits;
    let a = parse_complex(&args.a, "a", bits)?;
    let q = parse_complex(&args.q, "q", bits)?;
    let b = match &args.b {
        Some(text) => Some(parse_complex(text, "b", bits)?),
        None => None,
    };

    let pairs = coefficient_oracle(&a, b.as_ref(), &q, args.r, args.n_max, &ctx)?;
    let tolerance = ctx.tolerance();
    let mut rows = Vec::with_capacity(pairs.len());
    let mut max_abs_diff = HpReal::zero(bits);
    for (n, (computed, claimed)) in pairs.into_iter().enumerate() {
        let abs_diff = computed.sub(&claimed).abs();
        max_abs_diff = max_abs_diff.max(&abs_diff);
        rows.push(OracleRow {
            n,
            computed,
            claimed,
            abs_diff,
        });
    }
    let pass = max_abs_diff.le(&tolerance);

    let outcome = OracleOutcome {
        r: args.r,
        n_max: args.n_max,
        a,
        q,
        rows,
        max_abs_diff,
        pass,
    };
    write_output(
        cfg,
        &render::render_oracle(&outcome, &ctx, cfg.format_or(OutputFormat::Text)),
    )?;
    Ok(if pass { EXIT_OK } else { EXIT_FAIL })
}

// ---------------------------------------------------------------- list ----

fn cmd_list(cfg: &RunConfig) -> Result<u8, Failure> {
    write_output(cfg, &render::render_list(cfg.format_or(OutputFormat::Text)))?;
    Ok(EXIT_OK)
}
