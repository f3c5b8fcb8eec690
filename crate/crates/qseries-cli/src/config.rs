//! Run configuration: built-in defaults, overlaid by an optional `key=value`
//! config file, overlaid by command-line flags. No environment variables, so
//! a report is reproducible from its recorded configuration alone.

use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use qseries::multisection::E2Phase;
use qseries::PrecisionContext;

use crate::{usage, Failure};

/// Output renderings. Every command has a human `text` form; `json` and
/// `csv` are the machine-readable forms.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Text,
}

impl OutputFormat {
    fn from_key(value: &str) -> Option<Self> {
        match value {
            "json" => Some(OutputFormat::Json),
            "csv" => Some(OutputFormat::Csv),
            "text" => Some(OutputFormat::Text),
            _ => None,
        }
    }
}

/// Phase-label reading for the companion shell expansion: the highest
/// ζ_r-exponent label carried by the last summation slot.
#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PhaseChoice {
    /// Labels 1..r−1 across the slots — the misreading that treats the
    /// companion expansion as the first one with renamed variables. Fails
    /// numerically; kept selectable for the variant experiment.
    #[value(name = "r-1")]
    RMinusOne,
    /// Labels 2..r — the printed reading (the top label acts trivially).
    /// Validated numerically; the default.
    #[value(name = "r")]
    R,
}

impl PhaseChoice {
    pub fn to_phase(self) -> E2Phase {
        match self {
            PhaseChoice::RMinusOne => E2Phase::Consecutive,
            PhaseChoice::R => E2Phase::SlotLabels,
        }
    }

    fn from_key(value: &str) -> Option<Self> {
        match value {
            "r-1" => Some(PhaseChoice::RMinusOne),
            "r" => Some(PhaseChoice::R),
            _ => None,
        }
    }
}

/// Name of the reading selected by an [`E2Phase`], for report headers.
pub fn phase_name(phase: E2Phase) -> &'static str {
    match phase {
        E2Phase::SlotLabels => "r",
        E2Phase::Consecutive => "r-1",
    }
}

/// Context, seeding, and output flags shared by every command. Each flag
/// overrides the config file, which overrides the built-in defaults.
#[derive(Args, Debug, Clone)]
pub struct ConfigFlags {
    /// Working precision in bits (default 200)
    #[arg(long, global = true, value_name = "BITS")]
    pub precision: Option<usize>,

    /// Verification tolerance in decimal digits (default 30)
    #[arg(long, global = true, value_name = "DIGITS")]
    pub tolerance: Option<u32>,

    /// Unilateral summation budget (default 10000)
    #[arg(long, global = true, value_name = "N")]
    pub max_terms: Option<usize>,

    /// Bilateral half-window budget (default 200)
    #[arg(long, global = true, value_name = "N")]
    pub max_window: Option<usize>,

    /// Sampler seed (default 0)
    #[arg(long, global = true, value_name = "SEED")]
    pub seed: Option<u64>,

    /// Output format (default: json for verify, text for the others)
    #[arg(long, global = true, value_enum, value_name = "FORMAT")]
    pub format: Option<OutputFormat>,

    /// Write the output to a file instead of stdout
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,

    /// Config file of key=value lines (keys: precision, tolerance,
    /// max-terms, max-window, seed, format, out, jobs, e2-phase)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,

    /// Worker threads for suite runs (default: all processors); reports are
    /// identical regardless
    #[arg(long, global = true, value_name = "N")]
    pub jobs: Option<usize>,

    /// Phase-label reading of the companion shell expansion
    #[arg(long = "e2-phase", global = true, value_enum, value_name = "READING")]
    pub e2_phase: Option<PhaseChoice>,
}

/// The fully resolved configuration a command runs under.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub precision_bits: usize,
    pub tolerance_digits: u32,
    pub max_terms: usize,
    pub max_window: usize,
    pub seed: u64,
    pub format: Option<OutputFormat>,
    pub out: Option<PathBuf>,
    pub jobs: Option<usize>,
    pub e2_phase: PhaseChoice,
}

impl Default for RunConfig {
    fn default() -> Self {
        let ctx = PrecisionContext::default();
        RunConfig {
            precision_bits: ctx.precision_bits,
            tolerance_digits: ctx.tolerance_digits,
            max_terms: ctx.max_terms,
            max_window: ctx.max_window,
            seed: 0,
            format: None,
            out: None,
            jobs: None,
            e2_phase: PhaseChoice::R,
        }
    }
}

impl RunConfig {
    pub fn resolve(flags: &ConfigFlags) -> Result<Self, Failure> {
        let mut cfg = RunConfig::default();
        if let Some(path) = &flags.config {
            apply_file(&mut cfg, path)?;
        }
        apply(&mut cfg.precision_bits, flags.precision);
        apply(&mut cfg.tolerance_digits, flags.tolerance);
        apply(&mut cfg.max_terms, flags.max_terms);
        apply(&mut cfg.max_window, flags.max_window);
        apply(&mut cfg.seed, flags.seed);
        apply(&mut cfg.format, flags.format.map(Some));
        apply(&mut cfg.out, flags.out.clone().map(Some));
        apply(&mut cfg.jobs, flags.jobs.map(Some));
        apply(&mut cfg.e2_phase, flags.e2_phase);
        Ok(cfg)
    }

    pub fn context(&self) -> Result<PrecisionContext, Failure> {
        PrecisionContext::new(
            self.precision_bits,
            self.tolerance_digits,
            self.max_terms,
            self.max_window,
        )
        .map_err(Failure::from)
    }

    pub fn format_or(&self, fallback: OutputFormat) -> OutputFormat {
        self.format.unwrap_or(fallback)
    }
}

fn apply<T>(slot: &mut T, value: Option<T>) {
    if let Some(v) = value {
        *slot = v;
    }
}

fn apply_file(cfg: &mut RunConfig, path: &Path) -> Result<(), Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| usage(format!("config file {}: {e}", path.display())))?;
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        let at = format!("config file {}:{}", path.display(), lineno + 1);
        let (key, value) = line
            .split_once('=')
            .ok_or_else(|| usage(format!("{at}: expected key=value, got `{line}`")))?;
        let (key, value) = (key.trim(), value.trim());
        match key {
            "precision" => cfg.precision_bits = parse_number(value, &at)?,
            "tolerance" => cfg.tolerance_digits = parse_number(value, &at)?,
            "max-terms" => cfg.max_terms = parse_number(value, &at)?,
            "max-window" => cfg.max_window = parse_number(value, &at)?,
            "seed" => cfg.seed = parse_number(value, &at)?,
            "jobs" => cfg.jobs = Some(parse_number(value, &at)?),
            "format" => {
                cfg.format = Some(OutputFormat::from_key(value).ok_or_else(|| {
                    usage(format!(
                        "{at}: format must be json, csv, or text, got `{value}`"
                    ))
                })?)
            }
            "out" => cfg.out = Some(PathBuf::from(value)),
            "e2-phase" => {
                cfg.e2_phase = PhaseChoice::from_key(value).ok_or_else(|| {
                    usage(format!("{at}: e2-phase must be r-1 or r, got `{value}`"))
                })?
            }
            other => return Err(usage(format!("{at}: unknown key `{other}`"))),
        }
    }
    Ok(())
}

fn parse_number<T: std::str::FromStr>(value: &str, at: &str) -> Result<T, Failure> {
    value
        .parse()
        .map_err(|_| usage(format!("{at}: `{value}` is not a valid number")))
}
