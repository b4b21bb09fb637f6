//! Command-line front end.

mod scenario_file;

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Parser, Subcommand};

use crate::analysis::{render_table, run_verification_grid, GridBounds};
use crate::error::QpmaError;
use crate::protocol::{run_qpma, run_summation, PartySets, Scenario, SummationConfig};

pub use scenario_file::{parse_scenario_str, parse_summation_str};

/// Golden scenario replayed by `qpma example`.
pub const EXAMPLE_SCENARIO: &str = include_str!("../../scenarios/example.scenario");
pub const SUMMATION_SCENARIO: &str = include_str!("../../scenarios/summation.scenario");

pub const EXIT_OK: i32 = 0;
pub const EXIT_PARSE: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;
pub const EXIT_VERIFICATION: i32 = 4;

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{path}: {message}")]
    Io { path: String, message: String },
    #[error("invariant `{invariant}` violated: {detail}")]
    Validation { invariant: String, detail: String },
    #[error("verification failed: {failed} case(s)")]
    Verification { failed: usize },
}

impl CliError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        CliError::Parse {
            line,
            message: message.into(),
        }
    }

    pub(crate) fn validation(invariant: &str, detail: impl Into<String>) -> Self {
        CliError::Validation {
            invariant: invariant.to_string(),
            detail: detail.into(),
        }
    }

    fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            message: err.to_string(),
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Parse { .. } | CliError::Io { .. } => EXIT_PARSE,
            CliError::Validation { .. } => EXIT_VALIDATION,
            CliError::Verification { .. } => EXIT_VERIFICATION,
        }
    }
}

/// Name of the invariant a library error breaches.
pub fn invariant_name(err: &QpmaError) -> &'static str {
    match err {
        QpmaError::InvalidScenario { invariant, .. } => invariant,
        QpmaError::NotPrime(_) => "prime_is_prime",
        QpmaError::PrimeBelowParties { .. } => "prime_at_least_parties",
        QpmaError::DuplicateLabel(_) => "distinct_labels",
        QpmaError::UnknownLabel(_) => "sets_within_universe",
        QpmaError::InputOutOfField { .. } => "inputs_in_field",
        QpmaError::MissingAnswer(_) => "every_party_answers",
        QpmaError::SiteOutOfRange { .. } => "site_in_range",
        QpmaError::DimensionGuard { .. } => "dense_dimension_limit",
        QpmaError::EnumerationGuard { .. } => "enumeration_limit",
        QpmaError::DimensionMismatch { .. } => "dimensions_match",
        QpmaError::NotNormalized(_) => "state_normalized",
        QpmaError::InvalidProbabilities(_) => "probabilities_sum_to_one",
        QpmaError::EmptyKeepSet => "keep_set_nonempty",
    }
}

impl From<QpmaError> for CliError {
    fn from(err: QpmaError) -> Self {
        CliError::validation(invariant_name(&err), err.to_string())
    }
}

#[derive(Debug, Parser)]
#[command(name = "qpma", version, about = "Quantum private membership aggregation simulator")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the aggregation protocol on a scenario file.
    Run {
        #[arg(long)]
        scenario: PathBuf,
        /// Overrides the seed in the file.
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
        #[arg(long, value_name = "BOOL")]
        leader_encodes: Option<bool>,
        /// Replace explicit sets with sets drawn at membership probability q.
        #[arg(long, value_name = "FLOAT")]
        q: Option<f64>,
    },
    /// Run the secure summation primitive on a summation file.
    Sum {
        #[arg(long)]
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the verification grid and print one row per check.
    Verify {
        #[arg(long, default_value_t = 3)]
        max_n: usize,
        #[arg(long, default_value_t = 2)]
        max_k: usize,
        #[arg(long, default_value_t = 5)]
        max_p: u64,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Replay the bundled three-party, four-element scenario.
    Example {
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn read(path: &Path) -> Result<String, CliError> {
    fs::read_to_string(path).map_err(|e| CliError::io(path, e))
}

/// Parse and validate a scenario file.
pub fn parse_scenario(path: &Path) -> Result<Scenario, CliError> {
    let scenario = parse_scenario_str(&read(path)?)?;
    scenario.validate()?;
    Ok(scenario)
}

pub fn parse_summation(path: &Path) -> Result<SummationConfig, CliError> {
    parse_summation_str(&read(path)?)
}

pub fn cmd_run(
    mut scenario: Scenario,
    seed: Option<u64>,
    leader_encodes: Option<bool>,
    q: Option<f64>,
) -> Result<String, CliError> {
    if let Some(seed) = seed {
        scenario.master_seed = seed;
    }
    if let Some(flag) = leader_encodes {
        scenario.leader_encodes = flag;
    }
    if let Some(q) = q {
        scenario.party_sets = PartySets::Bernoulli { q };
    }
    Ok(run_qpma(&scenario)?.to_text())
}

pub fn cmd_sum(mut config: SummationConfig, seed: Option<u64>) -> Result<String, CliError> {
    if let Some(seed) = seed {
        config.master_seed = seed;
    }
    Ok(run_summation(&config)?.to_text())
}

/// Returns the rendered table and the number of failed rows.
pub fn cmd_verify(bounds: &GridBounds) -> Result<(String, usize), CliError> {
    let rows = run_verification_grid(bounds)?;
    let failed = rows.iter().filter(|r| !r.pass).count();
    Ok((render_table(&rows), failed))
}

pub fn cmd_example(seed: Option<u64>) -> Result<String, CliError> {
    let scenario = parse_scenario_str(EXAMPLE_SCENARIO)?;
    scenario.validate()?;
    cmd_run(scenario, seed, None, None)
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(path) => fs::write(path, text).map_err(|e| CliError::io(path, e)),
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::io(Path::new("<stdout>"), e))
        }
    }
}

pub fn execute(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Run {
            scenario,
            seed,
            out,
            leader_encodes,
            q,
        } => {
            let text = cmd_run(parse_scenario(&scenario)?, seed, leader_encodes, q)?;
            emit(&text, out.as_deref())
        }
        Command::Sum {
            scenario,
            seed,
            out,
        } => {
            let text = cmd_sum(parse_summation(&scenario)?, seed)?;
            emit(&text, out.as_deref())
        }
        Command::Verify {
            max_n,
            max_k,
            max_p,
            trials,
            seed,
            out,
        } => {
            let bounds = GridBounds {
                max_parties: max_n,
                max_elements: max_k,
                max_prime: max_p,
                trials,
                seed,
            };
            let (table, failed) = cmd_verify(&bounds)?;
            emit(&table, out.as_deref())?;
            if failed > 0 {
                return Err(CliError::Verification { failed });
            }
            Ok(())
        }
        Command::Example { seed, out } => emit(&cmd_example(seed)?, out.as_deref()),
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_PARSE } else { EXIT_OK };
        }
    };
    match execute(cli) {
        Ok(()) => EXIT_OK,
        Err(err) => {
            eprintln!("error: {err}");
            err.exit_code()
        }
    }
}
