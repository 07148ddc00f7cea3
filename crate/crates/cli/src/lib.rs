//! The `sds` command line, exposed as a library so tests can drive it without
//! spawning processes. [`run`] parses an argument list, executes one
//! subcommand and returns the exit code with captured output.

use std::ffi::OsString;
use std::fs::OpenOptions;
use std::io::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

mod commands;
pub mod table;

/// Exit status and captured streams of one invocation.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Outcome {
    pub code: i32,
    pub stdout: String,
    pub stderr: String,
}

#[derive(Debug)]
pub(crate) enum CliError {
    /// Bad flags or flag combinations; exit 2.
    Usage(String),
    /// A computation failed; exit 1.
    Domain(String),
    /// Two engines disagreed; the payload is a unified diff. Exit 1.
    Mismatch(String),
}

pub(crate) fn usage(msg: impl Into<String>) -> CliError {
    CliError::Usage(msg.into())
}

pub(crate) fn domain(err: impl std::fmt::Display) -> CliError {
    CliError::Domain(err.to_string())
}

/// What a command produced: the main payload, plus an optional note for
/// stderr.
#[derive(Debug, Default)]
pub(crate) struct Produced {
    pub text: String,
    pub note: Option<String>,
    /// JSON-lines output appends to `--out` instead of replacing it.
    pub append: bool,
}

impl Produced {
    pub fn text(text: String) -> Self {
        Produced {
            text,
            ..Produced::default()
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "sds", version, about = "Periodic points of parity-type asynchronous cellular automata")]
pub struct Cli {
    /// Write the result to this file instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads for parallel sweeps (default: all cores).
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

/// A system on `C_n`: rule letters, update order and state modulus.
#[derive(Debug, Clone, Args)]
pub struct SpecArgs {
    #[arg(long)]
    pub n: usize,
    /// One letter per vertex, `P` for parity and `Q` for 1+parity. A single
    /// letter is repeated `n` times. Default: all `P`.
    #[arg(long)]
    pub rules: Option<String>,
    /// `id`, a digit word such as `2143`, or a comma list of 1-based labels.
    #[arg(long, default_value = "id")]
    pub order: String,
    /// States are taken mod `m`.
    #[arg(long, default_value_t = 2)]
    pub m: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Engine {
    Closed,
    Brute,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FixedPointChoice {
    Yes,
    No,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TableFormat {
    Text,
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PhaseFormat {
    Text,
    Csv,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ConjectureChoice {
    #[value(name = "1")]
    One,
    #[value(name = "2")]
    Two,
    #[value(name = "3")]
    Three,
    All,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Apply the SDS map to a state.
    Simulate {
        #[command(flatten)]
        spec: SpecArgs,
        /// Digits with vertex 1 leftmost, e.g. `1011`.
        #[arg(long)]
        state: String,
        #[arg(long, default_value_t = 1)]
        steps: u64,
        /// Print every intermediate state.
        #[arg(long)]
        trace: bool,
    },
    /// Enumerate the phase space and report its periodic points.
    PhaseSpace {
        #[command(flatten)]
        spec: SpecArgs,
        #[arg(long, value_enum, default_value = "text")]
        format: PhaseFormat,
    },
    /// Period counts `|Per_r|` for a range of cycle sizes.
    PeriodTable {
        #[arg(long, default_value_t = 3)]
        n_min: u64,
        #[arg(long, default_value_t = 11)]
        n_max: u64,
        #[arg(long, default_value_t = 20)]
        r_max: u64,
        #[arg(long, value_enum, default_value = "both")]
        fixed_point: FixedPointChoice,
        #[arg(long, value_enum, default_value = "closed")]
        engine: Engine,
        #[arg(long, value_enum, default_value = "text")]
        format: TableFormat,
        /// Also enumerate this many random rule vectors per `n` and check
        /// each against its class row (brute and both engines).
        #[arg(long, default_value_t = 0)]
        sample_rules: usize,
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Invariant factors, characteristic and minimal polynomial of the
    /// linear part.
    InvariantFactors {
        #[command(flatten)]
        spec: SpecArgs,
        /// Also report the factors of the (n+1)-dimensional lift.
        #[arg(long)]
        lift: bool,
    },
    /// Decide whether the SDS map has a fixed point.
    FixedPoint {
        #[command(flatten)]
        spec: SpecArgs,
    },
    /// Group all update orders by period table.
    SurveyOrders {
        #[command(flatten)]
        spec: SpecArgs,
        /// Upper bound on orders times states.
        #[arg(long)]
        budget: Option<u128>,
    },
    /// Enumeration checks over `Z/mZ`, written as JSON lines.
    CheckConjectures {
        #[arg(long, value_enum, default_value = "all")]
        conj: ConjectureChoice,
        #[arg(long, value_delimiter = ',', default_value = "2,3,4")]
        m: Vec<u32>,
        #[arg(long, default_value_t = 3)]
        n_min: usize,
        #[arg(long, default_value_t = 5)]
        n_max: usize,
        #[arg(long, default_value_t = 8)]
        r_max: u64,
        /// Largest `m^n` to enumerate.
        #[arg(long)]
        cap: Option<u64>,
    },
    /// Graphviz rendering of the phase space.
    ExportDot {
        #[command(flatten)]
        spec: SpecArgs,
    },
}

/// Parses `args` (program name first) and runs the command.
pub fn run<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            return if code == 0 {
                Outcome {
                    code,
                    stdout: text,
                    stderr: String::new(),
                }
            } else {
                Outcome {
                    code,
                    stdout: String::new(),
                    stderr: text,
                }
            };
        }
    };
    execute(cli)
}

fn execute(cli: Cli) -> Outcome {
    let result = match cli.jobs {
        Some(0) => Err(usage("--jobs must be at least 1")),
        Some(j) => match rayon::ThreadPoolBuilder::new().num_threads(j).build() {
            Ok(pool) => pool.install(|| commands::dispatch(&cli.command)),
            Err(e) => Err(domain(e)),
        },
        None => commands::dispatch(&cli.command),
    };
    match result {
        Ok(produced) => deliver(produced, cli.out.as_ref()),
        Err(CliError::Usage(msg)) => Outcome {
            code: 2,
            stdout: String::new(),
            stderr: format!("error: {msg}\n\nFor more information, try '--help'.\n"),
        },
        Err(CliError::Domain(msg)) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: {msg}\n"),
        },
        Err(CliError::Mismatch(diff)) => Outcome {
            code: 1,
            stdout: diff,
            stderr: "error: engines disagree\n".into(),
        },
    }
}

fn deliver(produced: Produced, out: Option<&PathBuf>) -> Outcome {
    let stderr = produced.note.map(|n| n + "\n").unwrap_or_default();
    let Some(path) = out else {
        return Outcome {
            code: 0,
            stdout: produced.text,
            stderr,
        };
    };
    let file = OpenOptions::new()
        .create(true)
        .write(true)
        .append(produced.append)
        .truncate(!produced.append)
        .open(path);
    match file.and_then(|mut f| f.write_all(produced.text.as_bytes())) {
        Ok(()) => Outcome {
            code: 0,
            stdout: String::new(),
            stderr,
        },
        Err(e) => Outcome {
            code: 1,
            stdout: String::new(),
            stderr: format!("error: cannot write {}: {e}\n", path.display()),
        },
    }
}
