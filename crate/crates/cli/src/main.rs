//! `cqa`: repairs and consistent query answers from the command line.

mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use cqa_core::compiler::{RepairMode, RicPolicy, StabilizerPolicy};

/// Exit statuses. Every error maps to exactly one of them.
pub mod exit {
    pub const SUCCESS: u8 = 0;
    pub const NO_ADMISSIBLE_REPAIR: u8 = 1;
    pub const INPUT_ERROR: u8 = 2;
    pub const RESOURCE_LIMIT: u8 = 3;
    pub const INCONSISTENT_PROGRAM: u8 = 4;
    pub const ORACLE_DISAGREEMENT: u8 = 5;
}

#[derive(Debug, Parser)]
#[command(
    name = "cqa",
    version,
    about = "Repair inconsistent databases and compute consistent query answers"
)]
pub struct Cli {
    #[command(flatten)]
    pub config: RunConfig,
    #[command(subcommand)]
    pub command: Command,
}

/// Settings shared by every subcommand.
#[derive(Debug, Clone, Args)]
pub struct RunConfig {
    /// Repair semantics.
    #[arg(long, global = true, value_enum, default_value_t = Mode::Winslett)]
    pub mode: Mode,
    /// Repair action for referential constraints.
    #[arg(long, global = true, value_enum, default_value_t = Ric::Null)]
    pub ric: Ric,
    /// Stabilizing rules for constraints with more than two literals.
    #[arg(long, global = true, value_enum, default_value_t = Stabilizer::Guarded)]
    pub stabilizer: Stabilizer,
    /// `active` or a `.dom` file declaring a finite domain.
    #[arg(long, global = true, default_value = "active")]
    pub domain: String,
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Seed for randomized checks.
    #[arg(long, global = true, default_value_t = 20_031_105)]
    pub seed: u64,
    /// Cap on solver branching decisions.
    #[arg(long, global = true, env = "CQA_MAX_BRANCHES", default_value_t = cqa_core::solver::DEFAULT_MAX_BRANCHES)]
    pub max_branches: u64,
    /// Cap on the number of ground literals.
    #[arg(long, global = true, env = "CQA_MAX_UNIVERSE", default_value_t = 100_000)]
    pub max_universe: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Winslett,
    Dalal,
    /// Persistence defaults under the exception-aware reduct.
    Defaults,
}

impl From<Mode> for RepairMode {
    fn from(m: Mode) -> Self {
        match m {
            Mode::Winslett => RepairMode::Winslett,
            Mode::Dalal => RepairMode::Dalal,
            Mode::Defaults => RepairMode::RawDefaults,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Ric {
    Null,
    Delete,
}

impl From<Ric> for RicPolicy {
    fn from(r: Ric) -> Self {
        match r {
            Ric::Null => RicPolicy::NullInsertion,
            Ric::Delete => RicPolicy::DeleteOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Stabilizer {
    Guarded,
    Naive,
    /// Single-literal stabilizers only.
    Singletons,
}

impl From<Stabilizer> for StabilizerPolicy {
    fn from(s: Stabilizer) -> Self {
        match s {
            Stabilizer::Guarded => StabilizerPolicy::Guarded,
            Stabilizer::Naive => StabilizerPolicy::Naive,
            Stabilizer::Singletons => StabilizerPolicy::SingletonsOnly,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

/// Instance and constraint files.
#[derive(Debug, Clone, Args)]
pub struct Problem {
    /// Constraint file (`.ic`).
    #[arg(long)]
    pub ics: Option<PathBuf>,
    /// Fact file (`.facts`).
    pub facts: Option<PathBuf>,
}

/// A query given inline or as a `.q` file.
#[derive(Debug, Clone, Args)]
pub struct QueryArg {
    /// Query text, e.g. `emp(X,Y)` or `K(p(a)) | K(q(a))`.
    #[arg(long = "q", conflicts_with = "query_file")]
    pub query: Option<String>,
    /// File holding the query.
    #[arg(long)]
    pub query_file: Option<PathBuf>,
}

/// Problem files, or a ready-made DLV program evaluated over the facts.
#[derive(Debug, Clone, Args)]
pub struct ProgramSource {
    #[command(flatten)]
    pub problem: Problem,
    /// DLV program (`.dlv`) used instead of compiling the constraints.
    #[arg(long, conflicts_with = "ics")]
    pub program: Option<PathBuf>,
    #[command(flatten)]
    pub query: QueryArg,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the repairs with inserted (+) and deleted (-) tuples.
    Repair {
        #[command(flatten)]
        problem: Problem,
    },
    /// Print the consistent answers to a query.
    Query {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        query: QueryArg,
        /// Answer from the well-founded model: a lower bound, exact when certified.
        #[arg(long)]
        well_founded: bool,
    },
    /// Print the literals true in every answer set.
    Core {
        #[command(flatten)]
        source: ProgramSource,
        /// Include the facts of the ground program.
        #[arg(long)]
        all: bool,
    },
    /// Print the true, false and undefined literals of the well-founded model.
    Wfs {
        #[command(flatten)]
        source: ProgramSource,
        /// Include the facts of the ground program.
        #[arg(long)]
        all: bool,
    },
    /// Print the ground program in DLV syntax.
    Ground {
        #[command(flatten)]
        source: ProgramSource,
    },
    /// Print the repair program (and query program) in DLV syntax.
    Compile {
        #[command(flatten)]
        problem: Problem,
        #[command(flatten)]
        query: QueryArg,
    },
    /// Compare repairs and answer sets with exhaustive enumeration on random inputs.
    OracleCheck {
        /// Random instances and random ground programs to check.
        #[arg(long, default_value_t = 200)]
        count: usize,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let (text, code) = commands::run(&cli.command, &cli.config);
    print!("{text}");
    ExitCode::from(code)
}
