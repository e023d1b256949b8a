//! Command-line front end: argument parsing, code files and reports.
//!
//! Exit codes: 0 success or affirmative answer, 1 definite negative answer,
//! 2 unknown (budget exhausted, inconclusive search, unsupported structure),
//! 3 invalid input or usage, 4 failed internal verification.

use std::path::PathBuf;

use clap::{Parser, Subcommand, ValueEnum};
use rmc_core::aut::{self, Side};
use rmc_core::Error;

pub mod codefile;
pub mod commands;
pub mod report;

pub use report::Report;

pub const EXIT_OK: u8 = 0;
pub const EXIT_NEGATIVE: u8 = 1;
pub const EXIT_UNKNOWN: u8 = 2;
pub const EXIT_USAGE: u8 = 3;
pub const EXIT_INTERNAL: u8 = 4;

/// Environment variable overriding every enumeration budget.
pub const BUDGET_ENV: &str = "RMC_BUDGET";

#[derive(Parser, Debug)]
#[command(
    name = "rmc",
    version,
    about = "Gabidulin-like rank-metric codes: construction, recognition, automorphism groups and equivalence"
)]
pub struct Cli {
    /// Report format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    /// Worker threads for parallel searches.
    #[arg(long, global = true)]
    pub jobs: Option<usize>,
    /// Seed for every randomized step.
    #[arg(long, global = true, default_value_t = aut::DEFAULT_SEED)]
    pub seed: u64,
    /// Enumeration budget (codewords, or group pairs for the oracle); overrides RMC_BUDGET.
    #[arg(long, global = true)]
    pub search_budget: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum SideArg {
    Left,
    Right,
}

impl From<SideArg> for Side {
    fn from(s: SideArg) -> Side {
        match s {
            SideArg::Left => Side::Left,
            SideArg::Right => Side::Right,
        }
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build C(v, theta, d) and write its code file.
    Construct {
        /// Order of the base field k.
        #[arg(long)]
        q: u32,
        /// Degree of K over k.
        #[arg(long)]
        ell: u32,
        /// Code length over K.
        #[arg(long)]
        m: usize,
        /// Dimension over K.
        #[arg(long)]
        d: usize,
        /// Comma-separated entries (integers or b^k), or "random".
        #[arg(long, default_value = "random")]
        v: String,
        /// theta = Frobenius^theta_exp, coprime to ell.
        #[arg(long, default_value_t = 1)]
        theta_exp: u32,
        /// Output path; the file goes to stdout when omitted.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Dimension, minimum rank distance and MRD verdict.
    Analyze { path: PathBuf },
    /// Automorphism group via idealisers and normalizer cosets.
    Aut {
        path: PathBuf,
        /// Idealiser whose normalizer is searched (default: left when possible).
        #[arg(long, value_enum)]
        side: Option<SideArg>,
        /// Also run the exhaustive oracle and compare.
        #[arg(long)]
        oracle: bool,
    },
    /// Recognize a lifted MRD code as Gabidulin-like and recover v / v_1.
    Recognize {
        path: PathBuf,
        /// Galois generator exponent; defaults to the file's, else 1.
        #[arg(long)]
        theta_exp: Option<u32>,
    },
    /// Decide proper equivalence A = g^-1 B h.
    Equiv { a: PathBuf, b: PathBuf },
    /// Left or right idealiser with its structure and basis.
    Idealiser {
        path: PathBuf,
        #[arg(long, value_enum, default_value_t = SideArg::Left)]
        side: SideArg,
    },
    /// Exhaustive automorphism group by enumeration of GL_rows x GL_cols.
    OracleAut {
        path: PathBuf,
        /// List every pair.
        #[arg(long)]
        list: bool,
    },
}

pub enum Output {
    Report(Report),
    /// Verbatim text, e.g. a code file written to stdout.
    Raw(String),
}

pub struct Outcome {
    pub output: Output,
    pub code: u8,
}

impl Outcome {
    pub fn render(&self, format: Format) -> String {
        match (&self.output, format) {
            (Output::Raw(s), _) => s.clone(),
            (Output::Report(r), Format::Text) => r.to_text(),
            (Output::Report(r), Format::Json) => r.to_json(),
        }
    }
}

/// Codeword and oracle budgets after applying the flag and RMC_BUDGET.
#[derive(Clone, Copy, Debug)]
pub struct Budgets {
    pub words: u64,
    pub oracle: u64,
}

impl Budgets {
    pub fn resolve(flag: Option<u64>) -> anyhow::Result<Self> {
        let env = match std::env::var(BUDGET_ENV) {
            Ok(s) => Some(
                s.trim()
                    .parse::<u64>()
                    .map_err(|_| Error::Parse(format!("{BUDGET_ENV}={s:?} is not an integer")))?,
            ),
            Err(_) => None,
        };
        let over = flag.or(env);
        Ok(Budgets {
            words: over.unwrap_or(rmc_core::code::DEFAULT_WORD_BUDGET),
            oracle: over.unwrap_or(aut::ORACLE_BUDGET),
        })
    }
}

pub fn exit_code_for(err: &anyhow::Error) -> u8 {
    match err.downcast_ref::<Error>() {
        Some(Error::BudgetExceeded { .. }) | Some(Error::Unsupported(_)) => EXIT_UNKNOWN,
        Some(Error::NotMrd { .. }) | Some(Error::NotLifted) => EXIT_NEGATIVE,
        Some(Error::StructureViolation(_)) => EXIT_INTERNAL,
        _ => EXIT_USAGE,
    }
}

pub fn run(cli: &Cli) -> anyhow::Result<Outcome> {
    let budgets = Budgets::resolve(cli.search_budget)?;
    match &cli.command {
        Command::Construct {
            q,
            ell,
            m,
            d,
            v,
            theta_exp,
            out,
        } => commands::construct(*q, *ell, *m, *d, v, *theta_exp, out.as_deref(), cli.seed),
        Command::Analyze { path } => commands::analyze(path, budgets),
        Command::Aut { path, side, oracle } => {
            commands::aut(path, side.map(Side::from), *oracle, cli.seed, budgets)
        }
        Command::Recognize { path, theta_exp } => commands::recognize(path, *theta_exp, budgets),
        Command::Equiv { a, b } => commands::equiv(a, b, cli.seed, budgets),
        Command::Idealiser { path, side } => commands::idealiser(path, (*side).into()),
        Command::OracleAut { path, list } => commands::oracle_aut(path, *list, budgets),
    }
}
