//! `concordance`: signatures, branched covers, θ-invariants and genus bounds
//! from the command line.

mod commands;
mod report;
mod reproduce;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use concordance_core::{load_ledger, Ledger, Prime};

#[derive(Parser)]
#[command(name = "concordance", version, about = "Knot concordance invariants from signatures, branched covers and δ-sequences")]
struct Cli {
    /// Ledger of knot facts (JSON). Defaults to the bundled seed ledger.
    #[arg(long, global = true)]
    ledger: Option<PathBuf>,

    /// Prime order of the branched cover.
    #[arg(long, global = true, default_value = "2", value_parser = parse_prime)]
    q: Prime,

    /// Emit JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Levine–Tristram signatures at the q-th roots of unity.
    Sig(SigArgs),
    /// Betti numbers and signature of a cyclic branched cover of a 4-manifold.
    BranchCover(commands::CoverArgs),
    /// θ^(q) of a knot expression.
    Theta(ExprArgs),
    /// θ^(q)(K, m).
    ThetaM(ThetaMArgs),
    /// Genus lower bound in a negative definite 4-manifold.
    GenusBound(GenusArgs),
    /// Bounds on θ^(q) for an expression and its mirror, with full traces.
    Infer(ExprArgs),
    /// Run the bundled regression checks.
    Reproduce(ReproduceArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
pub struct SigArgs {
    /// Ledger atom whose Seifert matrix to use.
    #[arg(long, allow_hyphen_values = true)]
    knot: Option<String>,
    /// Seifert matrix as JSON rows, e.g. "[[-1,1],[0,-1]]".
    #[arg(long)]
    matrix: Option<String>,
}

#[derive(Args)]
pub struct ExprArgs {
    /// Knot expression, e.g. "-(9_42) + Wh(T(2,3))".
    #[arg(long, allow_hyphen_values = true)]
    expr: String,
}

#[derive(Args)]
pub struct ThetaMArgs {
    #[arg(long, allow_hyphen_values = true)]
    expr: String,
    #[arg(long)]
    m: u64,
}

#[derive(Args)]
pub struct GenusArgs {
    #[arg(long, allow_hyphen_values = true)]
    expr: String,
    /// Rank of the intersection form diag(−1, …, −1).
    #[arg(long)]
    rank: usize,
    /// Coordinates of the class a, comma separated.
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    class: Vec<i64>,
    /// Also print the four-way comparison for T(3, 6n+1) with a = 2x.
    #[arg(long)]
    compare: bool,
}

#[derive(Args)]
pub struct ReproduceArgs {
    /// Restrict to one group of checks.
    #[arg(long, value_enum)]
    section: Option<Section>,
    /// List checks without running them.
    #[arg(long)]
    list: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Section {
    /// Signatures, θ values and inference chains of the example knots.
    #[value(alias = "5")]
    Examples,
    /// Genus bounds in definite 4-manifolds.
    #[value(alias = "6")]
    Definite,
}

fn parse_prime(s: &str) -> Result<Prime, String> {
    let n: u32 = s.parse().map_err(|_| format!("`{s}` is not a non-negative integer"))?;
    Prime::new(n).map_err(|e| e.to_string())
}

/// Failure modes, each with its own exit status.
#[derive(Debug)]
pub enum CliError {
    Usage(String),
    Data(concordance_core::Error),
    Reproduction(usize),
}

impl From<concordance_core::Error> for CliError {
    fn from(e: concordance_core::Error) -> Self {
        use concordance_core::Error as E;
        match e {
            E::Syntax { .. } | E::InvalidSeifert(_) | E::NotPrime(_) | E::RootIndex { .. } => {
                CliError::Usage(e.to_string())
            }
            other => CliError::Data(other),
        }
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            Self::Usage(_) => 1,
            Self::Data(_) => 2,
            Self::Reproduction(_) => 3,
        }
    }
}

fn run(cli: Cli) -> Result<String, CliError> {
    let ledger = match &cli.ledger {
        Some(p) => load_ledger(p).map_err(CliError::Data)?,
        None => Ledger::seed(),
    };
    let q = cli.q;
    let report = match cli.command {
        Command::Sig(a) => commands::sig(&ledger, q, a.knot.as_deref(), a.matrix.as_deref())?,
        Command::BranchCover(a) => commands::branch_cover(q, &a)?,
        Command::Theta(a) => commands::theta(&ledger, q, &a.expr)?,
        Command::ThetaM(a) => commands::theta_m(&ledger, q, &a.expr, a.m)?,
        Command::GenusBound(a) => commands::genus_bound(&ledger, q, &a.expr, a.rank, &a.class, a.compare)?,
        Command::Infer(a) => commands::infer(&ledger, q, &a.expr)?,
        Command::Reproduce(a) => {
            if a.list {
                return Ok(reproduce::list(a.section, cli.json));
            }
            let (text, failed) = reproduce::run(&ledger, a.section, cli.json);
            if failed > 0 {
                print!("{text}");
                return Err(CliError::Reproduction(failed));
            }
            return Ok(text);
        }
    };
    Ok(if cli.json {
        report.to_json() + "\n"
    } else {
        report.to_string()
    })
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 1 } else { 0 });
        }
    };
    match run(cli) {
        Ok(out) => {
            print!("{out}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            match &e {
                CliError::Usage(m) => eprintln!("error: {m}"),
                CliError::Data(err) => eprintln!("error: {err}"),
                CliError::Reproduction(n) => eprintln!("{n} check(s) failed"),
            }
            ExitCode::from(e.exit_code())
        }
    }
}
