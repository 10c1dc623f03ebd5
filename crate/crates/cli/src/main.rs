use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use gcflag::catalog::{builtin_rows, parse_rows, RootSet};
use gcflag::reports::{self, ReportError};
use gcflag::{Family, LieType};
use serde::Serialize;
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "gcflag",
    version,
    about = "Isotropy decompositions and invariant generalized complex structures on flag manifolds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Output format.
    #[arg(long, value_enum, default_value_t = Format::Md, global = true)]
    format: Format,
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Json,
    Md,
}

#[derive(Subcommand)]
enum Command {
    /// List the positive roots of a simple type.
    Roots(TypeArgs),
    /// Decompose the isotropy representation of a flag.
    Decompose(FlagArgs),
    /// Tabulate the integrable type patterns of a flag.
    Classify(FlagArgs),
    /// Check constancy on summands and, with --oracle, the triple rule against the Nijenhuis operator.
    Verify {
        #[command(flatten)]
        flag: FlagArgs,
        /// Compare with the Nijenhuis operator (rank <= 4).
        #[arg(long)]
        oracle: bool,
    },
    /// Check summand counts of the built-in or given table rows.
    Catalog {
        /// JSON rows file; the built-in transcription is used if omitted.
        #[arg(long)]
        rows: Option<PathBuf>,
    },
}

#[derive(Args)]
struct TypeArgs {
    /// Lie family (A..G), or a full name such as B3.
    #[arg(long = "type", value_name = "TYPE")]
    lie_type: String,
    /// Rank; may be omitted when --type carries it.
    #[arg(long)]
    rank: Option<usize>,
}

#[derive(Args)]
struct FlagArgs {
    #[command(flatten)]
    ty: TypeArgs,
    /// Σ\Θ as 1-based indices (e.g. 1,2), or long/short for G2.
    #[arg(long, value_name = "ROOTS", conflicts_with = "theta", allow_hyphen_values = true)]
    sigma_minus_theta: Option<String>,
    /// Θ as 1-based indices; Θ is empty if neither option is given.
    #[arg(long, value_name = "ROOTS")]
    theta: Option<String>,
}

/// Distinguishes bad input (exit 2) from failed computations.
#[derive(Debug)]
struct Usage(anyhow::Error);

impl std::fmt::Display for Usage {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{:#}", self.0)
    }
}

impl std::error::Error for Usage {}

fn usage(e: impl Into<anyhow::Error>) -> anyhow::Error {
    anyhow::Error::new(Usage(e.into()))
}

fn report_err(e: ReportError) -> anyhow::Error {
    if e.is_usage() {
        usage(e)
    } else {
        e.into()
    }
}

impl TypeArgs {
    fn resolve(&self) -> Result<LieType> {
        match self.rank {
            Some(rank) => {
                let family: Family = self.lie_type.parse().map_err(usage)?;
                LieType::new(family, rank).map_err(usage)
            }
            None => self.lie_type.parse().map_err(usage),
        }
    }
}

impl FlagArgs {
    fn resolve(&self) -> Result<(LieType, Vec<usize>)> {
        let lie_type = self.ty.resolve()?;
        let parse = |s: &Option<String>| -> Result<Option<RootSet>> {
            s.as_deref().map(RootSet::parse).transpose().map_err(usage)
        };
        let smt = parse(&self.sigma_minus_theta)?;
        let theta = parse(&self.theta)?;
        let theta = reports::resolve_theta(lie_type, smt.as_ref(), theta.as_ref()).map_err(report_err)?;
        Ok((lie_type, theta))
    }
}

fn emit<T: Serialize>(format: Format, report: &T, markdown: impl FnOnce(&T) -> String) -> Result<()> {
    match format {
        Format::Json => println!("{}", serde_json::to_string_pretty(report)?),
        Format::Md => print!("{}", markdown(report)),
    }
    Ok(())
}

/// Runs the command; `Ok(false)` signals a verification failure.
fn run(cli: Cli) -> Result<bool> {
    let format = cli.format;
    match cli.command {
        Command::Roots(ty) => {
            let r = reports::roots_report(ty.resolve()?);
            emit(format, &r, reports::RootsReport::to_markdown)?;
            Ok(true)
        }
        Command::Decompose(flag) => {
            let (t, theta) = flag.resolve()?;
            let r = reports::decompose_report(t, &theta).map_err(report_err)?;
            emit(format, &r, reports::DecomposeReport::to_markdown)?;
            Ok(true)
        }
        Command::Classify(flag) => {
            let (t, theta) = flag.resolve()?;
            let r = reports::classify_report(t, &theta).map_err(report_err)?;
            emit(format, &r, reports::ClassifyReport::to_markdown)?;
            Ok(true)
        }
        Command::Verify { flag, oracle } => {
            let (t, theta) = flag.resolve()?;
            let r = reports::verify_report(t, &theta, oracle).map_err(report_err)?;
            emit(format, &r, reports::VerifyReport::to_markdown)?;
            Ok(r.ok)
        }
        Command::Catalog { rows } => {
            let rows = match rows {
                Some(path) => {
                    let text = std::fs::read_to_string(&path)
                        .with_context(|| format!("reading {}", path.display()))
                        .map_err(usage)?;
                    parse_rows(&text).map_err(usage)?
                }
                None => builtin_rows(),
            };
            let r = reports::catalog_report(&rows).map_err(report_err)?;
            emit(format, &r, reports::CatalogReport::to_markdown)?;
            Ok(r.ok())
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            if e.downcast_ref::<Usage>().is_some() {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
