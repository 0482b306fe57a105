use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use thiserror::Error;

mod catalog;
mod invariant;
mod verify;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Parse(String),
    #[error(transparent)]
    Core(#[from] abtqft_core::Error),
}

pub fn read_file(path: &Path) -> Result<String, CliError> {
    std::fs::read_to_string(path).map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))
}

#[derive(Parser, Debug)]
#[command(
    name = "abtqft",
    version,
    about = "Abelian RT and U(1) Chern-Simons invariants from surgery presentations"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,
    /// Base tolerance, scaled by the square root of the number of summed terms.
    #[arg(long, global = true, default_value_t = 1e-9)]
    tol: f64,
    /// Catalog file to use instead of the built-in one.
    #[arg(long, global = true, value_name = "PATH")]
    catalog: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Side {
    Rt,
    Cs,
    Both,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Kirby,
    Reciprocity,
    Equivalence,
    Modular,
    Maslov,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Evaluate the closed invariants of a catalog entry or presentation file.
    Invariant {
        /// Catalog name, path to a presentation JSON file, or inline JSON.
        source: String,
        #[arg(long)]
        k: Option<u64>,
        #[arg(long, value_enum, default_value = "both")]
        side: Side,
    },
    /// Run a verification suite; exits 1 if any check fails.
    Verify {
        #[arg(value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 0)]
        seed: u64,
        /// Number of random cases (suite dependent default).
        #[arg(long)]
        cases: Option<usize>,
        /// Largest level for the modular suite.
        #[arg(long, default_value_t = 16)]
        kmax: u64,
        /// `default` or a JSON file with a list of {"L": …, "k": …} entries.
        #[arg(long, default_value = "default")]
        corpus: String,
    },
    /// Inspect the manifold catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Build or show the equivalence phase table.
    PhaseTable {
        #[command(subcommand)]
        action: PhaseTableAction,
    },
}

#[derive(Subcommand, Debug)]
enum CatalogAction {
    List,
    Show { name: String },
}

#[derive(Subcommand, Debug)]
enum PhaseTableAction {
    /// Recompute the table from a corpus.
    Build {
        #[arg(long, default_value = "default")]
        corpus: String,
        /// Also write the table to this file.
        #[arg(long, value_name = "PATH")]
        out: Option<PathBuf>,
    },
    /// Print the committed table, or one read from a file.
    Show {
        #[arg(long, value_name = "PATH")]
        file: Option<PathBuf>,
    },
}

/// Rendered output and whether every check in it passed.
pub struct Outcome {
    pub text: String,
    pub json: serde_json::Value,
    pub passed: bool,
}

fn to_json<T: serde::Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("report serializes")
}

fn run(cli: &Cli) -> Result<Outcome, CliError> {
    if !(cli.tol > 0.0) {
        return Err(CliError::Usage("--tol must be positive".into()));
    }
    match &cli.command {
        Command::Invariant { source, k, side } => {
            let catalog = catalog::Catalog::load(cli.catalog.as_deref())?;
            invariant::run(&catalog, source, *k, *side, cli.tol)
        }
        Command::Verify {
            suite,
            seed,
            cases,
            kmax,
            corpus,
        } => verify::run(*suite, *seed, *cases, *kmax, corpus, cli.tol),
        Command::Catalog { action } => {
            let catalog = catalog::Catalog::load(cli.catalog.as_deref())?;
            match action {
                CatalogAction::List => {
                    let names: Vec<serde_json::Value> = catalog
                        .entries
                        .iter()
                        .map(|e| serde_json::json!({"name": e.name, "description": e.description}))
                        .collect();
                    let text = catalog
                        .entries
                        .iter()
                        .map(|e| format!("{:<14} {}", e.name, e.description))
                        .collect::<Vec<_>>()
                        .join("\n");
                    Ok(Outcome {
                        text,
                        json: serde_json::Value::Array(names),
                        passed: true,
                    })
                }
                CatalogAction::Show { name } => {
                    let entry = catalog.get(name).ok_or_else(|| {
                        CliError::Usage(format!("no catalog entry named {name:?}"))
                    })?;
                    let json = to_json(entry);
                    Ok(Outcome {
                        text: serde_json::to_string_pretty(&json).expect("json"),
                        json,
                        passed: true,
                    })
                }
            }
        }
        Command::PhaseTable { action } => match action {
            PhaseTableAction::Build { corpus, out } => {
                let entries = verify::load_corpus(corpus)?;
                let table = abtqft_core::compare::build_phase_table(&entries)?;
                let json = to_json(&table);
                let text = serde_json::to_string_pretty(&json).expect("json");
                if let Some(path) = out {
                    std::fs::write(path, format!("{text}\n"))
                        .map_err(|e| CliError::Usage(format!("{}: {e}", path.display())))?;
                }
                Ok(Outcome {
                    text,
                    json,
                    passed: true,
                })
            }
            PhaseTableAction::Show { file } => {
                let raw = match file {
                    Some(p) => read_file(p)?,
                    None => abtqft_core::compare::FROZEN_PHASE_TABLE.to_string(),
                };
                let table: abtqft_core::compare::PhaseTableFile = serde_json::from_str(&raw)
                    .map_err(|e| CliError::Parse(format!("phase table: {e}")))?;
                table.entries()?;
                let json = to_json(&table);
                Ok(Outcome {
                    text: serde_json::to_string_pretty(&json).expect("json"),
                    json,
                    passed: true,
                })
            }
        },
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(outcome) => {
            if cli.json {
                println!(
                    "{}",
                    serde_json::to_string_pretty(&outcome.json).expect("json")
                );
            } else {
                println!("{}", outcome.text);
            }
            if outcome.passed {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
