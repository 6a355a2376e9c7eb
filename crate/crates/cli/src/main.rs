//! `phidual`: command-line front end for the duality toolkit.

mod commands;
mod config;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use phidual_core::Error;

use crate::config::RunConfig;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Numerical(String),
    #[error("{0}")]
    Io(String),
}

impl CliError {
    /// Core error attributed to a config field.
    pub fn field(field: &str, e: Error) -> Self {
        match Self::from(e) {
            CliError::Validation(m) => CliError::Validation(format!("config field `{field}`: {m}")),
            other => other,
        }
    }

    fn exit_code(&self) -> u8 {
        match self {
            CliError::Validation(_) => 1,
            CliError::Numerical(_) => 2,
            CliError::Io(_) => 1,
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        let msg = e.to_string();
        match e {
            Error::Improper(_) | Error::NonFiniteBase | Error::Discretization(_) | Error::UndefinedSum | Error::EmptyGrid => CliError::Numerical(msg),
            _ => CliError::Validation(msg),
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "phidual", version, about = "Conjugation, Lagrangian duality and minimax checks on grids")]
struct Cli {
    /// JSON run configuration.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Catalog entry; overrides the config.
    #[arg(long, global = true)]
    problem: Option<String>,
    /// Dual class name (`affine` or `quad`).
    #[arg(long, global = true)]
    dual_class: Option<String>,
    /// Write the JSON result here instead of stdout.
    #[arg(long, global = true)]
    output: Option<PathBuf>,
    /// Write the command's table as CSV.
    #[arg(long, global = true)]
    csv: Option<PathBuf>,
    /// Worker threads; `PHIDUAL_THREADS` takes precedence.
    #[arg(long, global = true)]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Conjugate values at every sampled elementary function.
    Conjugate,
    /// Biconjugate and the pointwise gap `f - f**`.
    Biconj,
    /// Sampled subdifferential at `--point`.
    Subdiff {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        point: Option<Vec<f64>>,
        #[arg(long)]
        epsilon: Option<f64>,
    },
    /// Intersection property for an explicit pair, or a witness search on a
    /// duality problem.
    Intersect {
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        alpha: Option<Vec<f64>>,
    },
    /// Lagrangian table and dual function.
    Lagrangian,
    /// Primal, dual and gap with consistency flags.
    Gap,
    /// Subdifferential of the value function at the anchor and the dual argmax.
    Strong,
    /// Catalog entries with notes and expected values.
    Catalog,
    /// Run the acceptance criteria.
    VerifyAll {
        #[arg(long, value_delimiter = ',')]
        criteria: Option<Vec<u8>>,
    },
}

fn merged_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut cfg = match &cli.config {
        Some(path) => RunConfig::from_file(path)?,
        None => RunConfig::default(),
    };
    if let Some(p) = &cli.problem {
        cfg.problem = Some(p.clone());
        cfg.inline = None;
    }
    if let Some(d) = &cli.dual_class {
        cfg.dual_class = Some(d.clone());
    }
    if cli.output.is_some() {
        cfg.output = cli.output.clone();
    }
    if cli.csv.is_some() {
        cfg.csv = cli.csv.clone();
    }
    if cli.threads.is_some() {
        cfg.threads = cli.threads;
    }
    match &cli.command {
        Command::Subdiff { point, epsilon } => {
            if point.is_some() {
                cfg.point = point.clone();
            }
            if epsilon.is_some() {
                cfg.epsilon = *epsilon;
            }
        }
        Command::Intersect { alpha } if alpha.is_some() => cfg.alphas = alpha.clone(),
        Command::VerifyAll { criteria } if criteria.is_some() => cfg.criteria = criteria.clone(),
        _ => {}
    }
    Ok(cfg)
}

fn configure_threads(cfg: &RunConfig) -> Result<(), CliError> {
    let threads = match std::env::var("PHIDUAL_THREADS") {
        Ok(s) => Some(
            s.trim()
                .parse::<usize>()
                .map_err(|_| CliError::Validation(format!("PHIDUAL_THREADS = `{s}` is not a thread count")))?,
        ),
        Err(_) => cfg.threads,
    };
    if let Some(n) = threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Validation(format!("thread pool: {e}")))?;
    }
    Ok(())
}

fn write_text(path: &PathBuf, text: &str) -> Result<(), CliError> {
    std::fs::write(path, text).map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))
}

fn run(cli: Cli) -> Result<u8, CliError> {
    let cfg = merged_config(&cli)?;
    configure_threads(&cfg)?;
    let mut code = 0;
    let out = match cli.command {
        Command::Conjugate => commands::conjugate(&cfg)?,
        Command::Biconj => commands::biconj(&cfg)?,
        Command::Subdiff { .. } => commands::subdiff(&cfg)?,
        Command::Intersect { .. } => commands::intersect(&cfg)?,
        Command::Lagrangian => commands::lagrangian(&cfg)?,
        Command::Gap => commands::gap(&cfg)?,
        Command::Strong => commands::strong(&cfg)?,
        Command::Catalog => commands::list_catalog()?,
        Command::VerifyAll { .. } => {
            let (out, results) = commands::verify_all(&cfg)?;
            for r in &results {
                eprintln!("{r}");
            }
            if results.iter().any(|r| !r.passed) {
                code = 3;
            }
            out
        }
    };
    let text = serde_json::to_string_pretty(&out.json).expect("json values serialize") + "\n";
    match &cfg.output {
        Some(path) => write_text(path, &text)?,
        None => print!("{text}"),
    }
    if let (Some(path), Some(csv)) = (&cfg.csv, &out.csv) {
        write_text(path, csv)?;
    }
    Ok(code)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
