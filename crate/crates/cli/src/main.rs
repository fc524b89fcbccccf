mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use sadim_core::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Command {
    Pressure,
    Alpha,
    DimAffinity,
    DimShrinking,
    DimRecurrence,
    CertifyCondition,
    CheckMatrices,
    BuildMeasure,
    Energy,
    Sample,
    Boxcount,
}

impl Command {
    pub fn name(self) -> String {
        self.to_possible_value().expect("no skipped variants").get_name().to_string()
    }
}

/// Dimension estimates for self-affine shrinking-target and recurrence sets.
#[derive(Debug, Parser)]
#[command(name = "sadim", version)]
pub struct Cli {
    #[arg(value_enum)]
    pub command: Command,
    /// JSON run configuration.
    #[arg(long)]
    pub config: PathBuf,
    /// Output directory (created if missing).
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Overrides the configuration seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads; defaults to the available parallelism.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Cap on the number of words per enumeration.
    #[arg(long)]
    pub budget: Option<u128>,
    /// Deepen solver brackets until the tolerance or the budget is reached.
    #[arg(long)]
    pub depth_escalate: bool,
}

#[derive(Debug)]
pub enum CliError {
    Core(Error),
    Io(String, std::io::Error),
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        CliError::Core(e)
    }
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Core(Error::Validation { .. } | Error::DimensionMismatch { .. } | Error::Index { .. } | Error::Degree { .. }) => 2,
            CliError::Core(Error::Budget { .. }) => 3,
            CliError::Core(Error::Hypothesis(_)) => 4,
            _ => 1,
        }
    }

    fn report(&self) -> serde_json::Value {
        match self {
            CliError::Core(e) => {
                let mut v = serde_json::json!({ "reason": e.reason(), "message": e.to_string() });
                if let Error::Validation { field, .. } = e {
                    v["field"] = serde_json::Value::String(field.clone());
                }
                v
            }
            CliError::Io(path, e) => serde_json::json!({ "reason": "io", "message": format!("{path}: {e}") }),
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(workers) = cli.workers {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(workers.max(1)).build_global() {
            eprintln!("warning: could not size the worker pool: {e}");
        }
    }
    match commands::run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("{}", serde_json::json!({ "error": e.report() }));
            ExitCode::from(e.exit_code())
        }
    }
}
