//! `pleo`: rewriting runs, deduction runs, verification and diagram export.

mod commands;
mod files;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use crate::files::CliError;

#[derive(Parser, Debug)]
#[command(name = "pleo", version, about = "DPO/SqPO graph rewriting and pleopushout deduction")]
pub struct Cli {
    /// Rounds of the derivability search used for pleomorphism checks.
    #[arg(long, global = true, env = "PLEO_DEPTH", default_value_t = 3)]
    pub depth: usize,
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Emit::Text)]
    pub emit: Emit,
    /// Write the main output here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Emit {
    Text,
    Json,
    Dot,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RewriteModeArg {
    Dpo,
    Sqpo,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum StepModeArg {
    Classic,
    Pleo,
    PleoMinimal,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Apply a rule at every match in a host graph.
    Rewrite {
        #[arg(long, value_enum, default_value_t = RewriteModeArg::Dpo)]
        mode: RewriteModeArg,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        /// Rule to apply (defaults to the first one in the file).
        #[arg(long)]
        rule: Option<String>,
        /// Also write the JSON trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Run a deduction script from a specification.
    Deduce {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        script: PathBuf,
        /// Override every step's mode.
        #[arg(long, value_enum)]
        mode: Option<StepModeArg>,
        /// Accept rule denominators whose pleomorphism check is inconclusive.
        #[arg(long)]
        assume_pleo: bool,
        /// Also write the JSON trace here.
        #[arg(long)]
        trace: Option<PathBuf>,
    },
    /// Check pushouts, pleomorphisms and deduction cubes.
    Verify {
        #[command(subcommand)]
        check: Check,
    },
    /// Export diagrams as DOT (or cube dumps as JSON).
    Export {
        #[command(subcommand)]
        what: ExportWhat,
    },
}

#[derive(Subcommand, Debug)]
pub enum Check {
    /// Is a specification morphism a pleomorphism?
    Pleo {
        /// File with `DOMAIN:`, `CODOMAIN:` and optional `MAP:` blocks.
        morphism: PathBuf,
        /// Finite model used to refute added equations.
        #[arg(long)]
        model: Option<PathBuf>,
    },
    /// Is a commuting square a pushout?
    Pushout {
        /// File starting with `SQUARE graph` or `SQUARE spec`.
        square: PathBuf,
    },
    /// Re-check every face and verdict of a cube dump.
    Cube { cube: PathBuf },
    /// Is an equation derivable from a specification?
    Derive {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        goal: String,
        #[arg(long)]
        model: Option<PathBuf>,
    },
}

#[derive(Subcommand, Debug)]
pub enum ExportWhat {
    /// A graph as DOT.
    Graph { graph: PathBuf },
    /// Every successful rewrite step as DOT.
    Rewrite {
        #[arg(long, value_enum, default_value_t = RewriteModeArg::Dpo)]
        mode: RewriteModeArg,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        graph: PathBuf,
        #[arg(long)]
        rule: Option<String>,
    },
    /// The cube of one pleopushout step of a deduction run (JSON dump or DOT).
    Cube {
        #[arg(long)]
        spec: PathBuf,
        #[arg(long)]
        rules: PathBuf,
        #[arg(long)]
        script: PathBuf,
        #[arg(long, value_enum)]
        mode: Option<StepModeArg>,
        /// 1-based step number (defaults to the last step).
        #[arg(long)]
        step: Option<usize>,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(&cli) {
        Ok(outcome) => ExitCode::from(outcome.code()),
        Err(CliError(message)) => {
            eprintln!("error: {message}");
            ExitCode::from(1)
        }
    }
}
