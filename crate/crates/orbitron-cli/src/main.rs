//! `orbitron` — run stability scenarios and render their outputs.
//!
//! Exit codes: 0 success, 2 scenario validation error, 3 numerical failure
//! (partial outputs are written and flagged on stderr).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use orbitron_core::scenario::{self, PlotKind, Scenario};
use orbitron_core::Error;

#[derive(Parser)]
#[command(
    name = "orbitron",
    version = version_string(),
    about = "Dynamics and stability analysis of a magnetic rigid body in an axisymmetric mirror-symmetric field"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a scenario file and write its outputs.
    Run {
        /// Path to the scenario JSON.
        scenario: PathBuf,
        /// Output directory (created if missing).
        #[arg(long, default_value = ".")]
        out: PathBuf,
        /// Worker threads for grid evaluations (0 = library default).
        #[arg(long, default_value_t = 0)]
        threads: usize,
    },
    /// Emit a standalone plot script for a sweep/grid CSV.
    Plot {
        /// CSV produced by a sweep or grid task.
        csv: PathBuf,
        /// Plot flavor.
        #[arg(long)]
        kind: Kind,
        /// Output path for the script (default: alongside the CSV).
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Copy, Clone, ValueEnum)]
enum Kind {
    Line,
    Heatmap,
}

fn version_string() -> &'static str {
    concat!(env!("CARGO_PKG_VERSION"), " (scenario schema 1)")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            match e {
                Error::Validation(_) => ExitCode::from(2),
                _ => ExitCode::from(3),
            }
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, Error> {
    match cli.command {
        Command::Run { scenario, out, threads } => {
            let text = std::fs::read_to_string(&scenario)
                .map_err(|e| Error::Validation(format!("cannot read {}: {e}", scenario.display())))?;
            let parsed = Scenario::from_json(&text)?;
            let result = scenario::run(&parsed, &out, threads)?;
            for f in &result.files {
                println!("wrote {}", f.display());
            }
            if let Some(flag) = result.numerical_failure {
                eprintln!("numerical failure: {flag} (partial outputs written)");
                return Ok(ExitCode::from(3));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Plot { csv, kind, out } => {
            let kind = match kind {
                Kind::Line => PlotKind::Line,
                Kind::Heatmap => PlotKind::Heatmap,
            };
            let script = scenario::emit_plot_script(&csv, kind)?;
            let path = out.unwrap_or_else(|| csv.with_extension("plot.py"));
            std::fs::write(&path, script)?;
            println!("wrote {}", path.display());
            Ok(ExitCode::SUCCESS)
        }
    }
}
