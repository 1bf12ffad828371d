use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use controlled_echo::cli::verify::{run_suite, Suite};
use controlled_echo::cli::{self, RunConfig};

#[derive(Parser)]
#[command(version, about = "Controlled-echo density-matrix simulator")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a protocol and write `<name>.csv` and `<name>.report`.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Number of spin groups (odd).
        #[arg(long)]
        groups: Option<usize>,
        /// Group spacing, kHz.
        #[arg(long)]
        spacing: Option<f64>,
        /// Inhomogeneous FWHM, kHz.
        #[arg(long)]
        fwhm: Option<f64>,
        /// Output directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run an acceptance suite: invariants, oracles or figures.
    Verify {
        #[arg(long)]
        suite: String,
    },
}

fn main() -> ExitCode {
    match execute(Args::parse().command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> controlled_echo::Result<bool> {
    match command {
        Command::Run {
            config,
            groups,
            spacing,
            fwhm,
            out,
        } => {
            let config = RunConfig::load(&config)?.with_overrides(groups, spacing, fwhm, out)?;
            let outcome = cli::run(&config)?;
            println!("wrote {}", outcome.files.csv.display());
            println!("wrote {}", outcome.files.report.display());
            Ok(true)
        }
        Command::Verify { suite } => {
            let suite: Suite = suite.parse()?;
            let outcomes = run_suite(suite)?;
            for o in &outcomes {
                println!("{o}");
            }
            let passed = outcomes.iter().filter(|o| o.passed).count();
            println!("{suite}: {passed}/{} passed", outcomes.len());
            Ok(passed == outcomes.len())
        }
    }
}
