use std::path::PathBuf;
use std::process::ExitCode;

use anyhow::Result;
use clap::{Parser, Subcommand};
use revival_core::validation::{run_all, run_suite, Suite};

mod config;
mod output;
mod run;

#[derive(Parser)]
#[command(
    name = "revival",
    version,
    about = "Revivals of the Schrödinger equation with a complex potential"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run an experiment file and write its CSV/SVG outputs.
    Run {
        #[arg(long)]
        config: PathBuf,
        /// Parallel sweep entries.
        #[arg(long, default_value_t = 1)]
        jobs: usize,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Run validation checks and print one line per check.
    Validate {
        /// gauss, free, mathieu, biortho or selfadjoint; all when omitted.
        #[arg(long)]
        suite: Option<Suite>,
    },
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    match dispatch(Cli::parse()) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}

fn dispatch(cli: Cli) -> Result<ExitCode> {
    match cli.command {
        Command::Run { config, jobs, out } => {
            let cfg = config::ExperimentConfig::from_file(&config)?;
            for path in run::run(&cfg, &out, jobs.max(1))? {
                println!("wrote {}", path.display());
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Validate { suite } => {
            let outcomes = match suite {
                Some(s) => run_suite(s),
                None => run_all(),
            };
            let mut failed = 0;
            for o in &outcomes {
                println!("{o}");
                if o.is_failure() {
                    failed += 1;
                }
            }
            println!("{} checks, {failed} failed", outcomes.len());
            Ok(if failed == 0 {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            })
        }
    }
}
