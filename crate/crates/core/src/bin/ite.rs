use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use ite_core::cli::{self, Outcome, Overrides, EXIT_CONFIG};

/// Real interior transmission eigenvalues of radial scatterers.
#[derive(Debug, Parser)]
#[command(name = "ite", version)]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the full pipeline and write CSV reports.
    Run {
        config: PathBuf,
        #[arg(long)]
        lambda_max: Option<f64>,
        #[arg(long)]
        output_dir: Option<PathBuf>,
        /// Worker threads, 0 for one per core.
        #[arg(long, default_value_t = 0)]
        threads: usize,
        /// Treat even-order zeros of a branch as errors.
        #[arg(long)]
        strict: bool,
    },
    /// Ellipticity verdicts for the config's boundary samples.
    Symbols {
        config: PathBuf,
        #[arg(long)]
        output_dir: Option<PathBuf>,
    },
}

fn finish(outcome: Outcome) -> ExitCode {
    if outcome.exit_code == 0 {
        println!("{}", outcome.message.trim_end());
    } else {
        eprintln!("error: {}", outcome.message);
    }
    ExitCode::from(outcome.exit_code as u8)
}

fn main() -> ExitCode {
    let args = Args::parse();
    match args.command {
        Command::Run { config, lambda_max, output_dir, threads, strict } => {
            if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
                return finish(Outcome { exit_code: EXIT_CONFIG, message: format!("thread pool: {e}") });
            }
            let overrides = Overrides { lambda_max, output_dir, strict };
            match cli::load(&config, &overrides) {
                Ok(cfg) => finish(cli::run(&cfg, strict)),
                Err(o) => finish(o),
            }
        }
        Command::Symbols { config, output_dir } => {
            let overrides = Overrides { output_dir, ..Overrides::default() };
            match cli::load(&config, &overrides) {
                Ok(cfg) => finish(cli::symbols(&cfg)),
                Err(o) => finish(o),
            }
        }
    }
}
