use beltrami::cli;
use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

#[derive(Parser)]
#[command(name = "beltrami", version, about = "Numerics for degenerate Beltrami equations")]
struct Args {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Execute a JSON run config and write the report and CSV artifacts.
    Run {
        #[arg(long)]
        config: PathBuf,
        #[arg(long, default_value = ".")]
        out: PathBuf,
        #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u8).range(0..=2))]
        verbosity: u8,
        /// Reserved; every pipeline is deterministic.
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// List coefficient families, Φ families and domains.
    Catalog { filter: Option<String> },
}

fn main() -> ExitCode {
    let args = match Args::try_parse() {
        Ok(a) => a,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    match args.command {
        Command::Run { config, out, verbosity, seed } => {
            ExitCode::from(cli::run(&config, &out, verbosity, seed) as u8)
        }
        Command::Catalog { filter } => {
            for line in cli::list_catalog(filter.as_deref()) {
                println!("{line}");
            }
            ExitCode::SUCCESS
        }
    }
}
