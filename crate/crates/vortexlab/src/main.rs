use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::Parser;
use vortexlab::{run_config, Command, HarnessError};

/// Run a lattice gauge-Higgs experiment and write its report.
#[derive(Debug, Parser)]
#[command(name = "vortexlab", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Experiment config (JSON).
    #[arg(long)]
    config: PathBuf,
    /// Overrides the config's seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory; defaults to the config's `out`, then `.`.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads.
    #[arg(long, env = "VORTEXLAB_THREADS")]
    threads: Option<usize>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("vortexlab: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}

fn run(cli: &Cli) -> Result<(), HarnessError> {
    let text = std::fs::read_to_string(&cli.config)?;
    let start = Instant::now();
    let artifacts = run_config(cli.command, &text, cli.seed, cli.threads)?;
    let elapsed = start.elapsed();
    let out = match (&cli.out, artifacts.report["config"]["out"].as_str()) {
        (Some(dir), _) => dir.clone(),
        (None, Some(dir)) => PathBuf::from(dir),
        (None, None) => PathBuf::from("."),
    };
    let threads = cli.threads.unwrap_or_else(rayon::current_num_threads);
    artifacts.write(&out, elapsed, threads)?;
    println!("{}", out.join(format!("{}.json", cli.command.name())).display());
    Ok(())
}
