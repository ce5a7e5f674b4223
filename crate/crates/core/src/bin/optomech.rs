use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use optomech::commands::{run_command, Command};
use optomech::scenario::{load_scenario, GridConfig};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Cmd {
    /// Displacement noise budget (component CSVs and per-decade summary).
    Budget,
    /// Cold-damping gain sweep.
    Cool,
    /// Effective-mass scan of the optical spot across a mode shape.
    Scan,
    /// Lorentzian fit of a measured or synthesized spectrum.
    Fit,
    /// Synthesize a time series and its Welch spectrum.
    Synth,
}

#[derive(Debug, Parser)]
#[command(name = "optomech", version, about = "Optomechanical displacement-sensor models")]
struct Cli {
    #[arg(value_enum)]
    command: Cmd,
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Analysis grid override: f_min,f_max,n,log|lin
    #[arg(long)]
    grid: Option<String>,
}

fn run(cli: &Cli) -> optomech::Result<PathBuf> {
    let mut scenario = load_scenario(&cli.config)?;
    if let Some(seed) = cli.seed {
        scenario = scenario.with_seed(seed)?;
    }
    if let Some(grid) = &cli.grid {
        scenario = scenario.with_grid(grid.parse::<GridConfig>()?)?;
    }
    let command = match cli.command {
        Cmd::Budget => Command::Budget,
        Cmd::Cool => Command::Cool,
        Cmd::Scan => Command::Scan,
        Cmd::Fit => Command::Fit,
        Cmd::Synth => Command::Synth,
    };
    Ok(run_command(&scenario, command, &cli.out)?.manifest_path())
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match run(&cli) {
        Ok(manifest) => {
            println!("{}", manifest.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            let message = e.to_string().replace('\n', " ");
            eprintln!("error kind={} message={message:?}", e.kind());
            ExitCode::FAILURE
        }
    }
}
