use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};
use utaylor_cli::{run, Overrides};

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Command {
    Classify,
    Construct,
    Verify,
    Bw,
    Fekete,
    Capacity,
    Green,
    Gaps,
    Invariance,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Classify => "classify",
            Command::Construct => "construct",
            Command::Verify => "verify",
            Command::Bw => "bw",
            Command::Fekete => "fekete",
            Command::Capacity => "capacity",
            Command::Green => "green",
            Command::Gaps => "gaps",
            Command::Invariance => "invariance",
        }
    }
}

/// Runs one pipeline on a scenario file and writes a JSON report and CSV
/// tables. Exits 0 when the command's pass criterion holds, 1 when it does
/// not and 2 on errors.
#[derive(Debug, Parser)]
#[command(name = "utaylor", version)]
struct Cli {
    #[arg(value_enum)]
    command: Command,
    /// Scenario file (TOML).
    scenario: PathBuf,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Horizon for limsup estimates.
    #[arg(long)]
    horizon: Option<u64>,
    /// Mesh width for every sampled set.
    #[arg(long)]
    mesh: Option<f64>,
    /// Largest trial index for `construct`.
    #[arg(long)]
    trials: Option<u64>,
    /// Polynomial file for `verify`, `gaps` and `invariance`.
    #[arg(long)]
    poly: Option<PathBuf>,
    /// No randomized fallbacks. Always on; accepted for compatibility.
    #[arg(long)]
    seedless: bool,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let o = Overrides { horizon: cli.horizon, mesh: cli.mesh, trials: cli.trials };
    match run(cli.command.name(), &cli.scenario, &cli.out, &o, cli.poly.as_deref()) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
