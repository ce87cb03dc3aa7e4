mod chart;
mod commands;
mod error;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use chainrisk::icio::Measure;

#[derive(Debug, Parser)]
#[command(
    name = "chainrisk",
    version,
    about = "Supply-chain robustness scenarios and input-output reliance"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a scripted sourcing scenario and write its time series.
    Simulate(SimulateArgs),
    /// Foreign input reliance by country pair.
    Fir(RelianceArgs),
    /// Foreign market reliance by country pair.
    Fmr(RelianceArgs),
    /// Solve the wage equilibrium of an economy.
    Equilibrium(EquilibriumArgs),
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Scenario configuration (JSON).
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
    /// Write one SVG chart per scenario cell.
    #[arg(long)]
    pub plot: bool,
    /// Overrides the seed in the configuration.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Run all six realization-by-information cells.
    #[arg(long)]
    pub matrix: bool,
    /// Also estimate survival over this many Monte Carlo runs.
    #[arg(long)]
    pub runs: Option<usize>,
}

#[derive(Debug, Args)]
pub struct RelianceArgs {
    /// Input-output table (native CSV or OECD ICIO layout).
    #[arg(long)]
    pub table: PathBuf,
    /// Second table for change panels.
    #[arg(long)]
    pub table2: Option<PathBuf>,
    /// Emit the change from --table to --table2 in percentage points.
    #[arg(long, requires = "table2")]
    pub diff: bool,
    /// Target sectors, comma separated; `C*` selects every label starting with C.
    #[arg(long, value_delimiter = ',', required = true)]
    pub sector: Vec<String>,
    /// Countries to report; the others are folded into ROW.
    #[arg(long, value_delimiter = ',')]
    pub focus: Vec<String>,
    #[arg(long, default_value = "va")]
    pub measure: Measure,
    /// Output file; stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EquilibriumArgs {
    /// Economy parameters (JSON), optionally with a `solver` section.
    #[arg(long)]
    pub params: PathBuf,
    /// Starting wages from a previous equilibrium.csv.
    #[arg(long)]
    pub initial: Option<PathBuf>,
    #[arg(long)]
    pub max_iterations: Option<usize>,
    #[arg(long)]
    pub tolerance: Option<f64>,
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::new().filter_or("GSC_LOG", "warn")).init();
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Simulate(a) => commands::simulate(a),
        Command::Fir(a) => commands::reliance(a, chainrisk::icio::RelianceKind::Input),
        Command::Fmr(a) => commands::reliance(a, chainrisk::icio::RelianceKind::Market),
        Command::Equilibrium(a) => commands::equilibrium(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
