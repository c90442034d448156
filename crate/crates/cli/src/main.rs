use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mber_cli::{cmd_ber, cmd_lut_dump, cmd_mi, cmd_table, CommandError, ConfigError, ExperimentConfig};

#[derive(Parser)]
#[command(name = "mber", version, about = "1-bit MU-MISO precoding experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// BER over the transmit-power grid for each scheme.
    Ber(Common),
    /// Exact mutual information over the grid for each scheme.
    Mi(Common),
    /// Iterations, power at BER 1e-3 and MI for each solver tolerance.
    Table(Common),
    /// Export the PM lookup tables of every channel.
    LutDump(Common),
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed (overrides the config file).
    #[arg(long)]
    seed: Option<u64>,
    /// 500 channels x 10^4 symbols.
    #[arg(long)]
    paper_scale: bool,
    /// Output directory (overrides the config file).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn resolve(&self) -> Result<ExperimentConfig, ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => ExperimentConfig::load(path)?,
            None => ExperimentConfig::default(),
        };
        if let Some(seed) = self.seed {
            cfg.master_seed = seed;
        }
        if self.paper_scale {
            cfg.paper_scale();
        }
        if let Some(out) = &self.out {
            cfg.output_dir = out.clone();
        }
        Ok(cfg)
    }
}

fn run(cli: Cli) -> Result<PathBuf, CommandError> {
    let (common, run): (&Common, fn(&ExperimentConfig) -> Result<PathBuf, CommandError>) = match &cli.command {
        Command::Ber(c) => (c, cmd_ber),
        Command::Mi(c) => (c, cmd_mi),
        Command::Table(c) => (c, cmd_table),
        Command::LutDump(c) => (c, cmd_lut_dump),
    };
    let cfg = common.resolve()?;
    if let Some(k) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k)
            .build_global()
            .map_err(|e| ConfigError::Invalid(format!("cannot start {k} threads: {e}")))?;
    }
    run(&cfg)
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(path) => {
            println!("wrote {}", path.display());
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
