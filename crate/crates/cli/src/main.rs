//! Command-line harness for algorithmic network experiments.

use std::path::PathBuf;
use std::process::ExitCode;

use algnet::experiments::{
    cmd_bb, cmd_central, cmd_halting_sweep, cmd_run, cmd_synergy, cmd_tvg, ExpError,
    ExperimentConfig, Outcome,
};
use clap::{Args, Parser, Subcommand};

#[derive(Parser)]
#[command(
    name = "algnet",
    version,
    about = "Simulate networks of random programs on time-varying graphs"
)]
struct Cli {
    #[command(flatten)]
    common: Common,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// TOML experiment configuration; every key has a default.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides the configured seed and ALGNET_SEED.
    #[arg(long, global = true, value_name = "U64")]
    seed: Option<u64>,
    /// Output directory.
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// Step budget for node programs.
    #[arg(long, global = true, value_name = "STEPS")]
    budget: Option<u64>,
    /// Worker threads; defaults to the number of cores.
    #[arg(long, global = true, value_name = "K")]
    jobs: Option<usize>,
}

#[derive(Subcommand)]
enum Command {
    /// Busy Beaver table by exhaustive enumeration.
    Bb,
    /// Diffusion metrics of a graph file or a generated graph.
    Tvg,
    /// One networked run with per-node isolated outputs.
    Run,
    /// Halting correctness over population sizes.
    HaltingSweep,
    /// Expected local synergy for each requested level.
    Synergy,
    /// Central-node search over random graphs.
    Central,
}

fn config(common: &Common) -> Result<ExperimentConfig, ExpError> {
    let mut cfg = match &common.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    cfg.apply_env()?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &common.out {
        cfg.out = out.clone();
    }
    if let Some(budget) = common.budget {
        cfg.budget = budget;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn execute(cli: &Cli) -> Result<Outcome, ExpError> {
    let cfg = config(&cli.common)?;
    if let Some(jobs) = cli.common.jobs {
        if jobs == 0 {
            return Err(ExpError::Validation("--jobs must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
            .map_err(|e| ExpError::Runtime(e.to_string()))?;
    }
    match cli.command {
        Command::Bb => cmd_bb(&cfg),
        Command::Tvg => cmd_tvg(&cfg),
        Command::Run => cmd_run(&cfg),
        Command::HaltingSweep => cmd_halting_sweep(&cfg),
        Command::Synergy => cmd_synergy(&cfg),
        Command::Central => cmd_central(&cfg),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let cli = Cli::parse();
    match execute(&cli) {
        Ok(outcome) => {
            for line in &outcome.lines {
                println!("{line}");
            }
            for file in &outcome.files {
                log::info!("wrote {}", file.display());
            }
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
