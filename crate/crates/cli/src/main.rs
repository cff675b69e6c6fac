use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use swarm_inspect::comms::FeedbackMode;

mod commands;
mod config;
mod manifest;

/// Exit 2 for usage and validation problems, 1 for everything else.
#[derive(Debug)]
pub enum Failure {
    Usage(String),
    Runtime(anyhow::Error),
}

impl<E: Into<anyhow::Error>> From<E> for Failure {
    fn from(e: E) -> Self {
        Failure::Runtime(e.into())
    }
}

#[derive(Parser, Debug)]
#[command(name = "swarm-inspect", version, about = "Swarm surface-inspection simulator and parameter tuner")]
struct Cli {
    /// Worker threads for simulations (default: logical CPU count).
    #[arg(long, global = true)]
    workers: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run one simulation and write its event trace.
    Sim(SimArgs),
    /// Run many randomized simulations per fill ratio.
    Batch(BatchArgs),
    /// Tune (tau, s, d, h) with a noise-resistant particle swarm.
    Pso(PsoArgs),
    /// Re-run the invocation recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Args, Debug, Clone, Default)]
pub struct CommonArgs {
    /// TOML config file with optional [params], [sim], [batch], [pso] sections.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Preset name (empirical, optimized_uminus, optimized_uplus) or parameter TOML file.
    #[arg(long)]
    pub params: Option<String>,
    /// Fraction of white tiles.
    #[arg(long)]
    pub fill: Option<f64>,
    /// Master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    /// Observation interval, steps.
    #[arg(long)]
    pub tau: Option<u32>,
    /// Random-walk forward bound, steps.
    #[arg(long)]
    pub s: Option<u32>,
    /// Collision trigger distance, mm.
    #[arg(long)]
    pub d: Option<u32>,
    /// Hysteresis, observations.
    #[arg(long)]
    pub h: Option<u32>,
    /// Credibility threshold.
    #[arg(long)]
    pub pc: Option<f64>,
    /// Positive feedback: on (broadcast decisions) or off (broadcast observations).
    #[arg(long)]
    pub feedback: Option<FeedbackMode>,
    /// Simulation horizon, steps.
    #[arg(long)]
    pub t_max_steps: Option<u64>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    pub out: PathBuf,
}

#[derive(Args, Debug, Clone)]
pub struct SimArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Omit per-observation and per-delivery records from the trace.
    #[arg(long)]
    pub no_events: bool,
}

#[derive(Args, Debug, Clone)]
pub struct BatchArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    /// Runs per fill ratio.
    #[arg(long)]
    pub runs: Option<usize>,
    /// Comma-separated fill ratios.
    #[arg(long, value_delimiter = ',')]
    pub fills: Option<Vec<f64>>,
}

#[derive(Args, Debug, Clone)]
pub struct PsoArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[arg(long)]
    pub particles: Option<usize>,
    /// PSO iterations after the initial evaluation.
    #[arg(long)]
    pub iters: Option<usize>,
    #[arg(long)]
    pub noise_evals: Option<usize>,
    /// Weight of the standard deviation in the aggregate fitness.
    #[arg(long)]
    pub gamma: Option<f64>,
    /// `global` or `ring:K`.
    #[arg(long)]
    pub topology: Option<String>,
    /// Re-evaluate personal bests every iteration.
    #[arg(long)]
    pub reevaluate: bool,
    /// Continue from a checkpoint; its settings replace all others except --out.
    #[arg(long)]
    pub resume: Option<PathBuf>,
    /// Stop after this many iterations, leaving a resumable checkpoint.
    #[arg(long)]
    pub stop_after: Option<usize>,
}

#[derive(Args, Debug, Clone)]
pub struct ReplayArgs {
    /// manifest.json of the run to repeat.
    pub manifest: PathBuf,
    /// Output directory for the repeated run.
    #[arg(long)]
    pub out: PathBuf,
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = e.exit_code();
            let _ = e.print();
            return ExitCode::from(code as u8);
        }
    };
    if let Some(n) = cli.workers {
        if n == 0 {
            eprintln!("error: --workers must be at least 1");
            return ExitCode::from(2);
        }
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
            eprintln!("error: cannot start worker pool: {e}");
            return ExitCode::from(1);
        }
    }
    let result = match cli.command {
        Command::Sim(a) => commands::sim(a),
        Command::Batch(a) => commands::batch(a),
        Command::Pso(a) => commands::pso(a),
        Command::Replay(a) => commands::replay(a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Runtime(e)) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
