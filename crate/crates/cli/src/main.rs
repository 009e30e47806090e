//! `voter-blotto`: reproducible experiments on voter-model Blotto games.

mod commands;
mod input;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

#[derive(Debug, Parser, Serialize)]
#[command(name = "voter-blotto", version, about = "Budget allocation for competing campaigns on a social graph")]
pub struct Cli {
    #[command(flatten)]
    pub global: GlobalArgs,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Args, Serialize)]
pub struct GlobalArgs {
    /// Seed for every random stream; falls back to BLOTTO_SEED, then 0.
    #[arg(long, global = true, env = "BLOTTO_SEED", default_value_t = 0)]
    pub seed: u64,

    /// Worker threads (defaults to all cores).
    #[arg(long, global = true)]
    pub threads: Option<usize>,

    /// Accepted for scripts; reductions are always performed in a fixed order.
    #[arg(long, global = true)]
    pub deterministic: bool,

    /// Write the report here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
}

/// Where battlefield values come from.
#[derive(Debug, Args, Serialize)]
pub struct ProfileArgs {
    /// Edge list: one `u v` pair per line, `#` comments, single labels declare nodes.
    #[arg(long, required_unless_present = "values")]
    pub graph: Option<PathBuf>,

    /// Explicit comma-separated values instead of a graph.
    #[arg(long, value_delimiter = ',', conflicts_with_all = ["graph", "horizon"])]
    pub values: Option<Vec<f64>>,

    /// intrinsic | tau:<int> | longterm
    #[arg(long, default_value = "intrinsic")]
    pub horizon: String,

    /// Do not add a self-loop to every node.
    #[arg(long)]
    pub no_auto_loops: bool,

    #[arg(long, default_value_t = 1.0)]
    pub budget: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct GraphArgs {
    #[arg(long)]
    pub graph: PathBuf,

    #[arg(long)]
    pub no_auto_loops: bool,
}

#[derive(Debug, Subcommand, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Command {
    /// Node count, edges, self-loops and degree histogram.
    Graph(GraphArgs),

    /// Battlefield values and marginal supports.
    Value(ProfileArgs),

    /// Draw equilibrium allocations.
    Sample {
        #[command(flatten)]
        profile: ProfileArgs,

        #[arg(long, default_value_t = 1000)]
        count: u64,
    },

    /// Estimate the sampler's payoff against pure strategies.
    Evaluate {
        #[command(flatten)]
        profile: ProfileArgs,

        /// Allocation file, or one of: uniform, vertices, beat-pure, corpus.
        #[arg(long, default_value = "corpus")]
        opponent: String,

        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },

    /// Voter-model Monte Carlo next to the exact expected score.
    Simulate {
        #[command(flatten)]
        graph: GraphArgs,

        /// Horizon τ (number of synchronous rounds).
        #[arg(long)]
        tau: u64,

        /// First campaign's allocation.
        #[arg(long)]
        x: PathBuf,

        /// Second campaign's allocation.
        #[arg(long)]
        y: PathBuf,

        #[arg(long, default_value_t = 100_000)]
        trials: u64,
    },

    /// Total variation between intrinsic and long-term strategies.
    Distance {
        #[command(flatten)]
        graph: GraphArgs,

        #[arg(long, default_value_t = 1.0)]
        budget: f64,

        /// Write one difference-density CSV per distinct degree here.
        #[arg(long)]
        density_dir: Option<PathBuf>,

        #[arg(long, default_value_t = 201)]
        points: usize,

        /// Also estimate the average distance from this many draws per marginal.
        #[arg(long, default_value_t = 0)]
        empirical_draws: u64,

        #[arg(long, default_value_t = voter_blotto::metrics::DEFAULT_BINS)]
        bins: usize,
    },

    /// Price of competition over a decreasing ε schedule.
    Poc {
        #[arg(long, default_value_t = 1.0)]
        budget: f64,

        #[arg(long)]
        epsilon: f64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(threads) = cli.global.threads {
        if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(threads).build_global() {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    match commands::run(&cli) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
