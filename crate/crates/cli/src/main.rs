//! Command-line driver: dataset generation, training, grid search and
//! evaluation.
//!
//! Exit codes: 0 success, 2 usage errors, 3 numerical failure (divergence).

mod commands;
mod dataset;

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

const SPACE_GRAMMAR: &str = "\
Space descriptors:
  SPACE   := KIND ':' N | 'product:' FACTOR ('+' FACTOR)+
  FACTOR  := KIND ':' N
  KIND    := 'euclidean' | 'poincare' | 'siegel' | 'bounded'
Examples: euclidean:20, siegel:4, product:poincare:10+euclidean:10.
Free parameters: N for euclidean/poincare, N(N+1) for siegel/bounded.

Dataset arguments accept either a path (a triplet CSV, an edge list, or a
directory produced by `generate`) or a generator spec:
  GEN := 'tree:' V ',' H | 'grid:' D1 'x' D2 ... |
         'cartesian:' GEN '+' GEN | 'rooted:' OUTER '+' INNER";

#[derive(Parser)]
#[command(name = "symspace", version, about = "Graph embeddings in symmetric-matrix spaces", after_long_help = SPACE_GRAMMAR)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Master random seed; every command is deterministic given the seed.
    #[arg(long, global = true, default_value_t = 42)]
    seed: u64,

    /// Directory receiving run outputs.
    #[arg(long, global = true, default_value = "runs")]
    output_dir: PathBuf,

    /// Worker threads for grid search (default: available parallelism).
    #[arg(long, global = true)]
    workers: Option<usize>,

    /// Log level: error, warn, info, debug, trace.
    #[arg(long, global = true, default_value = "info")]
    log_level: String,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark graph: edge list, triplets and stats.
    #[command(subcommand)]
    Generate(GenerateCommand),
    /// Train one configuration on one dataset.
    Train(TrainArgs),
    /// Run the full hyperparameter grid and summarize it.
    Gridsearch(GridArgs),
    /// Evaluate a checkpoint against a dataset.
    Evaluate(EvalArgs),
}

#[derive(Subcommand)]
enum GenerateCommand {
    /// Complete rooted tree.
    Tree {
        #[arg(long)]
        valency: usize,
        #[arg(long)]
        height: usize,
    },
    /// Lattice graph, extents like 5x5x5.
    Grid {
        #[arg(long)]
        dims: String,
    },
    /// Cartesian product of two generator specs.
    Cartesian {
        #[arg(long)]
        a: String,
        #[arg(long)]
        b: String,
    },
    /// Rooted product: a copy of --inner per vertex of --outer.
    Rooted {
        #[arg(long)]
        outer: String,
        #[arg(long)]
        inner: String,
        /// Root node of the inner copies (default: node 0).
        #[arg(long, default_value_t = 0)]
        root: u32,
    },
    /// Any generator spec string.
    Spec {
        #[arg(long)]
        spec: String,
    },
}

#[derive(Args)]
struct TrainArgs {
    /// Dataset path or generator spec.
    #[arg(long)]
    dataset: String,
    /// Embedding space descriptor.
    #[arg(long)]
    space: String,
    #[arg(long, default_value_t = 0.01)]
    lr: f64,
    #[arg(long, default_value_t = 512)]
    batch_size: usize,
    #[arg(long, default_value_t = 300.0)]
    max_grad_norm: f64,
    #[arg(long, default_value_t = 3000)]
    epochs: usize,
    #[arg(long, default_value_t = 10)]
    burnin_epochs: usize,
    #[arg(long, default_value_t = 10.0)]
    burnin_factor: f64,
    #[arg(long, default_value_t = 5.0)]
    lr_reduce_factor: f64,
    #[arg(long, default_value_t = 50)]
    lr_patience: usize,
    #[arg(long, default_value_t = 150)]
    early_stop_patience: usize,
    /// Epsilon margin for projections back into the model.
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    /// Run directory name (default: derived from dataset, space, seed).
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct GridArgs {
    #[arg(long)]
    dataset: String,
    #[arg(long)]
    space: String,
    /// Learning-rate grid (comma separated).
    #[arg(long, default_value = "0.02,0.01,0.005", value_delimiter = ',')]
    lr: Vec<f64>,
    /// Batch-size grid.
    #[arg(long, default_value = "128,512", value_delimiter = ',')]
    batch_size: Vec<usize>,
    /// Gradient-clipping grid.
    #[arg(long, default_value = "100,300", value_delimiter = ',')]
    max_grad_norm: Vec<f64>,
    #[arg(long, default_value_t = 3000)]
    epochs: usize,
    #[arg(long, default_value_t = 10)]
    burnin_epochs: usize,
    #[arg(long, default_value_t = 10.0)]
    burnin_factor: f64,
    #[arg(long, default_value_t = 5.0)]
    lr_reduce_factor: f64,
    #[arg(long, default_value_t = 50)]
    lr_patience: usize,
    #[arg(long, default_value_t = 150)]
    early_stop_patience: usize,
    #[arg(long, default_value_t = 1e-4)]
    epsilon: f64,
    #[arg(long)]
    name: Option<String>,
}

#[derive(Args)]
struct EvalArgs {
    /// Checkpoint file written by `train` (binary or JSON).
    #[arg(long)]
    checkpoint: PathBuf,
    /// Dataset path or generator spec.
    #[arg(long)]
    dataset: String,
    /// Output file stem (default: "eval").
    #[arg(long, default_value = "eval")]
    name: String,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    env_logger::Builder::new()
        .parse_filters(&cli.log_level)
        .format_timestamp(None)
        .init();

    let outcome = match &cli.command {
        Command::Generate(cmd) => commands::generate(cmd, &cli),
        Command::Train(args) => commands::train(args, &cli),
        Command::Gridsearch(args) => commands::gridsearch(args, &cli),
        Command::Evaluate(args) => commands::evaluate(args, &cli),
    };

    match outcome {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err}");
            let usage = matches!(
                err,
                symspace::Error::InvalidArgument(_) | symspace::Error::ShapeMismatch(_)
            );
            if usage {
                ExitCode::from(2)
            } else {
                ExitCode::from(1)
            }
        }
    }
}
