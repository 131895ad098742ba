//! `normconflict`: extract norms, train and evaluate conflict classifiers,
//! classify pairs and run the annotation service.
//!
//! Exit codes: 0 success, 2 input error, 3 pipeline error, 4 service error.

mod commands;
mod config;
mod error;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::commands::Context;

#[derive(Debug, Parser)]
#[command(name = "normconflict", version, about = "Norm-conflict detection and classification for contracts")]
struct Cli {
    /// Omit wall-clock timestamps so output is byte-identical across runs.
    #[arg(long, global = true)]
    no_timestamp: bool,

    /// More log output on stderr (-v info, -vv debug).
    #[arg(short, long, global = true, action = clap::ArgAction::Count)]
    verbose: u8,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Extract norm sentences from plain-text contracts.
    Extract(ExtractArgs),
    /// Per-type counts of a pair dataset.
    Stats(StatsArgs),
    /// Generate a synthetic labelled corpus and matching word vectors.
    Synth(SynthArgs),
    /// Train a classifier on the training split and save it.
    Train(TrainArgs),
    /// Run the cross-validated experiment grid and write reports.
    Evaluate(EvaluateArgs),
    /// Classify one pair or a file of pairs with a saved model.
    Classify(ClassifyArgs),
    /// Serve the annotation API.
    Serve(ServeArgs),
}

#[derive(Debug, Args)]
pub struct ExtractArgs {
    /// Contract files, or directories of `*.txt` contracts.
    #[arg(long, required = true, num_args = 1..)]
    pub contracts: Vec<PathBuf>,
    /// Modal lexicon (`phrase<TAB>meaning` per line). Built-in list if absent.
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    /// Norms file to write, one record per line.
    #[arg(long)]
    pub out: PathBuf,
    /// Also write candidate pairs (labelled non-conflict) to this dataset file.
    #[arg(long)]
    pub pairs: Option<PathBuf>,
    /// Pair norms across contracts too, not only within one contract.
    #[arg(long)]
    pub cross_contract: bool,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    /// Machine-readable output.
    #[arg(long)]
    pub json: bool,
}

#[derive(Debug, Args)]
pub struct SynthArgs {
    /// Dataset file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Word-vector file to write, covering the corpus vocabulary.
    #[arg(long)]
    pub vectors_out: Option<PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub dim: usize,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
    /// Pairs per class: non-conflict, deontic-modality, deontic-structure,
    /// deontic-object, object-conditional.
    #[arg(long, value_delimiter = ',')]
    pub counts: Option<Vec<usize>>,
}

/// Experiment settings shared by `train` and `evaluate`. Unset flags fall
/// back to the `--config` file, then to defaults.
#[derive(Debug, Args)]
pub struct ExperimentArgs {
    #[arg(long)]
    pub dataset: PathBuf,
    #[arg(long)]
    pub vectors: PathBuf,
    /// `key = value` file; flags take precedence.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub test_fraction: Option<f64>,
    #[arg(long)]
    pub seed: Option<u64>,
    /// SVM regularization constant C.
    #[arg(long)]
    pub c: Option<f64>,
    /// squared-hinge or hinge.
    #[arg(long)]
    pub loss: Option<String>,
    #[arg(long)]
    pub max_epochs: Option<usize>,
    /// skip or zero-vector.
    #[arg(long)]
    pub unknown_tokens: Option<String>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// typec+non (five classes) or typec (four conflict types).
    #[arg(long)]
    pub task: Option<String>,
    /// concat or offset.
    #[arg(long)]
    pub mode: Option<String>,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Training log; defaults to the model path with `.log` appended.
    #[arg(long)]
    pub log: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EvaluateArgs {
    #[command(flatten)]
    pub experiment: ExperimentArgs,
    /// all, typec+non or typec (alias typec-only).
    #[arg(long)]
    pub task: Option<String>,
    #[arg(long)]
    pub k: Option<usize>,
    /// macro or weighted.
    #[arg(long)]
    pub averaging: Option<String>,
    /// Non-conflicts per fold set: match-conflicts or a count.
    #[arg(long)]
    pub negatives: Option<String>,
    /// Directory for report.txt and report.json.
    #[arg(long, default_value = "report")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct ClassifyArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub vectors: PathBuf,
    #[arg(long, requires = "norm2", conflicts_with = "pairs")]
    pub norm1: Option<String>,
    #[arg(long, requires = "norm1")]
    pub norm2: Option<String>,
    /// Pairs file, one `{"id", "norm1", "norm2"}` object per line.
    #[arg(long, requires = "out")]
    pub pairs: Option<PathBuf>,
    /// Predictions file for batch mode.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ServeArgs {
    /// Dataset file that receives submitted pairs (created if missing).
    #[arg(long)]
    pub dataset: PathBuf,
    /// Directory of `*.txt` contracts to draw norms from.
    #[arg(long)]
    pub contracts: PathBuf,
    #[arg(long)]
    pub lexicon: Option<PathBuf>,
    #[arg(long, default_value = "127.0.0.1:8080")]
    pub bind: String,
    #[arg(long, default_value_t = 42)]
    pub seed: u64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let level = match cli.verbose {
        0 => "warn",
        1 => "info",
        _ => "debug",
    };
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or(level)).init();

    let ctx = Context { timestamps: !cli.no_timestamp };
    let result = match cli.command {
        Command::Extract(a) => commands::extract(&ctx, a),
        Command::Stats(a) => commands::stats(&ctx, a),
        Command::Synth(a) => commands::synth(&ctx, a),
        Command::Train(a) => commands::train(&ctx, a),
        Command::Evaluate(a) => commands::evaluate(&ctx, a),
        Command::Classify(a) => commands::classify(&ctx, a),
        Command::Serve(a) => commands::serve(&ctx, a),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("normconflict: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
