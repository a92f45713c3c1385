//! Command-line driver: post-processing, manifest mixing, training,
//! evaluation and the ablation harness.

pub mod commands;
pub mod config;
pub mod data;
pub mod error;

use std::ffi::OsString;
use std::path::PathBuf;

use bir_core::metric::{Reduction, TrainConfig};
use clap::{Args, CommandFactory, FromArgMatches, Parser, Subcommand, ValueEnum};

pub use error::{CliError, CliResult};

#[derive(Debug, Parser)]
#[command(
    name = "bir",
    version,
    about = "Background interference removal for vehicle re-identification",
    after_help = "Any command accepts --config FILE with `flag = value` lines; \
                  command-line flags override it. Relative paths resolve against $BIR_ROOT when set."
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Fill holes, keep the largest component, gate by area, composite.
    Postprocess(commands::postprocess::PostprocessArgs),
    /// Mark manifest records Segmented-capable from a post-processing log.
    Pair(commands::pair::PairArgs),
    /// Choose the segmented variant of each capable record with probability k.
    Mix(commands::mix::MixArgs),
    /// Train the linear embedding with the batch-hard triplet loss.
    Train(commands::train::TrainArgs),
    /// Rank galleries and report mAP / CMC.
    Eval(commands::eval::EvalArgs),
    /// Run protocol variants and a k grid into one results table.
    Ablate(commands::ablate::AblateArgs),
    /// Write a seeded synthetic corpus (manifests and feature files).
    Synth(commands::synth::SynthArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ReductionArg {
    Sum,
    Mean,
}

/// Trainer flags shared by `train` and `ablate`.
#[derive(Debug, Clone, Args)]
pub struct TrainerArgs {
    /// Identities per batch.
    #[arg(long = "p", default_value_t = 18)]
    pub p: usize,
    /// Images per identity.
    #[arg(long = "k-per-id", default_value_t = 4)]
    pub k_per_id: usize,
    #[arg(long, default_value_t = 1.0)]
    pub margin: f64,
    #[arg(long, default_value_t = 2e-4)]
    pub lr: f64,
    #[arg(long, default_value_t = 300)]
    pub epochs: usize,
    #[arg(long, value_enum, default_value_t = ReductionArg::Sum)]
    pub reduction: ReductionArg,
    /// Embedding dimension (defaults to the input dimension).
    #[arg(long)]
    pub d_out: Option<usize>,
    /// L2-normalise embeddings.
    #[arg(long, num_args = 0..=1, default_value_t = false, default_missing_value = "true")]
    pub normalize: bool,
}

impl TrainerArgs {
    pub fn config(&self, seed: u64) -> CliResult<TrainConfig<f64>> {
        let config = TrainConfig {
            p: self.p,
            k: self.k_per_id,
            margin: self.margin,
            learning_rate: self.lr,
            epochs: self.epochs,
            seed,
            reduction: match self.reduction {
                ReductionArg::Sum => Reduction::Sum,
                ReductionArg::Mean => Reduction::Mean,
            },
            d_out: self.d_out,
            normalize_output: self.normalize,
        };
        config.validate().map_err(error::invalid)?;
        Ok(config)
    }
}

pub(crate) fn parse_fraction(s: &str) -> Result<f64, String> {
    let v: f64 = s.parse().map_err(|e| format!("{e}"))?;
    if (0.0..=1.0).contains(&v) {
        Ok(v)
    } else {
        Err(format!("{v} is not in [0, 1]"))
    }
}

/// What a command printed, for tests and for `main`.
#[derive(Debug, Default, Clone, PartialEq, Eq)]
pub struct Output {
    pub stdout: String,
    pub stderr: String,
    /// Exit code for partial failures that still produced output.
    pub code: u8,
}

pub fn execute(command: Command) -> CliResult<Output> {
    match command {
        Command::Postprocess(a) => commands::postprocess::run(&a),
        Command::Pair(a) => commands::pair::run(&a),
        Command::Mix(a) => commands::mix::run(&a),
        Command::Train(a) => commands::train::run(&a),
        Command::Eval(a) => commands::eval::run(&a),
        Command::Ablate(a) => commands::ablate::run(&a),
        Command::Synth(a) => commands::synth::run(&a),
    }
}

/// Parses `args` (program name first), expands `--config`, and runs.
///
/// Usage errors come back as [`CliError::Validation`]; `--help` and
/// `--version` come back as `Ok` with the text on stdout.
pub fn run_from<I, T>(args: I) -> CliResult<Output>
where
    I: IntoIterator<Item = T>,
    T: Into<OsString>,
{
    let args = config::expand_config(args.into_iter().map(Into::into).collect())?;
    let command = Cli::command().mut_subcommands(|sub| sub.args_override_self(true));
    let parsed = command
        .try_get_matches_from(args)
        .and_then(|mut matches| Cli::from_arg_matches_mut(&mut matches));
    match parsed {
        Ok(cli) => execute(cli.command),
        Err(e) if !e.use_stderr() => Ok(Output {
            stdout: e.to_string(),
            ..Output::default()
        }),
        Err(e) => Err(CliError::Validation(e.to_string())),
    }
}

pub(crate) fn ensure_parent(path: &std::path::Path) -> CliResult<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        std::fs::create_dir_all(parent)
            .map_err(|e| error::runtime(format!("{}: {e}", parent.display())))?;
    }
    Ok(())
}

pub(crate) fn write_file(path: &std::path::Path, contents: impl AsRef<[u8]>) -> CliResult<()> {
    ensure_parent(path)?;
    std::fs::write(path, contents).map_err(|e| error::runtime(format!("{}: {e}", path.display())))
}

pub(crate) fn resolved(path: &std::path::Path) -> PathBuf {
    config::resolve(path)
}
