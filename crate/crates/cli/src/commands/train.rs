use std::fmt::Write as _;
use std::path::PathBuf;

use bir_core::metric::train_toy;
use clap::Args;

use crate::data::{manifest_from_keys, read_manifest, FeatureViews};
use crate::error::{invalid, runtime, CliResult};
use crate::{resolved, write_file, Output, TrainerArgs};

#[derive(Debug, Clone, Args)]
pub struct TrainArgs {
    /// Training manifest; optional when --features is a text file with ids.
    #[arg(long)]
    pub manifest: Option<PathBuf>,
    /// Features of the original images.
    #[arg(long)]
    pub features: PathBuf,
    /// Features of the segmented images, used by Segmented records.
    #[arg(long)]
    pub seg_features: Option<PathBuf>,
    #[command(flatten)]
    pub trainer: TrainerArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Model file to write.
    #[arg(long)]
    pub out: PathBuf,
    /// Per-epoch loss log; defaults to `<out>.loss.tsv`.
    #[arg(long)]
    pub loss_log: Option<PathBuf>,
}

pub fn run(args: &TrainArgs) -> CliResult<Output> {
    let config = args.trainer.config(args.seed)?;
    let views = FeatureViews::load(&args.features, args.seg_features.as_deref())?;
    let manifest = match &args.manifest {
        Some(path) => read_manifest(path)?,
        None => manifest_from_keys(&views.original)?,
    };
    let dataset = views.dataset(&manifest).map_err(invalid)?;
    if dataset.num_identities() < config.p {
        return Err(invalid(format!(
            "P={} but the training set has only {} identities",
            config.p,
            dataset.num_identities()
        )));
    }

    let outcome = train_toy(&dataset, &config).map_err(runtime)?;

    let out = resolved(&args.out);
    let log_path = args
        .loss_log
        .as_ref()
        .map(|p| resolved(p))
        .unwrap_or_else(|| out.with_extension("loss.tsv"));
    let mut log = format!(
        "#bir-loss\tversion=1\tbatch_size={}\tbatches_per_epoch={}\tseed={}\n",
        config.batch_size(),
        outcome.batches_per_epoch,
        config.seed
    );
    for (epoch, loss) in outcome.epoch_losses.iter().enumerate() {
        writeln!(log, "{}\t{loss:.9}", epoch + 1).unwrap();
    }
    write_file(&out, outcome.model.to_json() + "\n")?;
    write_file(&log_path, log)?;

    let first = outcome.epoch_losses.first().copied().unwrap_or_default();
    let last = outcome.epoch_losses.last().copied().unwrap_or_default();
    Ok(Output {
        stdout: format!(
            "batch_size={} epochs={} first_loss={first:.6} final_loss={last:.6}\n",
            config.batch_size(),
            config.epochs
        ),
        ..Output::default()
    })
}
