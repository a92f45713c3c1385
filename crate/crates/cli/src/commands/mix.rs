use std::path::PathBuf;

use bir_core::dataset::{mix_random_selection, Variant};
use clap::Args;

use crate::data::read_manifest;
use crate::error::{invalid, CliResult};
use crate::{parse_fraction, resolved, write_file, Output};

#[derive(Debug, Clone, Args)]
pub struct MixArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Probability of choosing the segmented variant.
    #[arg(long, value_parser = parse_fraction)]
    pub k: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &MixArgs) -> CliResult<Output> {
    let manifest = read_manifest(&args.manifest)?;
    let mixed = mix_random_selection(&manifest, args.k, args.seed).map_err(invalid)?;
    write_file(&resolved(&args.out), mixed.to_text())?;
    Ok(Output {
        stdout: format!(
            "segmented={} original={}\n",
            mixed.count_variant(Variant::Segmented),
            mixed.count_variant(Variant::Original)
        ),
        ..Output::default()
    })
}
