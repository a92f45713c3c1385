use std::path::{Path, PathBuf};

use bir_core::dataset::{pair_segmented, SegAvailability};
use clap::Args;

use super::postprocess::parse_outcomes;
use crate::data::read_manifest;
use crate::error::{invalid, runtime, CliResult};
use crate::{resolved, write_file, Output};

#[derive(Debug, Clone, Args)]
pub struct PairArgs {
    #[arg(long)]
    pub manifest: PathBuf,
    /// Outcome log written by `postprocess`.
    #[arg(long)]
    pub outcomes: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
}

pub fn run(args: &PairArgs) -> CliResult<Output> {
    let manifest = read_manifest(&args.manifest)?;
    let path = resolved(&args.outcomes);
    let text =
        std::fs::read_to_string(&path).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
    let verdicts = parse_outcomes(&text, &path.display().to_string())?;
    let paired = pair_segmented(&manifest, |image_path| {
        let stem = Path::new(image_path)
            .file_stem()?
            .to_string_lossy()
            .into_owned();
        verdicts.get(&stem).copied()
    })
    .map_err(invalid)?;
    let text = paired.to_text();
    write_file(&resolved(&args.out), text).map_err(|e| runtime(e.to_string()))?;
    Ok(Output {
        stdout: format!(
            "capable={} fallback={}\n",
            paired.count_availability(SegAvailability::Kept),
            paired.count_availability(SegAvailability::Discarded)
        ),
        ..Output::default()
    })
}
