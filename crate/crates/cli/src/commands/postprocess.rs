use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use bir_core::dataset::MaskVerdict;
use bir_core::io::{read_mask, read_rgb, write_mask, write_rgb};
use bir_core::raster::{
    apply_mask, postprocess, refine_with_edges, DiscardReason, PostprocessOutcome, BLACK,
};
use clap::Args;
use rayon::prelude::*;

use crate::error::{invalid, runtime, CliResult};
use crate::{parse_fraction, resolved, write_file, Output};

pub const OUTCOME_LOG: &str = "outcomes.tsv";
const OUTCOME_MAGIC: &str = "#bir-outcomes";

#[derive(Debug, Clone, Args)]
pub struct PostprocessArgs {
    /// Directory of intermediate segmentation masks.
    #[arg(long)]
    pub masks: PathBuf,
    /// Directory of original images, paired with masks by file stem.
    #[arg(long)]
    pub images: PathBuf,
    #[arg(long)]
    pub out: PathBuf,
    /// Minimum vehicle area ratio after post-processing.
    #[arg(long, default_value_t = 0.60, value_parser = parse_fraction)]
    pub threshold: f64,
    /// Edge-snapping radius in pixels; 0 disables it.
    #[arg(long, default_value_t = 0)]
    pub edge_radius: usize,
}

/// Files of a directory keyed by stem; duplicate stems are an error.
fn index_dir(dir: &Path) -> CliResult<BTreeMap<String, PathBuf>> {
    if !dir.is_dir() {
        return Err(invalid(format!("{}: not a directory", dir.display())));
    }
    let entries = std::fs::read_dir(dir).map_err(|e| invalid(format!("{}: {e}", dir.display())))?;
    let mut paths: Vec<PathBuf> = entries
        .filter_map(|e| e.ok().map(|e| e.path()))
        .filter(|p| p.is_file())
        .collect();
    paths.sort();
    let mut out = BTreeMap::new();
    for path in paths {
        let Some(stem) = path.file_stem().map(|s| s.to_string_lossy().into_owned()) else {
            continue;
        };
        if stem.starts_with('.') {
            continue;
        }
        if let Some(previous) = out.insert(stem.clone(), path.clone()) {
            return Err(invalid(format!(
                "stem `{stem}` is ambiguous: {} and {}",
                previous.display(),
                path.display()
            )));
        }
    }
    Ok(out)
}

enum FileResult {
    Done {
        outcome: PostprocessOutcome,
        composite: Option<bir_core::raster::RgbImage>,
    },
    Failed(String),
}

fn process_one(mask: &Path, image: Option<&PathBuf>, args: &PostprocessArgs) -> FileResult {
    let run = || -> bir_core::Result<FileResult> {
        let image =
            image.ok_or_else(|| bir_core::Error::InvalidData("no image with this stem".into()))?;
        let raw = read_mask(mask)?;
        let rgb = read_rgb(image)?;
        let refined = refine_with_edges(&raw, &rgb, args.edge_radius)?;
        let outcome = postprocess(&refined, args.threshold)?;
        let composite = outcome
            .mask()
            .map(|m| apply_mask(&rgb, m, BLACK))
            .transpose()?;
        Ok(FileResult::Done { outcome, composite })
    };
    run().unwrap_or_else(|e| FileResult::Failed(e.to_string()))
}

fn sanitize(msg: &str) -> String {
    msg.replace(['\t', '\n', '\r'], " ")
}

pub fn run(args: &PostprocessArgs) -> CliResult<Output> {
    let masks = index_dir(&resolved(&args.masks))?;
    let images = index_dir(&resolved(&args.images))?;
    let out = resolved(&args.out);
    if masks.is_empty() {
        return Err(invalid(format!("{}: no mask files", args.masks.display())));
    }

    let jobs: Vec<(&String, &PathBuf)> = masks.iter().collect();
    let results: Vec<FileResult> = jobs
        .par_iter()
        .map(|(stem, mask)| process_one(mask, images.get(*stem), args))
        .collect();

    let (mut kept, mut discarded, mut errors) = (0usize, 0usize, 0usize);
    let mut log = format!(
        "{OUTCOME_MAGIC}\tversion=1\tthreshold={}\tedge_radius={}\n",
        args.threshold, args.edge_radius
    );
    let mut stderr = String::new();
    for ((stem, _), result) in jobs.iter().zip(&results) {
        match result {
            FileResult::Done { outcome, composite } => {
                let ratio = outcome.ratio();
                match outcome {
                    PostprocessOutcome::Kept { mask, .. } => {
                        kept += 1;
                        let mask_path = out.join("masks").join(format!("{stem}.png"));
                        let image_path = out.join("images").join(format!("{stem}.png"));
                        crate::ensure_parent(&mask_path)?;
                        crate::ensure_parent(&image_path)?;
                        write_mask(&mask_path, mask).map_err(runtime)?;
                        write_rgb(&image_path, composite.as_ref().expect("kept has composite"))
                            .map_err(runtime)?;
                        writeln!(log, "{stem}\tkept\t{ratio:.6}\t-").unwrap();
                    }
                    PostprocessOutcome::Discarded(reason) => {
                        discarded += 1;
                        let why = match reason {
                            DiscardReason::HoleOnly => "hole-only",
                            DiscardReason::BelowAreaThreshold { .. } => "below-threshold",
                        };
                        writeln!(log, "{stem}\tdiscarded\t{ratio:.6}\t{why}").unwrap();
                    }
                }
            }
            FileResult::Failed(msg) => {
                errors += 1;
                writeln!(stderr, "{stem}: {msg}").unwrap();
                writeln!(log, "{stem}\terror\t-\t{}", sanitize(msg)).unwrap();
            }
        }
    }
    write_file(&out.join(OUTCOME_LOG), log)?;
    let stdout = format!("kept={kept} discarded={discarded} errors={errors}\n");
    Ok(Output {
        stdout,
        stderr,
        code: if kept + discarded == 0 { 2 } else { 0 },
    })
}

/// Reads an outcome log into `stem → verdict`; error rows are left out.
pub fn parse_outcomes(text: &str, origin: &str) -> CliResult<BTreeMap<String, MaskVerdict>> {
    let mut lines = text.lines().enumerate();
    match lines.next() {
        Some((_, header)) if header.starts_with(OUTCOME_MAGIC) => {}
        _ => {
            return Err(invalid(format!(
                "{origin}: missing `{OUTCOME_MAGIC}` header"
            )))
        }
    }
    let mut out = BTreeMap::new();
    for (i, line) in lines {
        if line.is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 4 {
            return Err(invalid(format!("{origin}:{}: expected 4 columns", i + 1)));
        }
        let verdict = match cols[1] {
            "kept" => MaskVerdict::Kept,
            "discarded" => MaskVerdict::Discarded,
            "error" => continue,
            other => {
                return Err(invalid(format!(
                    "{origin}:{}: unknown status `{other}`",
                    i + 1
                )))
            }
        };
        out.insert(cols[0].to_string(), verdict);
    }
    Ok(out)
}
