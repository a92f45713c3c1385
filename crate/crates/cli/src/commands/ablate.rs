use std::fmt::Write as _;
use std::path::PathBuf;

use bir_core::dataset::{assemble_protocol, derive_seed, Manifest, Protocol, Split};
use bir_core::eval::{evaluate, EvalOptions, EvalResult, Report};
use bir_core::metric::train_toy;
use clap::Args;
use rayon::prelude::*;

use crate::data::{embed_entries, read_manifest, FeatureViews};
use crate::error::{invalid, CliResult};
use crate::{resolved, write_file, Output, TrainerArgs};

#[derive(Debug, Clone, Args)]
pub struct AblateArgs {
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub train_features: PathBuf,
    #[arg(long)]
    pub train_seg_features: PathBuf,
    /// Test manifest holding `test_query` and `test_gallery` records.
    #[arg(long)]
    pub test: PathBuf,
    #[arg(long)]
    pub test_features: PathBuf,
    #[arg(long)]
    pub test_seg_features: PathBuf,
    /// Comma-separated protocol variants, or `none`.
    #[arg(long, default_value = "baseline,seg,seg-post,trains-testn")]
    pub variants: String,
    /// Random-k grid as `start:end:step`, or `none`.
    #[arg(long, default_value = "none")]
    pub k_grid: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[command(flatten)]
    pub trainer: TrainerArgs,
    #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true")]
    pub exclude_same_camera: bool,
    /// Machine-readable report to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn parse_variants(s: &str) -> CliResult<Vec<Protocol>> {
    let s = s.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    s.split(',')
        .map(|v| v.parse::<Protocol>().map_err(invalid))
        .collect()
}

/// `start:end:step` with an inclusive end, e.g. `0.1:0.9:0.1` → 0.1 … 0.9.
pub fn parse_k_grid(s: &str) -> CliResult<Vec<f64>> {
    let s = s.trim();
    if s.is_empty() || s.eq_ignore_ascii_case("none") {
        return Ok(Vec::new());
    }
    let parts: Vec<f64> = s
        .split(':')
        .map(|p| {
            p.trim()
                .parse::<f64>()
                .map_err(|e| invalid(format!("k grid `{s}`: {e}")))
        })
        .collect::<CliResult<_>>()?;
    let (start, end, step) = match parts[..] {
        [single] => (single, single, 1.0),
        [start, end, step] => (start, end, step),
        _ => return Err(invalid(format!("k grid `{s}`: expected start:end:step"))),
    };
    if step.is_nan() || step <= 0.0 || start.is_nan() || end.is_nan() || start > end {
        return Err(invalid(format!(
            "k grid `{s}`: need step > 0 and start <= end"
        )));
    }
    let n = ((end - start) / step + 1e-9).floor() as usize + 1;
    let grid: Vec<f64> = (0..n)
        .map(|i| ((start + i as f64 * step) * 1e9).round() / 1e9)
        .collect();
    if let Some(bad) = grid.iter().find(|k| !(0.0..=1.0).contains(*k)) {
        return Err(invalid(format!("k grid `{s}`: {bad} is not in [0, 1]")));
    }
    Ok(grid)
}

struct Context {
    train: Manifest,
    test: Manifest,
    train_views: FeatureViews,
    test_views: FeatureViews,
}

fn run_row(
    ctx: &Context,
    protocol: Protocol,
    seed: u64,
    args: &AblateArgs,
) -> Result<EvalResult<f64>, String> {
    let text = |e: bir_core::Error| e.to_string();
    let (train, test) = assemble_protocol(protocol, &ctx.train, &ctx.test, seed).map_err(text)?;
    let train_data = ctx.train_views.dataset(&train).map_err(text)?;
    let config = args.trainer.config(seed).map_err(|e| e.to_string())?;
    let model = train_toy(&train_data, &config).map_err(text)?.model;
    let queries = ctx
        .test_views
        .dataset(&test.split(Split::TestQuery))
        .map_err(text)?;
    let gallery = ctx
        .test_views
        .dataset(&test.split(Split::TestGallery))
        .map_err(text)?;
    let options = EvalOptions {
        exclude_same_camera: args.exclude_same_camera,
        ..EvalOptions::default()
    };
    evaluate(
        &embed_entries(&model, &queries).map_err(text)?,
        &embed_entries(&model, &gallery).map_err(text)?,
        &options,
    )
    .map_err(text)
}

pub fn run(args: &AblateArgs) -> CliResult<Output> {
    let mut rows = parse_variants(&args.variants)?;
    let grid = parse_k_grid(&args.k_grid)?;
    rows.extend(grid.iter().map(|&k| Protocol::RandomK(k)));
    if rows.is_empty() {
        return Err(invalid(
            "no rows requested: give --variants and/or --k-grid",
        ));
    }
    args.trainer.config(args.seed)?;

    let ctx = Context {
        train: read_manifest(&args.train)?,
        test: read_manifest(&args.test)?,
        train_views: FeatureViews::load(&args.train_features, Some(&args.train_seg_features))?,
        test_views: FeatureViews::load(&args.test_features, Some(&args.test_seg_features))?,
    };
    if ctx.test.split(Split::TestQuery).is_empty() || ctx.test.split(Split::TestGallery).is_empty()
    {
        return Err(invalid(format!(
            "{}: test manifest needs test_query and test_gallery records",
            args.test.display()
        )));
    }
    // Every view must cover every record before any row runs.
    for (views, manifest, name) in [
        (&ctx.train_views, &ctx.train, "train"),
        (&ctx.test_views, &ctx.test, "test"),
    ] {
        views
            .original
            .aligned_to(manifest)
            .map_err(|e| invalid(format!("{name} features: {e}")))?;
        if let Some(seg) = &views.segmented {
            seg.aligned_to(manifest)
                .map_err(|e| invalid(format!("{name} segmented features: {e}")))?;
        }
    }

    let results: Vec<Result<EvalResult<f64>, String>> = rows
        .par_iter()
        .enumerate()
        .map(|(i, &protocol)| run_row(&ctx, protocol, derive_seed(args.seed, i as u64), args))
        .collect();

    let only_k = rows.iter().all(|r| matches!(r, Protocol::RandomK(_)));
    let any_k = rows.iter().any(|r| matches!(r, Protocol::RandomK(_)));
    let mut report = match (only_k, any_k) {
        (true, _) => Report::new("Results(%) of BIR experiment", "k"),
        (false, true) => Report::new("Results(%) of BIR experiment", "Method / k"),
        (false, false) => Report::new("Results(%) of ablation experiment", "Method"),
    };
    let mut failures = Vec::new();
    for (protocol, result) in rows.iter().zip(&results) {
        match result {
            Ok(r) => report.push(protocol.label(), r),
            Err(e) => failures.push((protocol.label(), e.replace(['\t', '\n'], " "))),
        }
    }

    let mut machine = report.to_machine().map_err(invalid)?;
    let mut stderr = String::new();
    for (label, msg) in &failures {
        writeln!(machine, "# failed\t{label}\t{msg}").unwrap();
        writeln!(stderr, "row {label} failed: {msg}").unwrap();
    }
    if let Some(out) = &args.out {
        write_file(&resolved(out), &machine)?;
    }
    Ok(Output {
        stdout: report.render_table(),
        stderr,
        code: if failures.is_empty() { 0 } else { 2 },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn k_grid_parsing() {
        let g = parse_k_grid("0.1:0.9:0.1").unwrap();
        assert_eq!(g, vec![0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9]);
        assert_eq!(parse_k_grid("0.2").unwrap(), vec![0.2]);
        assert!(parse_k_grid("none").unwrap().is_empty());
        assert!(parse_k_grid("0.5:1.5:0.5").is_err());
        assert!(parse_k_grid("0.1:0.9:0").is_err());
        assert!(parse_k_grid("0.9:0.1:0.1").is_err());
        assert!(parse_k_grid("a:b").is_err());
    }

    #[test]
    fn variant_parsing() {
        assert_eq!(
            parse_variants("baseline,seg,seg-post,trains-testn").unwrap(),
            vec![
                Protocol::Baseline,
                Protocol::Seg,
                Protocol::SegPost,
                Protocol::TrainSTestN
            ]
        );
        assert!(parse_variants("none").unwrap().is_empty());
        assert!(parse_variants("baseline,bogus").is_err());
    }
}
