use std::path::PathBuf;

use bir_core::dataset::Split;
use bir_core::eval::{evaluate, EvalOptions, Report};
use bir_core::metric::EmbeddingModel;
use clap::Args;

use crate::data::{embed_entries, read_manifest, split_or_all, FeatureViews};
use crate::error::{invalid, runtime, CliResult};
use crate::{resolved, write_file, Output};

#[derive(Debug, Clone, Args)]
pub struct EvalArgs {
    /// Model file written by `train`.
    #[arg(long)]
    pub model: PathBuf,
    /// Query manifest; if it has `test_query` records only those are used.
    #[arg(long)]
    pub query: PathBuf,
    #[arg(long)]
    pub query_features: PathBuf,
    #[arg(long)]
    pub query_seg_features: Option<PathBuf>,
    /// Gallery manifest; if it has `test_gallery` records only those are used.
    #[arg(long)]
    pub gallery: PathBuf,
    #[arg(long)]
    pub gallery_features: PathBuf,
    #[arg(long)]
    pub gallery_seg_features: Option<PathBuf>,
    /// Drop gallery images of the query's identity taken by the query's camera.
    #[arg(long, num_args = 0..=1, default_value_t = true, default_missing_value = "true")]
    pub exclude_same_camera: bool,
    /// Row label in the report.
    #[arg(long, default_value = "model")]
    pub label: String,
    /// Machine-readable report to write.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

pub fn run(args: &EvalArgs) -> CliResult<Output> {
    let model_path = resolved(&args.model);
    let model = EmbeddingModel::<f64>::read(&model_path).map_err(invalid)?;
    let query_manifest = split_or_all(&read_manifest(&args.query)?, Split::TestQuery);
    let gallery_manifest = split_or_all(&read_manifest(&args.gallery)?, Split::TestGallery);
    let query_views = FeatureViews::load(&args.query_features, args.query_seg_features.as_deref())?;
    let gallery_views =
        FeatureViews::load(&args.gallery_features, args.gallery_seg_features.as_deref())?;
    let queries = query_views.dataset(&query_manifest).map_err(invalid)?;
    let gallery = gallery_views.dataset(&gallery_manifest).map_err(invalid)?;
    if queries.dim() != model.d_in() || gallery.dim() != model.d_in() {
        return Err(invalid(format!(
            "model expects {}-d inputs, features are {}-d / {}-d",
            model.d_in(),
            queries.dim(),
            gallery.dim()
        )));
    }
    if args.label.is_empty() || args.label.contains(['\t', '\n']) {
        return Err(invalid("label must be non-empty without tabs"));
    }

    let options = EvalOptions {
        exclude_same_camera: args.exclude_same_camera,
        ..EvalOptions::default()
    };
    let q = embed_entries(&model, &queries).map_err(runtime)?;
    let g = embed_entries(&model, &gallery).map_err(runtime)?;
    let result = evaluate(&q, &g, &options).map_err(runtime)?;

    let mut report = Report::new("Results(%) of evaluation", "Method");
    report.push(args.label.clone(), &result);
    if let Some(out) = &args.out {
        write_file(&resolved(out), report.to_machine().map_err(runtime)?)?;
    }
    let mut stdout = report.render_table();
    stdout.push_str(&format!(
        "queries={} skipped={}\n",
        result.num_queries, result.skipped_queries
    ));
    Ok(Output {
        stdout,
        ..Output::default()
    })
}
