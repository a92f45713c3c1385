use std::path::{Path, PathBuf};

use bir_core::dataset::{derive_seed, ImageRecord, Manifest, SegAvailability, Split};
use bir_core::io::{FeatureKey, FeatureTable};
use bir_core::metric::Dataset;
use bir_core::synthetic::{ClusterSpec, CorpusSpec};
use clap::{Args, ValueEnum};

use crate::error::{invalid, CliResult};
use crate::{parse_fraction, resolved, write_file, Output};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Preset {
    /// Original/segmented views with camera-dependent background interference.
    Corpus,
    /// Well-separated Gaussian clusters; both views identical.
    Clusters,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FeatureFormat {
    Text,
    Binary,
}

#[derive(Debug, Clone, Args)]
pub struct SynthArgs {
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, value_enum, default_value_t = Preset::Corpus)]
    pub preset: Preset,
    #[arg(long, value_enum, default_value_t = FeatureFormat::Text)]
    pub format: FeatureFormat,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 20)]
    pub train_ids: usize,
    #[arg(long, default_value_t = 10)]
    pub test_ids: usize,
    #[arg(long, default_value_t = 12)]
    pub images_per_id: usize,
    /// Share of images whose segmentation fails the area gate (corpus preset).
    #[arg(long, default_value_t = 0.2, value_parser = parse_fraction)]
    pub failure_rate: f64,
}

fn write_table(
    dir: &Path,
    stem: &str,
    table: &FeatureTable,
    format: FeatureFormat,
) -> CliResult<()> {
    match format {
        FeatureFormat::Text => write_file(
            &dir.join(format!("{stem}.csv")),
            table.to_text().map_err(invalid)?,
        ),
        FeatureFormat::Binary => write_file(&dir.join(format!("{stem}.bin")), table.to_binary()),
    }
}

fn cluster_split(data: &Dataset<f64>, prefix: &str, test: bool) -> (Manifest, FeatureTable) {
    let mut records = Vec::new();
    let mut keys = Vec::new();
    let mut seen = std::collections::BTreeMap::<u64, usize>::new();
    for (i, (&id, &cam)) in data.labels().iter().zip(data.cameras()).enumerate() {
        let n = seen.entry(id).or_default();
        let split = match (test, *n) {
            (false, _) => Split::Train,
            (true, 0 | 1) => Split::TestQuery,
            (true, _) => Split::TestGallery,
        };
        *n += 1;
        let path = format!("{prefix}/{id:04}_{i:05}.png");
        let mut record = ImageRecord::new(path.clone(), id, cam, split);
        record.availability = SegAvailability::Kept;
        records.push(record);
        keys.push(FeatureKey {
            image_path: path,
            identity: id,
            camera: cam,
        });
    }
    let table =
        FeatureTable::new(data.dim(), data.inputs().to_vec(), Some(keys)).expect("consistent rows");
    (Manifest::new(records, 0), table)
}

pub fn run(args: &SynthArgs) -> CliResult<Output> {
    let dir = resolved(&args.out);
    let (train, test, tr_o, tr_s, te_o, te_s) = match args.preset {
        Preset::Corpus => {
            let spec = CorpusSpec {
                train_identities: args.train_ids,
                test_identities: args.test_ids,
                images_per_identity: args.images_per_id,
                failure_rate: args.failure_rate,
                seed: args.seed,
                ..CorpusSpec::default()
            };
            let c = spec.generate().map_err(invalid)?;
            (
                c.train,
                c.test,
                c.train_original,
                c.train_segmented,
                c.test_original,
                c.test_segmented,
            )
        }
        Preset::Clusters => {
            let spec = ClusterSpec {
                identities: args.train_ids,
                samples_per_identity: args.images_per_id,
                seed: args.seed,
                ..ClusterSpec::default()
            };
            let train = spec.generate::<f64>().map_err(invalid)?;
            let test = ClusterSpec {
                seed: derive_seed(args.seed, 1),
                ..spec
            }
            .generate::<f64>()
            .map_err(invalid)?;
            let (m_train, t_train) = cluster_split(&train, "train", false);
            let (m_test, t_test) = cluster_split(&test, "test", true);
            (
                m_train,
                m_test,
                t_train.clone(),
                t_train,
                t_test.clone(),
                t_test,
            )
        }
    };
    let (mut train, mut test) = (train, test);
    train.seed = args.seed;
    test.seed = args.seed;
    write_file(&dir.join("train.tsv"), train.to_text())?;
    write_file(&dir.join("test.tsv"), test.to_text())?;
    write_table(&dir, "train_original", &tr_o, args.format)?;
    write_table(&dir, "train_segmented", &tr_s, args.format)?;
    write_table(&dir, "test_original", &te_o, args.format)?;
    write_table(&dir, "test_segmented", &te_s, args.format)?;
    Ok(Output {
        stdout: format!(
            "train={} test={} dim={} dir={}\n",
            train.len(),
            test.len(),
            tr_o.dim,
            dir.display()
        ),
        ..Output::default()
    })
}
