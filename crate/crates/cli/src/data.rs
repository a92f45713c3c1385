//! Joining manifests with feature files.

use std::path::Path;

use bir_core::dataset::{ImageRecord, Manifest, Split, Variant};
use bir_core::eval::GalleryEntry;
use bir_core::io::FeatureTable;
use bir_core::metric::{Dataset, EmbeddingModel};

use crate::config::resolve;
use crate::error::{invalid, CliResult};

/// Original view plus an optional segmented view of the same images.
#[derive(Debug, Clone)]
pub struct FeatureViews {
    pub original: FeatureTable,
    pub segmented: Option<FeatureTable>,
}

pub fn read_features(path: &Path) -> CliResult<FeatureTable> {
    FeatureTable::read(&resolve(path)).map_err(invalid)
}

pub fn read_manifest(path: &Path) -> CliResult<Manifest> {
    Manifest::read(&resolve(path)).map_err(invalid)
}

impl FeatureViews {
    pub fn load(original: &Path, segmented: Option<&Path>) -> CliResult<Self> {
        Ok(Self {
            original: read_features(original)?,
            segmented: segmented.map(read_features).transpose()?,
        })
    }

    /// One input per record, taken from the view its variant selects.
    pub fn dataset(&self, manifest: &Manifest) -> bir_core::Result<Dataset<f64>> {
        let original = self.original.aligned_to(manifest)?;
        let segmented = self
            .segmented
            .as_ref()
            .map(|t| t.aligned_to(manifest))
            .transpose()?;
        let mut inputs = Vec::with_capacity(manifest.len());
        for (i, record) in manifest.records.iter().enumerate() {
            let row = match (record.variant, &segmented) {
                (Variant::Original, _) => original[i].clone(),
                (Variant::Segmented, Some(seg)) => seg[i].clone(),
                (Variant::Segmented, None) => {
                    return Err(bir_core::Error::InvalidData(format!(
                        "`{}` is Segmented but no segmented features were given",
                        record.image_path
                    )))
                }
            };
            inputs.push(row);
        }
        Dataset::new(
            inputs,
            manifest.records.iter().map(|r| r.identity).collect(),
            manifest.records.iter().map(|r| r.camera).collect(),
        )
    }
}

/// Manifest implied by the id columns of a text feature file.
pub fn manifest_from_keys(table: &FeatureTable) -> CliResult<Manifest> {
    let keys = table
        .keys
        .as_ref()
        .ok_or_else(|| invalid("binary feature files need --manifest to supply identities"))?;
    let records = keys
        .iter()
        .map(|k| ImageRecord::new(k.image_path.clone(), k.identity, k.camera, Split::Train))
        .collect();
    Ok(Manifest::new(records, 0))
}

/// Records of `split` if the manifest has any, otherwise all of them.
pub fn split_or_all(manifest: &Manifest, split: Split) -> Manifest {
    let part = manifest.split(split);
    if part.is_empty() {
        manifest.clone()
    } else {
        part
    }
}

pub fn embed_entries(
    model: &EmbeddingModel<f64>,
    data: &Dataset<f64>,
) -> bir_core::Result<Vec<GalleryEntry<f64>>> {
    data.inputs()
        .iter()
        .zip(data.labels())
        .zip(data.cameras())
        .map(|((x, &id), &cam)| Ok(GalleryEntry::new(model.embed(x)?, id, cam)))
        .collect()
}
