use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Manifest, SegAvailability, Variant};
use crate::error::{Error, Result};
use crate::raster::PostprocessOutcome;

/// Whether post-processing kept a record's segmentation.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MaskVerdict {
    Kept,
    Discarded,
}

impl From<&PostprocessOutcome> for MaskVerdict {
    fn from(outcome: &PostprocessOutcome) -> Self {
        if outcome.is_kept() {
            MaskVerdict::Kept
        } else {
            MaskVerdict::Discarded
        }
    }
}

/// Marks each record as Segmented-capable or as an Original fallback.
///
/// Variants are left untouched; only the availability changes. Every record
/// must resolve in `lookup`.
pub fn pair_segmented<F>(manifest: &Manifest, lookup: F) -> Result<Manifest>
where
    F: Fn(&str) -> Option<MaskVerdict>,
{
    let mut out = manifest.clone();
    for record in &mut out.records {
        let verdict = lookup(&record.image_path)
            .ok_or_else(|| Error::MissingMask(record.image_path.clone()))?;
        record.availability = match verdict {
            MaskVerdict::Kept => SegAvailability::Kept,
            MaskVerdict::Discarded => {
                record.variant = Variant::Original;
                SegAvailability::Discarded
            }
        };
    }
    Ok(out)
}

/// Bernoulli draw for record `index`, independent of every other record.
fn draw(seed: u64, index: usize) -> f64 {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index as u64);
    rng.gen::<f64>()
}

/// Sets each Segmented-capable record to Segmented with probability `k`.
///
/// Records without a kept segmentation become Original. The draw for record
/// `i` depends only on `(seed, i)`. The output manifest records `seed`.
pub fn mix_random_selection(manifest: &Manifest, k: f64, seed: u64) -> Result<Manifest> {
    if !(0.0..=1.0).contains(&k) {
        return Err(Error::param("k", format!("{k} not in [0, 1]")));
    }
    let mut out = manifest.clone();
    out.seed = seed;
    for (i, record) in out.records.iter_mut().enumerate() {
        record.variant = if record.segmented_capable() && draw(seed, i) < k {
            Variant::Segmented
        } else {
            Variant::Original
        };
    }
    Ok(out)
}
