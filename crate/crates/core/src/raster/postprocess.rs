use super::{fill_holes, keep_largest_component, BinaryMask};
use crate::error::{Error, Result};

/// Minimum vehicle share of the picture for a segmentation to be kept.
pub const DEFAULT_AREA_THRESHOLD: f64 = 0.60;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum DiscardReason {
    /// Nothing was left after post-processing.
    HoleOnly,
    /// The vehicle covered less than the threshold; carries the measured ratio.
    BelowAreaThreshold { ratio: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum PostprocessOutcome {
    Kept { mask: BinaryMask, ratio: f64 },
    Discarded(DiscardReason),
}

impl PostprocessOutcome {
    pub fn is_kept(&self) -> bool {
        matches!(self, PostprocessOutcome::Kept { .. })
    }

    pub fn mask(&self) -> Option<&BinaryMask> {
        match self {
            PostprocessOutcome::Kept { mask, .. } => Some(mask),
            PostprocessOutcome::Discarded(_) => None,
        }
    }

    /// Final vehicle ratio; zero for [`DiscardReason::HoleOnly`].
    pub fn ratio(&self) -> f64 {
        match self {
            PostprocessOutcome::Kept { ratio, .. } => *ratio,
            PostprocessOutcome::Discarded(DiscardReason::BelowAreaThreshold { ratio }) => *ratio,
            PostprocessOutcome::Discarded(DiscardReason::HoleOnly) => 0.0,
        }
    }
}

/// Vehicle pixels over total pixels.
pub fn area_ratio(mask: &BinaryMask) -> f64 {
    mask.vehicle_count() as f64 / mask.len() as f64
}

/// Hole filling, largest-component retention, then the area gate.
///
/// A ratio exactly at `threshold` is kept.
pub fn postprocess(mask: &BinaryMask, threshold: f64) -> Result<PostprocessOutcome> {
    if !(0.0..=1.0).contains(&threshold) {
        return Err(Error::param(
            "threshold",
            format!("{threshold} not in [0, 1]"),
        ));
    }
    let filled = fill_holes(mask);
    let largest = keep_largest_component(&filled);
    if largest.vehicle_count() == 0 {
        return Ok(PostprocessOutcome::Discarded(DiscardReason::HoleOnly));
    }
    let ratio = area_ratio(&largest);
    if ratio < threshold {
        Ok(PostprocessOutcome::Discarded(
            DiscardReason::BelowAreaThreshold { ratio },
        ))
    } else {
        Ok(PostprocessOutcome::Kept {
            mask: largest,
            ratio,
        })
    }
}
