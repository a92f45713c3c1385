//! On-disk formats: mask/image rasters and feature files.

mod features;
mod raster;

pub use features::{FeatureKey, FeatureTable, FEATURE_MAGIC, FEATURE_VERSION};
pub use raster::{read_mask, read_rgb, write_mask, write_rgb};
