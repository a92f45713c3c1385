//! Background interference removal (BIR) for vehicle re-identification.
//!
//! The crate is split along the pipeline:
//!
//! * [`raster`] post-processes binary segmentation masks (hole filling,
//!   largest-component retention, the area gate) and composites the
//!   background-removed image.
//! * [`dataset`] builds manifests, filters detector crops, pairs records
//!   with their segmented variants and mixes variants with probability `k`.
//! * [`metric`] samples PK batches and trains a linear embedding with the
//!   batch-hard triplet loss.
//! * [`eval`] ranks galleries and computes mAP / CMC and the result tables.
//! * [`io`] reads and writes mask rasters and feature files.
//!
//! The numeric core is generic over the scalar type through [`Scalar`];
//! the aliases below fix it to `f64`, which is what the command line uses.

pub mod dataset;
pub mod error;
pub mod eval;
pub mod io;
pub mod metric;
pub mod raster;
pub mod scalar;
pub mod synthetic;

pub use error::{Error, Result};
pub use scalar::Scalar;

pub type FeatureVector64 = metric::FeatureVector<f64>;
pub type FeatureVector32 = metric::FeatureVector<f32>;
pub type EmbeddingModel64 = metric::EmbeddingModel<f64>;
pub type EmbeddingModel32 = metric::EmbeddingModel<f32>;
pub type TrainConfig64 = metric::TrainConfig<f64>;
pub type Dataset64 = metric::Dataset<f64>;
pub type EvalResult64 = eval::EvalResult<f64>;
