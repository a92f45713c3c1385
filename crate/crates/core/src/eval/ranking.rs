use std::cmp::Ordering;

use crate::error::{Error, Result};
use crate::metric::{euclidean, FeatureVector};
use crate::scalar::Scalar;

/// A probe or gallery item: embedding plus identity and camera.
#[derive(Debug, Clone, PartialEq)]
pub struct GalleryEntry<T> {
    pub feature: FeatureVector<T>,
    pub identity: u64,
    pub camera: u32,
}

impl<T> GalleryEntry<T> {
    pub fn new(feature: FeatureVector<T>, identity: u64, camera: u32) -> Self {
        Self {
            feature,
            identity,
            camera,
        }
    }
}

/// Admissible gallery indices in ascending distance, ties by index.
#[derive(Debug, Clone, PartialEq)]
pub struct RankedList<T> {
    pub order: Vec<usize>,
    pub distances: Vec<T>,
}

impl<T> RankedList<T> {
    pub fn len(&self) -> usize {
        self.order.len()
    }

    pub fn is_empty(&self) -> bool {
        self.order.is_empty()
    }
}

/// Ranks the gallery for one query.
///
/// With `exclude_same_camera`, entries sharing both the query's identity and
/// camera are dropped before ranking.
pub fn rank_gallery<T: Scalar>(
    query: &GalleryEntry<T>,
    gallery: &[GalleryEntry<T>],
    exclude_same_camera: bool,
) -> Result<RankedList<T>> {
    let mut scored = Vec::with_capacity(gallery.len());
    for (i, g) in gallery.iter().enumerate() {
        if g.feature.dim() != query.feature.dim() {
            return Err(Error::dims(query.feature.dim(), g.feature.dim()));
        }
        if exclude_same_camera && g.identity == query.identity && g.camera == query.camera {
            continue;
        }
        scored.push((euclidean(query.feature.values(), g.feature.values()), i));
    }
    if scored.is_empty() {
        return Err(Error::EmptyGallery);
    }
    scored.sort_by(|a, b| {
        a.0.partial_cmp(&b.0)
            .unwrap_or(Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    Ok(RankedList {
        order: scored.iter().map(|s| s.1).collect(),
        distances: scored.iter().map(|s| s.0).collect(),
    })
}
