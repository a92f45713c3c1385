use std::collections::BTreeMap;

use super::{rank_gallery, GalleryEntry};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

pub const DEFAULT_RANKS: [usize; 3] = [1, 5, 10];

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct EvalOptions {
    /// Drop gallery entries with the query's identity and camera.
    pub exclude_same_camera: bool,
    /// CMC ranks to report.
    pub ranks: Vec<usize>,
}

impl Default for EvalOptions {
    fn default() -> Self {
        Self {
            exclude_same_camera: true,
            ranks: DEFAULT_RANKS.to_vec(),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EvalResult<T> {
    pub map: T,
    pub cmc: BTreeMap<usize, T>,
    /// Queries that had at least one relevant gallery entry.
    pub num_queries: usize,
    /// Queries without any relevant admissible entry, left out of the means.
    pub skipped_queries: usize,
}

impl<T: Scalar> EvalResult<T> {
    pub fn top(&self, rank: usize) -> Option<T> {
        self.cmc.get(&rank).copied()
    }
}

/// Non-interpolated average precision of relevance flags in rank order.
pub fn average_precision<T: Scalar>(relevance: &[bool]) -> Result<T> {
    let total = relevance.iter().filter(|&&r| r).count();
    if total == 0 {
        return Err(Error::NoRelevant);
    }
    let mut hits = 0usize;
    let mut sum = T::zero();
    for (i, _) in relevance.iter().enumerate().filter(|(_, &r)| r) {
        hits += 1;
        sum = sum + T::of(hits as f64) / T::of((i + 1) as f64);
    }
    Ok(sum / T::of(total as f64))
}

/// mAP and CMC over all scorable queries.
pub fn evaluate<T: Scalar>(
    queries: &[GalleryEntry<T>],
    gallery: &[GalleryEntry<T>],
    options: &EvalOptions,
) -> Result<EvalResult<T>> {
    if queries.is_empty() || gallery.is_empty() {
        return Err(Error::InvalidData("empty query or gallery set".into()));
    }
    let mut ap_sum = T::zero();
    let mut first_hits = Vec::with_capacity(queries.len());
    let mut skipped = 0;
    for query in queries {
        let ranked = match rank_gallery(query, gallery, options.exclude_same_camera) {
            Ok(r) => r,
            Err(Error::EmptyGallery) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        };
        let relevance: Vec<bool> = ranked
            .order
            .iter()
            .map(|&g| gallery[g].identity == query.identity)
            .collect();
        match average_precision::<T>(&relevance) {
            Ok(ap) => ap_sum = ap_sum + ap,
            Err(Error::NoRelevant) => {
                skipped += 1;
                continue;
            }
            Err(e) => return Err(e),
        }
        first_hits.push(relevance.iter().position(|&r| r).expect("has relevant") + 1);
    }
    let scored = first_hits.len();
    if scored == 0 {
        return Err(Error::NoScorableQueries);
    }
    let denom = T::of(scored as f64);
    let cmc = options
        .ranks
        .iter()
        .map(|&r| {
            let within = first_hits.iter().filter(|&&h| h <= r).count();
            (r, T::of(within as f64) / denom)
        })
        .collect();
    Ok(EvalResult {
        map: ap_sum / denom,
        cmc,
        num_queries: scored,
        skipped_queries: skipped,
    })
}
