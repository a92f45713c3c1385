use std::collections::BTreeMap;

use super::{pairwise_distances, FeatureVector};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// How per-anchor hinges are aggregated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Reduction {
    /// Sum over all anchors.
    #[default]
    Sum,
    /// Sum divided by the number of anchors.
    Mean,
}

impl Reduction {
    pub(crate) fn scale<T: Scalar>(self, anchors: usize) -> T {
        match self {
            Reduction::Sum => T::one(),
            Reduction::Mean => T::one() / T::of(anchors as f64),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BatchHardLoss<T> {
    /// Summed hinge over all anchors.
    pub loss: T,
    /// `[d(a, p*) - d(a, n*) + m]+` for each anchor.
    pub per_anchor: Vec<T>,
    /// `(hardest positive, hardest negative)` index per anchor.
    pub hardest: Vec<(usize, usize)>,
}

impl<T: Scalar> BatchHardLoss<T> {
    pub fn reduced(&self, reduction: Reduction) -> T {
        self.loss * reduction.scale(self.per_anchor.len())
    }

    pub fn active_anchors(&self) -> usize {
        self.per_anchor.iter().filter(|&&h| h > T::zero()).count()
    }
}

pub(crate) fn check_labels(labels: &[u64]) -> Result<()> {
    let mut counts = BTreeMap::new();
    for &l in labels {
        *counts.entry(l).or_insert(0usize) += 1;
    }
    if let Some((&label, _)) = counts.iter().find(|(_, &c)| c < 2) {
        return Err(Error::SingletonLabel(label));
    }
    if counts.len() < 2 {
        return Err(Error::SingleIdentity);
    }
    Ok(())
}

/// Batch-hard triplet loss with non-squared Euclidean distance.
///
/// For each anchor the farthest same-label sample (anchor excluded) and the
/// nearest different-label sample are selected, lowest index winning ties.
pub fn batch_hard_loss<T: Scalar>(
    features: &[FeatureVector<T>],
    labels: &[u64],
    margin: T,
) -> Result<BatchHardLoss<T>> {
    if features.len() != labels.len() {
        return Err(Error::dims(features.len(), labels.len()));
    }
    check_labels(labels)?;
    let dist = pairwise_distances(features)?;
    let n = labels.len();

    let mut loss = T::zero();
    let mut per_anchor = Vec::with_capacity(n);
    let mut hardest = Vec::with_capacity(n);
    for a in 0..n {
        let row = dist.row(a);
        let mut pos: Option<usize> = None;
        let mut neg: Option<usize> = None;
        for j in 0..n {
            if j == a {
                continue;
            }
            if labels[j] == labels[a] {
                if pos.is_none_or(|p| row[j] > row[p]) {
                    pos = Some(j);
                }
            } else if neg.is_none_or(|q| row[j] < row[q]) {
                neg = Some(j);
            }
        }
        let (p, q) = (pos.expect("label checked"), neg.expect("labels checked"));
        let hinge = (row[p] - row[q] + margin).max(T::zero());
        loss = loss + hinge;
        per_anchor.push(hinge);
        hardest.push((p, q));
    }
    Ok(BatchHardLoss {
        loss,
        per_anchor,
        hardest,
    })
}
