use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::Rng;

use super::Dataset;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// P identities × K samples, grouped by identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Batch<T> {
    pub inputs: Vec<Vec<T>>,
    pub labels: Vec<u64>,
    /// Dataset index of each batch entry.
    pub indices: Vec<usize>,
}

impl<T> Batch<T> {
    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }
}

/// Picks `p` distinct identities, then `k` items of each.
///
/// Identities with fewer than `k` items contribute every item once and
/// fill the remainder by drawing with replacement.
pub fn sample_pk_indices<R: Rng + ?Sized>(
    labels: &[u64],
    p: usize,
    k: usize,
    rng: &mut R,
) -> Result<Vec<usize>> {
    if p == 0 || k == 0 {
        return Err(Error::param(
            "P/K",
            format!("P={p}, K={k} must be positive"),
        ));
    }
    let mut groups: BTreeMap<u64, Vec<usize>> = BTreeMap::new();
    for (i, &l) in labels.iter().enumerate() {
        groups.entry(l).or_default().push(i);
    }
    if groups.len() < p {
        return Err(Error::NotEnoughIdentities {
            needed: p,
            available: groups.len(),
        });
    }
    let identities: Vec<u64> = groups.keys().copied().collect();
    let chosen: Vec<u64> = identities.choose_multiple(rng, p).copied().collect();

    let mut out = Vec::with_capacity(p * k);
    for id in chosen {
        let members = &groups[&id];
        let mut picks: Vec<usize> = if members.len() >= k {
            members.choose_multiple(rng, k).copied().collect()
        } else {
            let mut picks = members.clone();
            while picks.len() < k {
                picks.push(*members.choose(rng).expect("non-empty group"));
            }
            picks.shuffle(rng);
            picks
        };
        out.append(&mut picks);
    }
    Ok(out)
}

pub fn sample_pk_batch<T: Scalar, R: Rng + ?Sized>(
    dataset: &Dataset<T>,
    p: usize,
    k: usize,
    rng: &mut R,
) -> Result<Batch<T>> {
    let indices = sample_pk_indices(dataset.labels(), p, k, rng)?;
    Ok(Batch {
        inputs: indices
            .iter()
            .map(|&i| dataset.inputs()[i].clone())
            .collect(),
        labels: indices.iter().map(|&i| dataset.labels()[i]).collect(),
        indices,
    })
}
