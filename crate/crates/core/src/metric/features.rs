use std::ops::Index;

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Embedding of one image; every entry is finite.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureVector<T>(Vec<T>);

impl<T: Scalar> FeatureVector<T> {
    pub fn new(values: Vec<T>) -> Result<Self> {
        if let Some(bad) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::InvalidData(format!(
                "non-finite feature entry at {bad}"
            )));
        }
        Ok(Self(values))
    }

    pub(crate) fn from_trusted(values: Vec<T>) -> Self {
        Self(values)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn values(&self) -> &[T] {
        &self.0
    }

    pub fn into_values(self) -> Vec<T> {
        self.0
    }

    pub fn norm(&self) -> T {
        self.0.iter().map(|&v| v * v).sum::<T>().sqrt()
    }
}

impl<T> Index<usize> for FeatureVector<T> {
    type Output = T;

    fn index(&self, i: usize) -> &T {
        &self.0[i]
    }
}

/// Non-squared Euclidean distance.
pub fn euclidean<T: Scalar>(a: &[T], b: &[T]) -> T {
    a.iter()
        .zip(b)
        .map(|(&x, &y)| (x - y) * (x - y))
        .sum::<T>()
        .sqrt()
}

/// Dense symmetric distance matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix<T> {
    n: usize,
    data: Vec<T>,
}

impl<T: Scalar> DistanceMatrix<T> {
    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    pub fn get(&self, i: usize, j: usize) -> T {
        self.data[i * self.n + j]
    }

    pub fn row(&self, i: usize) -> &[T] {
        &self.data[i * self.n..(i + 1) * self.n]
    }
}

pub fn pairwise_distances<T: Scalar>(features: &[FeatureVector<T>]) -> Result<DistanceMatrix<T>> {
    let n = features.len();
    if let Some(first) = features.first() {
        if let Some(bad) = features.iter().find(|f| f.dim() != first.dim()) {
            return Err(Error::dims(first.dim(), bad.dim()));
        }
    }
    let mut data = vec![T::zero(); n * n];
    for i in 0..n {
        for j in i + 1..n {
            let d = euclidean(features[i].values(), features[j].values());
            data[i * n + j] = d;
            data[j * n + i] = d;
        }
    }
    Ok(DistanceMatrix { n, data })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn fv(v: &[f64]) -> FeatureVector<f64> {
        FeatureVector::new(v.to_vec()).unwrap()
    }

    #[test]
    fn rejects_non_finite() {
        assert!(FeatureVector::new(vec![1.0, f64::NAN]).is_err());
        assert!(FeatureVector::new(vec![f32::INFINITY]).is_err());
    }

    #[test]
    fn simple_distances() {
        let d = pairwise_distances(&[fv(&[0.0]), fv(&[3.0]), fv(&[3.0])]).unwrap();
        assert_eq!(d.get(0, 1), 3.0);
        assert_eq!(d.get(1, 0), 3.0);
        assert_eq!(d.get(1, 2), 0.0);
        assert_eq!(d.get(2, 2), 0.0);
    }

    #[test]
    fn dimension_mismatch() {
        assert!(pairwise_distances(&[fv(&[0.0]), fv(&[1.0, 2.0])]).is_err());
    }

    #[test]
    fn matches_naive_double_loop() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(1);
        let feats: Vec<_> = (0..8)
            .map(|_| {
                fv(&(0..16)
                    .map(|_| rng.gen_range(-3.0..3.0))
                    .collect::<Vec<_>>())
            })
            .collect();
        let d = pairwise_distances(&feats).unwrap();
        for i in 0..8 {
            for j in 0..8 {
                let mut acc = 0.0f64;
                for c in 0..16 {
                    acc += (feats[i][c] - feats[j][c]).powi(2);
                }
                let naive = acc.sqrt();
                let got = d.get(i, j);
                assert!((got - naive).abs() <= 1e-12 * naive.max(1e-300), "{i},{j}");
                assert_eq!(got, d.get(j, i));
            }
        }
    }

    #[test]
    fn works_in_f32() {
        let a = FeatureVector::new(vec![0.0f32, 0.0]).unwrap();
        let b = FeatureVector::new(vec![3.0f32, 4.0]).unwrap();
        assert_eq!(pairwise_distances(&[a, b]).unwrap().get(0, 1), 5.0f32);
    }
}
