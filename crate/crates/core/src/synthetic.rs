//! Seeded synthetic data for desk-scale runs.
//!
//! [`ClusterSpec`] draws isotropic Gaussian clusters, one per identity.
//! [`CorpusSpec`] builds a train/test corpus with two feature views per
//! image: the original view carries a camera-dependent background vector
//! that interferes with identity, while the segmented view suppresses it.
//! A configurable share of images gets a failed segmentation, which the
//! post-processing gate marks as discarded.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Normal};

use crate::dataset::{derive_seed, ImageRecord, Manifest, SegAvailability, Split};
use crate::error::{Error, Result};
use crate::io::{FeatureKey, FeatureTable};
use crate::metric::Dataset;
use crate::scalar::Scalar;

#[derive(Debug, Clone, PartialEq)]
pub struct ClusterSpec {
    pub identities: usize,
    pub samples_per_identity: usize,
    pub dim: usize,
    /// Distance between neighbouring centres in units of `std`.
    pub separation: f64,
    pub std: f64,
    pub cameras: u32,
    pub seed: u64,
}

impl Default for ClusterSpec {
    fn default() -> Self {
        Self {
            identities: 10,
            samples_per_identity: 20,
            dim: 2,
            separation: 6.0,
            std: 1.0,
            cameras: 4,
            seed: 0,
        }
    }
}

impl ClusterSpec {
    /// Centres on a square grid (first two axes) with spacing `separation·std`.
    pub fn centers(&self) -> Vec<Vec<f64>> {
        let side = (self.identities as f64).sqrt().ceil().max(1.0) as usize;
        let spacing = self.separation * self.std;
        (0..self.identities)
            .map(|i| {
                let mut c = vec![0.0; self.dim];
                c[0] = (i % side) as f64 * spacing;
                if self.dim > 1 {
                    c[1] = (i / side) as f64 * spacing;
                }
                c
            })
            .collect()
    }

    pub fn generate<T: Scalar>(&self) -> Result<Dataset<T>> {
        if self.identities == 0
            || self.samples_per_identity == 0
            || self.dim == 0
            || self.cameras == 0
        {
            return Err(Error::param("cluster spec", "sizes must be positive"));
        }
        let noise = Normal::new(0.0, self.std).map_err(|e| Error::param("std", e.to_string()))?;
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        let mut inputs = Vec::new();
        let mut labels = Vec::new();
        let mut cameras = Vec::new();
        for (id, center) in self.centers().iter().enumerate() {
            for s in 0..self.samples_per_identity {
                inputs.push(
                    center
                        .iter()
                        .map(|&c| T::of(c + noise.sample(&mut rng)))
                        .collect(),
                );
                labels.push(id as u64);
                cameras.push(s as u32 % self.cameras);
            }
        }
        Dataset::new(inputs, labels, cameras)
    }
}

/// A generated corpus: manifests plus original and segmented feature views.
#[derive(Debug, Clone, PartialEq)]
pub struct Corpus {
    pub train: Manifest,
    pub test: Manifest,
    pub train_original: FeatureTable,
    pub train_segmented: FeatureTable,
    pub test_original: FeatureTable,
    pub test_segmented: FeatureTable,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusSpec {
    pub train_identities: usize,
    pub test_identities: usize,
    pub images_per_identity: usize,
    pub cameras: u32,
    /// Identity-bearing dimensions.
    pub identity_dim: usize,
    /// Background dimensions.
    pub background_dim: usize,
    pub identity_spread: f64,
    pub noise_std: f64,
    pub background_scale: f64,
    /// Probability that an image's segmentation fails the gate.
    pub failure_rate: f64,
    pub seed: u64,
}

impl Default for CorpusSpec {
    fn default() -> Self {
        Self {
            train_identities: 20,
            test_identities: 10,
            images_per_identity: 12,
            cameras: 4,
            identity_dim: 4,
            background_dim: 4,
            identity_spread: 3.0,
            noise_std: 0.6,
            background_scale: 2.5,
            failure_rate: 0.2,
            seed: 0,
        }
    }
}

impl CorpusSpec {
    pub fn dim(&self) -> usize {
        self.identity_dim + self.background_dim
    }

    pub fn generate(&self) -> Result<Corpus> {
        if self.train_identities < 2 || self.test_identities < 1 || self.images_per_identity < 2 {
            return Err(Error::param(
                "corpus spec",
                "need >= 2 train identities and >= 2 images each",
            ));
        }
        if self.identity_dim == 0 || self.cameras == 0 {
            return Err(Error::param(
                "corpus spec",
                "identity_dim and cameras must be positive",
            ));
        }
        if !(0.0..=1.0).contains(&self.failure_rate) {
            return Err(Error::param("failure_rate", "must lie in [0, 1]"));
        }
        let unit = Normal::new(0.0, 1.0).expect("unit normal");
        let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(self.seed, 0));
        let scenes: Vec<Vec<f64>> = (0..self.cameras)
            .map(|_| {
                (0..self.background_dim)
                    .map(|_| self.background_scale * unit.sample(&mut rng))
                    .collect()
            })
            .collect();

        let mut build = |first_id: usize, count: usize, test: bool| {
            let mut records = Vec::new();
            let (mut orig, mut seg, mut keys) = (Vec::new(), Vec::new(), Vec::new());
            for id in first_id..first_id + count {
                let center: Vec<f64> = (0..self.identity_dim)
                    .map(|_| self.identity_spread * unit.sample(&mut rng))
                    .collect();
                for j in 0..self.images_per_identity {
                    let camera = ((id + j) % self.cameras as usize) as u32;
                    let split = match (test, j) {
                        (false, _) => Split::Train,
                        (true, 0) => Split::TestQuery,
                        (true, _) => Split::TestGallery,
                    };
                    let path = format!(
                        "{}/{id:04}_c{camera:02}_{j:03}.png",
                        if test { "test" } else { "train" }
                    );
                    let mut record = ImageRecord::new(path.clone(), id as u64, camera, split);
                    let failed = rng.gen_bool(self.failure_rate);
                    record.availability = if failed {
                        SegAvailability::Discarded
                    } else {
                        SegAvailability::Kept
                    };

                    let body: Vec<f64> = center
                        .iter()
                        .map(|&c| c + self.noise_std * unit.sample(&mut rng))
                        .collect();
                    let scene = &scenes[camera as usize];
                    let mut o = body.clone();
                    o.extend(
                        scene
                            .iter()
                            .map(|&b| b + self.noise_std * unit.sample(&mut rng)),
                    );
                    let mut s: Vec<f64> = if failed {
                        // a failed mask cuts most of the vehicle away
                        body.iter()
                            .map(|&v| 0.3 * v + self.noise_std * unit.sample(&mut rng))
                            .collect()
                    } else {
                        body
                    };
                    s.extend(
                        (0..self.background_dim)
                            .map(|_| 0.1 * self.noise_std * unit.sample(&mut rng)),
                    );
                    keys.push(FeatureKey {
                        image_path: path,
                        identity: id as u64,
                        camera,
                    });
                    orig.push(o);
                    seg.push(s);
                    records.push(record);
                }
            }
            (records, orig, seg, keys)
        };

        let (train_records, tr_o, tr_s, tr_k) = build(0, self.train_identities, false);
        let (test_records, te_o, te_s, te_k) =
            build(self.train_identities, self.test_identities, true);
        let dim = self.dim();
        Ok(Corpus {
            train: Manifest::new(train_records, self.seed),
            test: Manifest::new(test_records, self.seed),
            train_original: FeatureTable::new(dim, tr_o, Some(tr_k.clone()))?,
            train_segmented: FeatureTable::new(dim, tr_s, Some(tr_k))?,
            test_original: FeatureTable::new(dim, te_o, Some(te_k.clone()))?,
            test_segmented: FeatureTable::new(dim, te_s, Some(te_k))?,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn clusters_are_separated() {
        let spec = ClusterSpec::default();
        let c = spec.centers();
        for i in 0..c.len() {
            for j in i + 1..c.len() {
                let d = crate::metric::euclidean(&c[i], &c[j]);
                assert!(d >= 5.0 * spec.std - 1e-12);
            }
        }
        let data = spec.generate::<f64>().unwrap();
        assert_eq!(data.len(), 200);
        assert_eq!(data.num_identities(), 10);
        assert_eq!(spec.generate::<f64>().unwrap(), data);
    }

    #[test]
    fn corpus_shapes() {
        let c = CorpusSpec::default().generate().unwrap();
        assert_eq!(c.train.len(), 240);
        assert_eq!(c.test.len(), 120);
        assert_eq!(c.test.split(Split::TestQuery).len(), 10);
        assert_eq!(c.train_original.aligned_to(&c.train).unwrap().len(), 240);
        assert_eq!(c.test_segmented.dim, 8);
        assert_eq!(CorpusSpec::default().generate().unwrap(), c);
        let kept = c.train.count_availability(SegAvailability::Kept);
        assert!(kept > 150 && kept < 230, "{kept}");
    }
}
