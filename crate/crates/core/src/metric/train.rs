use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{loss_gradient, sample_pk_batch, EmbeddingModel, Reduction};
use crate::dataset::derive_seed;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// In-memory training or evaluation set: one input vector per image.
#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    inputs: Vec<Vec<T>>,
    labels: Vec<u64>,
    cameras: Vec<u32>,
}

impl<T: Scalar> Dataset<T> {
    pub fn new(inputs: Vec<Vec<T>>, labels: Vec<u64>, cameras: Vec<u32>) -> Result<Self> {
        if inputs.len() != labels.len() || cameras.len() != labels.len() {
            return Err(Error::dims(
                labels.len(),
                format!("{} inputs / {} cameras", inputs.len(), cameras.len()),
            ));
        }
        if let Some(first) = inputs.first() {
            if first.is_empty() {
                return Err(Error::InvalidData("zero-dimensional inputs".into()));
            }
            if let Some(bad) = inputs.iter().find(|x| x.len() != first.len()) {
                return Err(Error::dims(first.len(), bad.len()));
            }
        }
        if inputs.iter().flatten().any(|v| !v.is_finite()) {
            return Err(Error::InvalidData("non-finite input value".into()));
        }
        Ok(Self {
            inputs,
            labels,
            cameras,
        })
    }

    pub fn len(&self) -> usize {
        self.labels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.labels.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.inputs.first().map_or(0, Vec::len)
    }

    pub fn inputs(&self) -> &[Vec<T>] {
        &self.inputs
    }

    pub fn labels(&self) -> &[u64] {
        &self.labels
    }

    pub fn cameras(&self) -> &[u32] {
        &self.cameras
    }

    pub fn num_identities(&self) -> usize {
        self.labels
            .iter()
            .collect::<std::collections::BTreeSet<_>>()
            .len()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainConfig<T> {
    /// Identities per batch.
    pub p: usize,
    /// Images per identity.
    pub k: usize,
    pub margin: T,
    pub learning_rate: T,
    pub epochs: usize,
    pub seed: u64,
    pub reduction: Reduction,
    /// Output dimension; `None` keeps the input dimension.
    pub d_out: Option<usize>,
    pub normalize_output: bool,
}

impl<T: Scalar> Default for TrainConfig<T> {
    fn default() -> Self {
        Self {
            p: 18,
            k: 4,
            margin: T::one(),
            learning_rate: T::of(2e-4),
            epochs: 300,
            seed: 0,
            reduction: Reduction::Sum,
            d_out: None,
            normalize_output: false,
        }
    }
}

impl<T: Scalar> TrainConfig<T> {
    pub fn batch_size(&self) -> usize {
        self.p * self.k
    }

    pub fn validate(&self) -> Result<()> {
        if self.p < 2 {
            return Err(Error::param(
                "P",
                format!("{} < 2; a negative must exist", self.p),
            ));
        }
        if self.k < 2 {
            return Err(Error::param(
                "K",
                format!("{} < 2; a positive must exist", self.k),
            ));
        }
        if !(self.margin.is_finite() && self.margin >= T::zero()) {
            return Err(Error::param(
                "margin",
                format!("{} must be finite and >= 0", self.margin),
            ));
        }
        if !(self.learning_rate.is_finite() && self.learning_rate >= T::zero()) {
            return Err(Error::param(
                "learning_rate",
                format!("{} must be finite and >= 0", self.learning_rate),
            ));
        }
        if self.epochs == 0 {
            return Err(Error::param("epochs", "must be positive"));
        }
        if self.d_out == Some(0) {
            return Err(Error::param("d_out", "must be positive"));
        }
        Ok(())
    }

    /// Initial model for a dataset of input dimension `d_in`.
    pub fn initial_model(&self, d_in: usize) -> Result<EmbeddingModel<T>> {
        EmbeddingModel::init(
            d_in,
            self.d_out.unwrap_or(d_in),
            self.normalize_output,
            derive_seed(self.seed, 0),
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainOutcome<T> {
    pub model: EmbeddingModel<T>,
    /// Mean batch loss (under the configured reduction) for each epoch.
    pub epoch_losses: Vec<T>,
    pub batches_per_epoch: usize,
}

/// Plain gradient descent on the batch-hard loss.
///
/// An epoch is `ceil(len / (P·K))` batches (at least one). The loss logged
/// for each batch is taken before its update.
pub fn train_toy<T: Scalar>(
    dataset: &Dataset<T>,
    config: &TrainConfig<T>,
) -> Result<TrainOutcome<T>> {
    config.validate()?;
    if dataset.is_empty() {
        return Err(Error::InvalidData("empty training set".into()));
    }
    let identities = dataset.num_identities();
    if identities < config.p {
        return Err(Error::NotEnoughIdentities {
            needed: config.p,
            available: identities,
        });
    }
    let mut model = config.initial_model(dataset.dim())?;
    let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, 1));
    let batches_per_epoch = dataset.len().div_ceil(config.batch_size()).max(1);

    let mut epoch_losses = Vec::with_capacity(config.epochs);
    for _ in 0..config.epochs {
        let mut total = T::zero();
        for _ in 0..batches_per_epoch {
            let batch = sample_pk_batch(dataset, config.p, config.k, &mut rng)?;
            let (loss, grad) = loss_gradient(&model, &batch, config.margin, config.reduction)?;
            total = total + loss.reduced(config.reduction);
            if config.learning_rate > T::zero() {
                for (w, g) in model.weights_mut().iter_mut().zip(grad) {
                    *w = *w - config.learning_rate * g;
                }
            }
        }
        epoch_losses.push(total / T::of(batches_per_epoch as f64));
    }
    Ok(TrainOutcome {
        model,
        epoch_losses,
        batches_per_epoch,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synthetic::ClusterSpec;

    fn clusters() -> Dataset<f64> {
        ClusterSpec::default().generate::<f64>().unwrap()
    }

    #[test]
    fn config_validation() {
        let mut c = TrainConfig::<f64>::default();
        assert_eq!(c.batch_size(), 72);
        assert!(c.validate().is_ok());
        c.p = 1;
        assert!(c.validate().is_err());
        c = TrainConfig {
            k: 1,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c = TrainConfig {
            margin: -1.0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c = TrainConfig {
            epochs: 0,
            ..Default::default()
        };
        assert!(c.validate().is_err());
        c = TrainConfig {
            learning_rate: f64::NAN,
            ..Default::default()
        };
        assert!(c.validate().is_err());
    }

    #[test]
    fn zero_learning_rate_keeps_init() {
        let data = clusters();
        let config = TrainConfig {
            p: 5,
            k: 4,
            learning_rate: 0.0,
            epochs: 3,
            seed: 4,
            ..Default::default()
        };
        let out = train_toy(&data, &config).unwrap();
        assert_eq!(out.model, config.initial_model(data.dim()).unwrap());
        assert_eq!(out.epoch_losses.len(), 3);
    }

    #[test]
    fn loss_decreases_on_clusters() {
        let data = clusters();
        let config = TrainConfig {
            p: 10,
            k: 4,
            epochs: 50,
            seed: 1,
            ..Default::default()
        };
        let out = train_toy(&data, &config).unwrap();
        assert!(
            out.epoch_losses.last() < out.epoch_losses.first(),
            "{:?}",
            out.epoch_losses
        );
    }

    #[test]
    fn bit_reproducible() {
        let data = clusters();
        let config = TrainConfig {
            p: 6,
            k: 3,
            epochs: 5,
            seed: 9,
            ..Default::default()
        };
        let a = train_toy(&data, &config).unwrap();
        let b = train_toy(&data, &config).unwrap();
        assert_eq!(a, b);
        let bits = |o: &TrainOutcome<f64>| {
            o.model
                .weights()
                .iter()
                .map(|w| w.to_bits())
                .collect::<Vec<_>>()
        };
        assert_eq!(bits(&a), bits(&b));
    }

    #[test]
    fn rejects_too_many_identities() {
        let data = clusters();
        let config = TrainConfig::<f64>::default();
        assert!(matches!(
            train_toy(&data, &config),
            Err(Error::NotEnoughIdentities { .. })
        ));
    }

    #[test]
    fn dataset_checks() {
        assert!(Dataset::new(vec![vec![1.0f64]], vec![1, 2], vec![0, 0]).is_err());
        assert!(Dataset::new(vec![vec![1.0f64], vec![1.0, 2.0]], vec![1, 2], vec![0, 0]).is_err());
        assert!(Dataset::new(vec![vec![f64::INFINITY]], vec![1], vec![0]).is_err());
    }
}
