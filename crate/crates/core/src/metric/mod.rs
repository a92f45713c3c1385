//! PK batch sampling, batch-hard triplet loss and a linear embedding trainer.

mod features;
mod gradient;
mod loss;
mod model;
mod sampler;
mod train;

pub use features::{euclidean, pairwise_distances, DistanceMatrix, FeatureVector};
pub use gradient::loss_gradient;
pub use loss::{batch_hard_loss, BatchHardLoss, Reduction};
pub use model::EmbeddingModel;
pub use sampler::{sample_pk_batch, sample_pk_indices, Batch};
pub use train::{train_toy, Dataset, TrainConfig, TrainOutcome};
