use super::{batch_hard_loss, Batch, BatchHardLoss, EmbeddingModel, FeatureVector, Reduction};
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Loss of `batch` under `model` and its gradient with respect to the
/// weights (row-major, same layout as [`EmbeddingModel::weights`]).
///
/// Only hinge-active anchors contribute; the hinge derivative at exactly
/// zero is taken as zero, and so is the derivative of a zero distance.
pub fn loss_gradient<T: Scalar>(
    model: &EmbeddingModel<T>,
    batch: &Batch<T>,
    margin: T,
    reduction: Reduction,
) -> Result<(BatchHardLoss<T>, Vec<T>)> {
    if batch.inputs.len() != batch.labels.len() {
        return Err(Error::dims(batch.labels.len(), batch.inputs.len()));
    }
    let n = batch.len();
    let d_out = model.d_out();
    let projected = batch
        .inputs
        .iter()
        .map(|x| model.project(x))
        .collect::<Result<Vec<_>>>()?;
    let norms: Vec<T> = projected
        .iter()
        .map(|g| g.iter().map(|&v| v * v).sum::<T>().sqrt())
        .collect();
    let features: Vec<FeatureVector<T>> = projected
        .iter()
        .zip(&norms)
        .map(|(g, &norm)| {
            if model.normalize_output && norm > T::zero() {
                FeatureVector::from_trusted(g.iter().map(|&v| v / norm).collect())
            } else {
                FeatureVector::from_trusted(g.clone())
            }
        })
        .collect();
    let loss = batch_hard_loss(&features, &batch.labels, margin)?;

    let scale = reduction.scale::<T>(n);
    let mut d_feat = vec![vec![T::zero(); d_out]; n];
    for (a, (&hinge, &(p, q))) in loss.per_anchor.iter().zip(&loss.hardest).enumerate() {
        if hinge <= T::zero() {
            continue;
        }
        accumulate_distance_grad(&features, &mut d_feat, a, p, scale);
        accumulate_distance_grad(&features, &mut d_feat, a, q, -scale);
    }

    let d_proj: Vec<Vec<T>> = if model.normalize_output {
        d_feat
            .iter()
            .zip(&features)
            .zip(&norms)
            .map(|((df, f), &norm)| {
                if norm <= T::zero() {
                    return vec![T::zero(); d_out];
                }
                let dot: T = df.iter().zip(f.values()).map(|(&a, &b)| a * b).sum();
                df.iter()
                    .zip(f.values())
                    .map(|(&g, &fv)| (g - fv * dot) / norm)
                    .collect()
            })
            .collect()
    } else {
        d_feat
    };

    let mut grad = vec![T::zero(); model.d_in() * d_out];
    for (x, dg) in batch.inputs.iter().zip(&d_proj) {
        for (r, &xr) in x.iter().enumerate() {
            let row = &mut grad[r * d_out..(r + 1) * d_out];
            for (w, &g) in row.iter_mut().zip(dg) {
                *w = *w + xr * g;
            }
        }
    }
    Ok((loss, grad))
}

/// Adds `sign * d||f_a - f_b|| / d(f_a, f_b)` into `d_feat`.
fn accumulate_distance_grad<T: Scalar>(
    features: &[FeatureVector<T>],
    d_feat: &mut [Vec<T>],
    a: usize,
    b: usize,
    sign: T,
) {
    let (fa, fb) = (features[a].values(), features[b].values());
    let dist = super::euclidean(fa, fb);
    if dist <= T::zero() {
        return;
    }
    for c in 0..fa.len() {
        let u = sign * (fa[c] - fb[c]) / dist;
        d_feat[a][c] = d_feat[a][c] + u;
        d_feat[b][c] = d_feat[b][c] - u;
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn loss_at(model: &EmbeddingModel<f64>, batch: &Batch<f64>, m: f64, red: Reduction) -> f64 {
        let f = model.embed_all(&batch.inputs).unwrap();
        batch_hard_loss(&f, &batch.labels, m).unwrap().reduced(red)
    }

    fn central_difference(
        model: &EmbeddingModel<f64>,
        batch: &Batch<f64>,
        m: f64,
        red: Reduction,
    ) -> Vec<f64> {
        let h = 1e-5;
        (0..model.weights().len())
            .map(|i| {
                let mut plus = model.clone();
                plus.weights_mut()[i] += h;
                let mut minus = model.clone();
                minus.weights_mut()[i] -= h;
                (loss_at(&plus, batch, m, red) - loss_at(&minus, batch, m, red)) / (2.0 * h)
            })
            .collect()
    }

    fn rel_err(a: &[f64], b: &[f64]) -> f64 {
        let diff: f64 = a
            .iter()
            .zip(b)
            .map(|(x, y)| (x - y).powi(2))
            .sum::<f64>()
            .sqrt();
        let scale: f64 = a
            .iter()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt()
            .max(b.iter().map(|x| x * x).sum::<f64>().sqrt());
        diff / scale.max(1e-8)
    }

    fn batch(inputs: Vec<Vec<f64>>, labels: Vec<u64>) -> Batch<f64> {
        let indices = (0..labels.len()).collect();
        Batch {
            inputs,
            labels,
            indices,
        }
    }

    #[test]
    fn inactive_hinges_give_zero_gradient() {
        let b = batch(
            vec![vec![0.0], vec![0.1], vec![10.0], vec![10.1]],
            vec![0, 0, 1, 1],
        );
        let model = EmbeddingModel::identity(1).unwrap();
        let (loss, grad) = loss_gradient(&model, &b, 1.0, Reduction::Sum).unwrap();
        assert_eq!(loss.loss, 0.0);
        assert!(grad.iter().all(|&g| g == 0.0));
    }

    #[test]
    fn hand_example_gradient() {
        let b = batch(
            vec![vec![0.0], vec![2.0], vec![3.0], vec![5.0]],
            vec![0, 0, 1, 1],
        );
        let model = EmbeddingModel::identity(1).unwrap();
        let (loss, grad) = loss_gradient(&model, &b, 1.0, Reduction::Sum).unwrap();
        assert_eq!(loss.loss, 4.0);
        // Anchors 1 and 2 contribute d/dw (2w - w + 1) = 1 each. Anchors 0
        // and 3 sit exactly on the hinge kink (1 - w = 0 at w = 1) and count
        // as inactive, which is the right derivative.
        assert!((grad[0] - 2.0).abs() < 1e-12);
        let h = 1e-5;
        let mut plus = model.clone();
        plus.weights_mut()[0] += h;
        let forward = (loss_at(&plus, &b, 1.0, Reduction::Sum) - 4.0) / h;
        assert!((forward - grad[0]).abs() / grad[0] < 1e-4);

        // Off the kink the central difference agrees as well.
        let scaled = EmbeddingModel::new(1, 1, vec![1.01], false).unwrap();
        let (_, grad) = loss_gradient(&scaled, &b, 1.0, Reduction::Sum).unwrap();
        let fd = central_difference(&scaled, &b, 1.0, Reduction::Sum);
        assert!(rel_err(&grad, &fd) < 1e-4);
    }

    #[test]
    fn random_models_match_finite_differences() {
        let mut rng = ChaCha8Rng::seed_from_u64(77);
        for trial in 0..30 {
            let (p, k, d_in, d_out) = (
                rng.gen_range(2..5),
                rng.gen_range(2..4),
                rng.gen_range(1..6),
                rng.gen_range(1..5),
            );
            let normalize = trial % 2 == 1;
            let red = if trial % 3 == 0 {
                Reduction::Mean
            } else {
                Reduction::Sum
            };
            let model = EmbeddingModel::<f64>::init(d_in, d_out, normalize, rng.gen()).unwrap();
            let labels: Vec<u64> = (0..p * k).map(|i| (i / k) as u64).collect();
            let inputs = (0..p * k)
                .map(|_| (0..d_in).map(|_| rng.gen_range(-2.0..2.0)).collect())
                .collect();
            let b = batch(inputs, labels);
            let (_, grad) = loss_gradient(&model, &b, 0.5, red).unwrap();
            let fd = central_difference(&model, &b, 0.5, red);
            // random draws are tie-free with probability one; kinks within
            // the step are rare enough to be flagged rather than skipped
            assert!(
                rel_err(&grad, &fd) < 1e-4,
                "trial {trial}: {grad:?} vs {fd:?}"
            );
        }
    }

    #[test]
    fn dimension_mismatch() {
        let b = batch(
            vec![
                vec![0.0, 1.0],
                vec![1.0, 1.0],
                vec![2.0, 0.0],
                vec![3.0, 1.0],
            ],
            vec![0, 0, 1, 1],
        );
        let model = EmbeddingModel::<f64>::identity(3).unwrap();
        assert!(loss_gradient(&model, &b, 1.0, Reduction::Sum).is_err());
    }
}
