use std::path::Path;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::FeatureVector;
use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Linear embedding `f(x) = x · W`, optionally L2-normalised.
///
/// `weights` is row-major `d_in × d_out`.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingModel<T> {
    d_in: usize,
    d_out: usize,
    weights: Vec<T>,
    pub normalize_output: bool,
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    format: String,
    d_in: usize,
    d_out: usize,
    normalize_output: bool,
    weights: Vec<f64>,
}

const MODEL_FORMAT: &str = "bir-linear-embedding/1";

impl<T: Scalar> EmbeddingModel<T> {
    pub fn new(d_in: usize, d_out: usize, weights: Vec<T>, normalize_output: bool) -> Result<Self> {
        if d_in == 0 || d_out == 0 {
            return Err(Error::param("model shape", format!("{d_in}x{d_out}")));
        }
        if weights.len() != d_in * d_out {
            return Err(Error::dims(d_in * d_out, weights.len()));
        }
        if weights.iter().any(|w| !w.is_finite()) {
            return Err(Error::InvalidData("non-finite model weight".into()));
        }
        Ok(Self {
            d_in,
            d_out,
            weights,
            normalize_output,
        })
    }

    pub fn identity(dim: usize) -> Result<Self> {
        let mut weights = vec![T::zero(); dim * dim];
        for i in 0..dim {
            weights[i * dim + i] = T::one();
        }
        Self::new(dim, dim, weights, false)
    }

    /// Seeded uniform initialisation in `[-1/sqrt(d_in), 1/sqrt(d_in)]`.
    pub fn init(d_in: usize, d_out: usize, normalize_output: bool, seed: u64) -> Result<Self> {
        let bound = 1.0 / (d_in.max(1) as f64).sqrt();
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let weights = (0..d_in * d_out)
            .map(|_| T::of(rng.gen_range(-bound..=bound)))
            .collect();
        Self::new(d_in, d_out, weights, normalize_output)
    }

    pub fn d_in(&self) -> usize {
        self.d_in
    }

    pub fn d_out(&self) -> usize {
        self.d_out
    }

    pub fn weights(&self) -> &[T] {
        &self.weights
    }

    pub fn weight(&self, i: usize, j: usize) -> T {
        self.weights[i * self.d_out + j]
    }

    pub(crate) fn weights_mut(&mut self) -> &mut [T] {
        &mut self.weights
    }

    /// `x · W` before normalisation.
    pub fn project(&self, input: &[T]) -> Result<Vec<T>> {
        if input.len() != self.d_in {
            return Err(Error::dims(self.d_in, input.len()));
        }
        let mut out = vec![T::zero(); self.d_out];
        for (i, &x) in input.iter().enumerate() {
            let row = &self.weights[i * self.d_out..(i + 1) * self.d_out];
            for (o, &w) in out.iter_mut().zip(row) {
                *o = *o + x * w;
            }
        }
        Ok(out)
    }

    pub fn embed(&self, input: &[T]) -> Result<FeatureVector<T>> {
        let mut out = self.project(input)?;
        if self.normalize_output {
            let norm = out.iter().map(|&v| v * v).sum::<T>().sqrt();
            if norm > T::zero() {
                out.iter_mut().for_each(|v| *v = *v / norm);
            }
        }
        FeatureVector::new(out)
    }

    pub fn embed_all(&self, inputs: &[Vec<T>]) -> Result<Vec<FeatureVector<T>>> {
        inputs.iter().map(|x| self.embed(x)).collect()
    }

    pub fn to_json(&self) -> String {
        let file = ModelFile {
            format: MODEL_FORMAT.into(),
            d_in: self.d_in,
            d_out: self.d_out,
            normalize_output: self.normalize_output,
            weights: self.weights.iter().map(|w| w.as_f64()).collect(),
        };
        serde_json::to_string_pretty(&file).expect("model serialises")
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let file: ModelFile = serde_json::from_str(text)
            .map_err(|e| Error::InvalidData(format!("model file: {e}")))?;
        if file.format != MODEL_FORMAT {
            return Err(Error::InvalidData(format!(
                "unknown model format `{}`",
                file.format
            )));
        }
        let weights = file.weights.into_iter().map(T::of).collect();
        Self::new(file.d_in, file.d_out, weights, file.normalize_output)
    }

    pub fn write(&self, path: &Path) -> Result<()> {
        std::fs::write(path, self.to_json() + "\n").map_err(|e| Error::io(path, e))
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_json(&text)
    }
}
