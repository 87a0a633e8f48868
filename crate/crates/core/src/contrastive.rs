//! InfoNCE (NT-Xent) contrastive objective over a batch of paired views.
//!
//! Rows `2t` and `2t + 1` of the batch hold the two augmented views of sample
//! `t`. Similarity is cosine similarity; every row other than the anchor
//! itself enters the denominator, the positive included.

use crate::error::{Error, Result};
use crate::linalg::{cosine_similarity, norm, Matrix, ZERO_NORM};

/// A `2N × d` batch of embeddings and its temperature.
#[derive(Debug, Clone)]
pub struct ContrastiveBatch {
    embeddings: Matrix,
    temperature: f64,
}

impl ContrastiveBatch {
    pub fn new(embeddings: Matrix, temperature: f64) -> Result<Self> {
        let rows = embeddings.rows();
        if rows == 0 || !rows.is_multiple_of(2) {
            return Err(Error::InvalidArgument(format!(
                "contrastive batch needs a positive even row count, got {rows}"
            )));
        }
        if !(temperature > 0.0 && temperature.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "temperature must be positive and finite, got {temperature}"
            )));
        }
        if let Some(row) = embeddings.row_iter().position(|r| norm(r) < ZERO_NORM) {
            return Err(Error::ZeroNorm { row: Some(row) });
        }
        Ok(Self {
            embeddings,
            temperature,
        })
    }

    /// Number of samples `N` (half the row count).
    pub fn batch_size(&self) -> usize {
        self.embeddings.rows() / 2
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    pub fn embeddings(&self) -> &Matrix {
        &self.embeddings
    }

    fn logit(&self, i: usize, k: usize) -> f64 {
        // rows are validated non-zero with equal width, so this cannot fail
        cosine_similarity(self.embeddings.row(i), self.embeddings.row(k))
            .expect("validated batch rows")
            / self.temperature
    }
}

/// `ℓ(i, j) = −log( exp(s_ij/τ) / Σ_{k≠i} exp(s_ik/τ) )`, evaluated as
/// `−s_ij/τ + logsumexp_{k≠i}(s_ik/τ)` with the maximum factored out.
pub fn info_nce_pair_loss(batch: &ContrastiveBatch, i: usize, j: usize) -> Result<f64> {
    let len = batch.embeddings.rows();
    for index in [i, j] {
        if index >= len {
            return Err(Error::IndexOutOfRange { index, len });
        }
    }
    if i == j {
        return Err(Error::SamePair(i));
    }
    let logits: Vec<f64> = (0..len).filter(|&k| k != i).map(|k| batch.logit(i, k)).collect();
    let max = logits.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let sum: f64 = logits.iter().map(|l| (l - max).exp()).sum();
    let log_denominator = max + sum.ln();
    // Rounding can push a mathematically non-negative loss a hair below zero.
    Ok((log_denominator - batch.logit(i, j)).max(0.0))
}

/// Mean pair loss over all `2N` ordered positive pairs.
pub fn info_nce_batch_loss(batch: &ContrastiveBatch) -> f64 {
    let n = batch.batch_size();
    let mut total = 0.0;
    for t in 0..n {
        let (a, b) = (2 * t, 2 * t + 1);
        total += info_nce_pair_loss(batch, a, b).expect("valid pair");
        total += info_nce_pair_loss(batch, b, a).expect("valid pair");
    }
    total / (2 * n) as f64
}
