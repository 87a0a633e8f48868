//! In-memory sample containers shared by every stage.

use crate::error::{Error, Result};
use crate::linalg::Matrix;

/// `n × d` matrix of 32-bit sample embeddings, row-major, one row per sample.
///
/// Every value is finite and both dimensions are non-zero; the constructors
/// refuse anything else.
#[derive(Debug, Clone, PartialEq)]
pub struct EmbeddingMatrix {
    n: usize,
    d: usize,
    data: Vec<f32>,
}

impl EmbeddingMatrix {
    pub fn new(n: usize, d: usize, data: Vec<f32>) -> Result<Self> {
        if n == 0 || d == 0 {
            return Err(Error::EmptyMatrix);
        }
        if data.len() != n * d {
            return Err(Error::LengthMismatch {
                expected: n * d,
                actual: data.len(),
            });
        }
        if let Some(pos) = data.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFiniteValue {
                row: pos / d,
                col: pos % d,
            });
        }
        Ok(Self { n, d, data })
    }

    /// Builds a matrix from equal-length rows.
    pub fn from_rows<R: AsRef<[f32]>>(rows: &[R]) -> Result<Self> {
        let n = rows.len();
        let d = rows.first().map_or(0, |r| r.as_ref().len());
        let mut data = Vec::with_capacity(n * d);
        for r in rows {
            let r = r.as_ref();
            if r.len() != d {
                return Err(Error::DimMismatch {
                    expected: d,
                    actual: r.len(),
                });
            }
            data.extend_from_slice(r);
        }
        Self::new(n, d, data)
    }

    /// Rounds a dense `f64` matrix to single precision.
    pub fn from_matrix(m: &Matrix) -> Result<Self> {
        Self::new(
            m.rows(),
            m.cols(),
            m.as_slice().iter().map(|&v| v as f32).collect(),
        )
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn as_slice(&self) -> &[f32] {
        &self.data
    }

    pub fn row(&self, i: usize) -> &[f32] {
        &self.data[i * self.d..(i + 1) * self.d]
    }

    pub fn rows(&self) -> impl ExactSizeIterator<Item = &[f32]> + '_ {
        self.data.chunks_exact(self.d)
    }

    /// Widens to a dense `f64` matrix for numerical work.
    pub fn to_matrix(&self) -> Matrix {
        Matrix::from_vec(
            self.n,
            self.d,
            self.data.iter().map(|&v| f64::from(v)).collect(),
        )
    }

    /// Concatenates rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &EmbeddingMatrix) -> Result<Self> {
        if self.d != other.d {
            return Err(Error::DimMismatch {
                expected: self.d,
                actual: other.d,
            });
        }
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        Self::new(self.n + other.n, self.d, data)
    }
}

/// Per-sample non-negative integer labels: 0/1 OOD truth for evaluation, or
/// cluster ids for partitions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelVector(Vec<u32>);

impl LabelVector {
    pub fn new(labels: Vec<u32>) -> Result<Self> {
        if labels.is_empty() {
            return Err(Error::EmptyVector);
        }
        Ok(Self(labels))
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[u32] {
        &self.0
    }

    pub fn into_inner(self) -> Vec<u32> {
        self.0
    }

    /// Fails with `LengthMismatch` unless this vector pairs with `n` samples.
    pub fn check_len(&self, n: usize) -> Result<()> {
        if self.0.len() != n {
            return Err(Error::LengthMismatch {
                expected: n,
                actual: self.0.len(),
            });
        }
        Ok(())
    }
}
