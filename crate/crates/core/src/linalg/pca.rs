use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

use super::dense::{dot, Matrix};

/// Rows per block when accumulating the covariance in parallel. Fixed so the
/// reduction order, and hence the result, does not depend on thread count.
const COVARIANCE_BLOCK: usize = 256;

/// How many principal axes to keep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PcaTarget {
    /// Exactly this many axes (still bounded by `min(n - 1, d)`).
    Components(usize),
    /// Smallest count whose cumulative explained variance reaches
    /// `fraction` of the total, optionally capped.
    VarianceFraction {
        fraction: f64,
        max_components: Option<usize>,
    },
}

impl Default for PcaTarget {
    fn default() -> Self {
        PcaTarget::VarianceFraction {
            fraction: 0.95,
            max_components: Some(128),
        }
    }
}

impl PcaTarget {
    pub fn validate(&self) -> Result<()> {
        match *self {
            PcaTarget::Components(0) => Err(Error::InvalidArgument(
                "PCA component count must be at least 1".into(),
            )),
            PcaTarget::VarianceFraction { fraction, .. } if !(fraction > 0.0 && fraction <= 1.0) => {
                Err(Error::InvalidArgument(format!(
                    "PCA variance fraction {fraction} is outside (0, 1]"
                )))
            }
            PcaTarget::VarianceFraction {
                max_components: Some(0),
                ..
            } => Err(Error::InvalidArgument(
                "PCA component cap must be at least 1".into(),
            )),
            _ => Ok(()),
        }
    }
}

/// Fitted principal component projection.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PcaModel {
    /// Per-dimension mean of the fitting data.
    pub mean: Vec<f64>,
    /// `p × d`, orthonormal rows, ordered by decreasing variance.
    pub components: Matrix,
    /// Variance along each kept axis, non-increasing.
    pub explained_variance: Vec<f64>,
    /// Trace of the sample covariance of the fitting data.
    pub total_variance: f64,
}

impl PcaModel {
    pub fn input_dim(&self) -> usize {
        self.mean.len()
    }

    pub fn output_dim(&self) -> usize {
        self.components.rows()
    }

    /// Projects one sample: `components · (x − mean)`.
    pub fn transform_row(&self, x: &[f64], out: &mut [f64]) {
        let centered: Vec<f64> = x.iter().zip(&self.mean).map(|(v, m)| v - m).collect();
        for (o, axis) in out.iter_mut().zip(self.components.row_iter()) {
            *o = dot(axis, &centered);
        }
    }

    /// Maps reduced coordinates back to the input space.
    pub fn inverse_transform(&self, z: &Matrix) -> Result<Matrix> {
        if z.cols() != self.output_dim() {
            return Err(Error::DimMismatch {
                expected: self.output_dim(),
                actual: z.cols(),
            });
        }
        let mut out = z.matmul(&self.components)?;
        for i in 0..out.rows() {
            for (v, m) in out.row_mut(i).iter_mut().zip(&self.mean) {
                *v += m;
            }
        }
        Ok(out)
    }
}

/// Unbiased sample covariance of the rows of `x` around `mean`.
fn sample_covariance(x: &Matrix, mean: &[f64]) -> Vec<f64> {
    let d = x.cols();
    let partials: Vec<Vec<f64>> = x
        .as_slice()
        .par_chunks(COVARIANCE_BLOCK * d)
        .map(|block| {
            let mut acc = vec![0.0; d * d];
            let mut centered = vec![0.0; d];
            for row in block.chunks_exact(d) {
                for (c, (v, m)) in centered.iter_mut().zip(row.iter().zip(mean)) {
                    *c = v - m;
                }
                for i in 0..d {
                    let ci = centered[i];
                    if ci == 0.0 {
                        continue;
                    }
                    let dst = &mut acc[i * d + i..(i + 1) * d];
                    for (a, &cj) in dst.iter_mut().zip(&centered[i..]) {
                        *a += ci * cj;
                    }
                }
            }
            acc
        })
        .collect();

    let mut cov = vec![0.0; d * d];
    for p in &partials {
        for (c, v) in cov.iter_mut().zip(p) {
            *c += v;
        }
    }
    let denom = (x.rows() - 1) as f64;
    for i in 0..d {
        for j in i..d {
            let v = cov[i * d + j] / denom;
            cov[i * d + j] = v;
            cov[j * d + i] = v;
        }
    }
    cov
}

/// Fits a PCA projection by eigendecomposition of the sample covariance.
///
/// Each axis is sign-normalized so its largest-magnitude entry is positive,
/// which makes fitted models reproducible across runs and platforms.
pub fn fit_pca(x: &Matrix, target: PcaTarget) -> Result<PcaModel> {
    target.validate()?;
    let (n, d) = (x.rows(), x.cols());
    if n < 2 {
        return Err(Error::TooFewSamples { needed: 2, found: n });
    }
    let mean = x.column_means();
    let cov = sample_covariance(x, &mean);
    let total_variance: f64 = (0..d).map(|i| cov[i * d + i]).sum();
    if !(total_variance >= 1e-20) {
        return Err(Error::DegenerateData(total_variance));
    }

    let eig = SymmetricEigen::new(DMatrix::from_row_slice(d, d, &cov));
    let mut order: Vec<usize> = (0..d).collect();
    order.sort_by(|&a, &b| {
        eig.eigenvalues[b]
            .total_cmp(&eig.eigenvalues[a])
            .then(a.cmp(&b))
    });
    let values: Vec<f64> = order.iter().map(|&i| eig.eigenvalues[i].max(0.0)).collect();

    let rank_cap = (n - 1).min(d);
    let p = match target {
        PcaTarget::Components(p) => p.min(rank_cap),
        PcaTarget::VarianceFraction {
            fraction,
            max_components,
        } => {
            let goal = fraction * total_variance * (1.0 - 1e-12);
            let mut cumulative = 0.0;
            let mut p = values.len();
            for (i, v) in values.iter().enumerate() {
                cumulative += v;
                if cumulative >= goal {
                    p = i + 1;
                    break;
                }
            }
            p.min(max_components.unwrap_or(usize::MAX)).min(rank_cap)
        }
    };

    let mut components = Matrix::zeros(p, d);
    for (r, &src) in order.iter().take(p).enumerate() {
        let axis = eig.eigenvectors.column(src);
        let pivot = (0..d).fold(0, |best, j| {
            if axis[j].abs() > axis[best].abs() {
                j
            } else {
                best
            }
        });
        let sign = if axis[pivot] < 0.0 { -1.0 } else { 1.0 };
        for (j, c) in components.row_mut(r).iter_mut().enumerate() {
            *c = sign * axis[j];
        }
    }

    Ok(PcaModel {
        mean,
        components,
        explained_variance: values[..p].to_vec(),
        total_variance,
    })
}

/// Projects every row of `x` onto the model's axes.
pub fn pca_transform(model: &PcaModel, x: &Matrix) -> Result<Matrix> {
    if x.cols() != model.input_dim() {
        return Err(Error::DimMismatch {
            expected: model.input_dim(),
            actual: x.cols(),
        });
    }
    let (p, d) = (model.output_dim(), x.cols());
    let mut out = vec![0.0; x.rows() * p];
    if p > 0 {
        out.par_chunks_mut(p)
            .zip(x.as_slice().par_chunks(d))
            .for_each(|(dst, row)| model.transform_row(row, dst));
    }
    Ok(Matrix::from_vec(x.rows(), p, out))
}
